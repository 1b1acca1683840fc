"""Brute-force Schur-Weyl decomposition of ``(C^d)^{⊗n}`` for small ``d`` and ``n``.

Everything here is built from dense ``d^n x d^n`` matrices and exact symmetric-group
characters, independently of the Schur polynomial code, so it can serve as ground truth.
Permutations are tuples of images: ``pi[i]`` is where ``i`` goes (0-based).
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .partitions import (
    UnsupportedSizeError,
    as_partition,
    dim_gl_irrep,
    dim_sn_irrep,
    enumerate_partitions,
)
from .schur import schur_eval
from .states import haar_unitary, spectrum, validate_density

#: largest tensor-space dimension handled (3^5)
MAX_SPACE_DIM = 243


def _check_size(d, n):
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    if d ** n > MAX_SPACE_DIM:
        raise UnsupportedSizeError(f"d^n = {d ** n} exceeds the oracle cap {MAX_SPACE_DIM}")


def compose(pi, tau) -> tuple:
    """``(pi tau)(i) = pi(tau(i))``."""
    return tuple(pi[t] for t in tau)


def inverse(pi) -> tuple:
    out = [0] * len(pi)
    for i, p in enumerate(pi):
        out[p] = i
    return tuple(out)


def cycle_type(pi) -> tuple:
    seen = [False] * len(pi)
    lengths = []
    for start in range(len(pi)):
        if seen[start]:
            continue
        k, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = pi[j]
            k += 1
        lengths.append(k)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def _index_map(pi, d):
    # (P v)[l] = v[l o pi]; axis pi(j) of the output is axis j of the input
    n = len(pi)
    return np.arange(d ** n).reshape((d,) * n).transpose(inverse(pi)).ravel()


def permutation_operator(pi, d: int) -> np.ndarray:
    """Matrix of ``|j_1 ... j_n> -> |j_{pi^-1(1)} ... j_{pi^-1(n)}>``."""
    pi = tuple(int(p) for p in pi)
    if sorted(pi) != list(range(len(pi))):
        raise ValueError(f"not a permutation: {pi}")
    _check_size(d, len(pi))
    idx = _index_map(pi, d)
    mat = np.zeros((d ** len(pi),) * 2)
    mat[np.arange(idx.size), idx] = 1.0
    return mat


def sn_character(lam, mu) -> int:
    """Character of the ``S_n`` irrep ``lam`` on the class of cycle type ``mu``.

    Murnaghan-Nakayama on the beta-set (abacus) of ``lam``: removing a border strip of
    length ``k`` moves one bead down by ``k``, with sign ``(-1)^(beads jumped over)``.
    """
    lam = as_partition(lam)
    mu = tuple(sorted(as_partition(sorted(mu, reverse=True)), reverse=True))
    if sum(lam) != sum(mu):
        raise ValueError(f"totals differ: |lam|={sum(lam)}, |mu|={sum(mu)}")
    rows = len(lam)
    beta = frozenset(lam[i] + rows - 1 - i for i in range(rows))
    return _mn(beta, mu)


@lru_cache(maxsize=None)
def _mn(beta, mu):
    if not mu:
        return 1
    k, rest = mu[0], mu[1:]
    total = 0
    for b in beta:
        target = b - k
        if target < 0 or target in beta:
            continue
        jumped = sum(1 for c in beta if target < c < b)
        total += (-1) ** jumped * _mn((beta - {b}) | {target}, rest)
    return total


def centralizer_order(mu) -> int:
    mu = as_partition(mu)
    out = 1
    for k in set(mu):
        m = mu.count(k)
        out *= k ** m * math.factorial(m)
    return out


def isotypic_projector(lam, d: int, n: int = None) -> np.ndarray:
    """``Pi_lam = (dim P_lam / n!) sum_pi chi_lam(pi) P_pi`` as a dense real matrix."""
    lam = as_partition(lam)
    n = sum(lam) if n is None else n
    if sum(lam) != n:
        raise ValueError(f"{lam} is not a partition of {n}")
    _check_size(d, n)
    return _projector(lam, d).copy()


@lru_cache(maxsize=None)
def _projector(lam, d):
    n = sum(lam)
    size = d ** n
    out = np.zeros((size, size))
    rows = np.arange(size)
    scale = dim_sn_irrep(lam) / math.factorial(n)
    for pi in permutations(range(n)):
        chi = sn_character(lam, cycle_type(pi))
        if chi:
            out[rows, _index_map(pi, d)] += scale * chi
    out.flags.writeable = False
    return out


def tensor_power(a, n: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, a)
    return out


@dataclass
class ProjectorAlgebraReport:
    d: int
    n: int
    idempotence: float
    hermiticity: float
    orthogonality: float
    completeness: float
    trace_error: float
    commutation: float = 0.0

    @property
    def max_error(self) -> float:
        return max(self.idempotence, self.hermiticity, self.orthogonality,
                   self.completeness, self.trace_error, self.commutation)

    def holds(self, tol: float = 1e-10) -> bool:
        return self.max_error <= tol


def check_projector_algebra(d: int, n: int, rng=None, unitaries: int = 0) -> ProjectorAlgebraReport:
    """Idempotence, orthogonality, completeness, traces, and optionally ``[Pi, U^{⊗n}] = 0``."""
    _check_size(d, n)
    lams = enumerate_partitions(n, n)
    projs = {lam: _projector(lam, d) for lam in lams}
    err = lambda m: float(np.max(np.abs(m))) if m.size else 0.0
    idem = max(err(p @ p - p) for p in projs.values())
    herm = max(err(p - p.T) for p in projs.values())
    ortho = max((err(projs[a] @ projs[b]) for i, a in enumerate(lams) for b in lams[i + 1:]), default=0.0)
    comp = err(sum(projs.values()) - np.eye(d ** n))
    tr = max(abs(np.trace(projs[lam]) - dim_gl_irrep(lam, d) * dim_sn_irrep(lam)) for lam in lams)
    comm = 0.0
    for _ in range(unitaries):
        un = tensor_power(haar_unitary(d, rng), n)
        comm = max(comm, max(err(p @ un - un @ p) for p in projs.values()))
    return ProjectorAlgebraReport(d, n, idem, herm, ortho, comp, float(tr), comm)


@dataclass
class SchurWeylMeasureReport:
    """Per-diagram comparison of ``tr(Pi_lam rho^{⊗n})`` with ``dim P_lam s_lam(rho)``."""

    n: int
    explicit: dict = field(default_factory=dict)
    predicted: dict = field(default_factory=dict)

    @property
    def max_abs_error(self) -> float:
        return max(abs(self.explicit[k] - self.predicted[k]) for k in self.explicit)

    def holds(self, tol: float = 1e-10) -> bool:
        return self.max_abs_error <= tol


def verify_schur_weyl_measure(rho, n: int) -> SchurWeylMeasureReport:
    rho = validate_density(rho)
    d = rho.shape[0]
    _check_size(d, n)
    big = tensor_power(rho, n)
    eigs = np.clip(spectrum(rho), 0.0, None)
    report = SchurWeylMeasureReport(n)
    for lam in enumerate_partitions(n, n):
        # tr(A B) = sum(A * B^T)
        report.explicit[lam] = float(np.real(np.sum(_projector(lam, d) * big.T)))
        report.predicted[lam] = dim_sn_irrep(lam) * float(schur_eval(lam, eigs))
    return report
