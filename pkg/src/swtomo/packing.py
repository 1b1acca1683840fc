"""Packing nets of states, Holevo information and the Fano copy-count bound.

Distances are always Schatten 1-norms ``||rho - sigma||_1`` (twice the trace distance)
or infidelities ``1 - F``; nothing in this module halves a norm.
"""

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .states import (
    fidelity_batch,
    haar_unitary,
    haar_isometry,
    trace_norm,
    validate_density,
    von_neumann_entropy,
)

KINDS = ("I", "II", "III", "OMEGA")


def binary_entropy(p: float) -> float:
    """Binary entropy in nats."""
    return -sum(q * math.log(q) for q in (p, 1.0 - p) if q > 0)


@dataclass(frozen=True)
class NetFamily:
    kind: str
    d: int
    r: int
    t: float
    #: separation parameter, required for kind III only
    epsilon: float = None

    def __post_init__(self):
        k, d, r, t = self.kind, self.d, self.r, self.t
        if k not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {k!r}")
        if r < 1 or d < 2 or not 0.0 <= t <= 1.0:
            raise ValueError(f"invalid parameters d={d}, r={r}, t={t}")
        if k == "I" and not 3 * r < d:
            raise ValueError(f"kind I needs 3r < d, got d={d}, r={r}")
        if k == "II" and (d % 2 or 2 * r != d):
            raise ValueError(f"kind II needs even d and r = d/2, got d={d}, r={r}")
        if k == "III":
            if t != 1.0:
                raise ValueError("kind III uses t = 1")
            if self.epsilon is None or not 0.0 < self.epsilon < 1.0:
                raise ValueError("kind III needs epsilon in (0, 1)")
            if not r < d * (1.0 - self.epsilon) / 6.0:
                raise ValueError(f"kind III needs r < d(1-epsilon)/6, got d={d}, r={r}, epsilon={self.epsilon}")
        if k == "OMEGA" and not r + 1 < d:
            raise ValueError(f"OMEGA needs r + 1 < d, got d={d}, r={r}")

    @property
    def unitary_dim(self) -> int:
        return {"I": self.d - self.r, "OMEGA": self.d - 1}.get(self.kind, self.d)

    def sample_unitaries(self, rng, size: int) -> np.ndarray:
        return haar_unitary(self.unitary_dim, rng, size=size)


def _embed(u, d):
    k = u.shape[-1]
    out = np.zeros(u.shape[:-2] + (d, d), dtype=complex)
    idx = np.arange(d - k)
    out[..., idx, idx] = 1.0
    out[..., d - k:, d - k:] = u
    return out


def base_state(family: NetFamily) -> np.ndarray:
    """The ``U = I`` member of the family."""
    d, r, t = family.d, family.r, family.t
    rho = np.zeros((d, d), dtype=complex)
    eye = np.eye(r)
    if family.kind == "I":
        rho[:r, :r] = (1 - t * t) * eye / r
        rho[:r, r:2 * r] = rho[r:2 * r, :r] = t * math.sqrt(1 - t * t) * eye / r
        rho[r:2 * r, r:2 * r] = t * t * eye / r
    elif family.kind == "OMEGA":
        rho[0, 0] = 1 - t
        rho[1:r + 1, 1:r + 1] = t * eye / r
    else:
        diag = np.r_[np.full(r, (1 + t) / (2 * r)), np.full(d - r, (1 - t) / (2 * (d - r)))]
        rho = np.diag(diag).astype(complex)
    return rho


def make_state(family: NetFamily, u) -> np.ndarray:
    """Family member for the unitary ``u`` (of size :attr:`NetFamily.unitary_dim`)."""
    u = np.asarray(u, dtype=complex)
    if u.shape[-2:] != (family.unitary_dim,) * 2:
        raise ValueError(f"kind {family.kind} needs a {family.unitary_dim}x{family.unitary_dim} unitary")
    full = _embed(u, family.d) if family.kind in ("I", "OMEGA") else u
    out = full @ base_state(family) @ np.swapaxes(full, -1, -2).conj()
    return 0.5 * (out + np.swapaxes(out, -1, -2).conj())


def analytic_distance_lower_bound(family: NetFamily, u) -> float:
    """Lower bound on ``||rho_U - rho_I||_1`` through the off-diagonal block ``C`` of ``u``."""
    u = np.asarray(u, dtype=complex)
    d, r, t = family.d, family.r, family.t
    c = u[..., r:, :r]
    tr_cc = np.sum(np.abs(c) ** 2, axis=(-2, -1))
    if family.kind == "I":
        return t * math.sqrt(1 - t * t) / r * tr_cc
    if family.kind in ("II", "III"):
        return ((1 + t) / r - (1 - t) / (d - r)) * tr_cc
    raise ValueError("no analytic distance bound for OMEGA")


def distances(state, others, metric: str) -> np.ndarray:
    others = np.asarray(others)
    if metric == "trace":
        return trace_norm(others - state)
    if metric == "infidelity":
        return 1.0 - fidelity_batch(state, others)
    raise ValueError(f"metric must be 'trace' or 'infidelity', got {metric!r}")


@dataclass
class PackingNet:
    family: NetFamily
    threshold: float
    metric: str
    states: list = field(default_factory=list)
    unitaries: list = field(default_factory=list)
    draws: int = 0
    seed: object = None

    def __len__(self):
        return len(self.states)

    def min_separation(self) -> float:
        """Smallest pairwise distance, recomputed from scratch (``inf`` below two states)."""
        best = math.inf
        for i in range(1, len(self.states)):
            best = min(best, float(np.min(distances(self.states[i], self.states[:i], self.metric))))
        return best

    def verify(self) -> bool:
        return self.min_separation() > self.threshold

    def to_json(self) -> str:
        payload = {
            "family": asdict(self.family),
            "threshold": self.threshold,
            "metric": self.metric,
            "draws": self.draws,
            "seed": self.seed,
            "states": [np.stack([s.real, s.imag], axis=-1).tolist() for s in self.states],
        }
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PackingNet":
        obj = json.loads(text)
        states = [np.asarray(s)[..., 0] + 1j * np.asarray(s)[..., 1] for s in obj["states"]]
        return cls(NetFamily(**obj["family"]), obj["threshold"], obj["metric"], states, [],
                   obj["draws"], obj["seed"])


def _absorb(net, us, max_size):
    cands = make_state(net.family, us)
    for u, cand in zip(us, cands):
        if max_size is not None and len(net) >= max_size:
            return
        net.draws += 1
        if not net.states or np.all(distances(cand, np.stack(net.states), net.metric) > net.threshold):
            net.states.append(cand)
            net.unitaries.append(u)


def greedy_pack(family: NetFamily, threshold: float, metric: str, max_draws: int, rng,
                max_size: int = None, batch: int = 256) -> PackingNet:
    """Keep each Haar draw whose distance to every kept state exceeds ``threshold``.

    The first draw is always kept. Candidates are generated in batches but accepted
    strictly in draw order, so the net depends only on the rng stream. ``max_size``
    stops early once the net is that large.
    """
    net = PackingNet(family, float(threshold), metric)
    while net.draws < max_draws and (max_size is None or len(net) < max_size):
        _absorb(net, family.sample_unitaries(rng, min(batch, max_draws - net.draws)), max_size)
    return net


def greedy_pack_from(family: NetFamily, threshold: float, metric: str, unitaries,
                     max_size: int = None) -> PackingNet:
    """Same rule as :func:`greedy_pack` over a given sequence of candidate unitaries."""
    net = PackingNet(family, float(threshold), metric)
    _absorb(net, np.asarray(unitaries), max_size)
    return net


# --- Holevo information ------------------------------------------------------------------


@dataclass
class Ensemble:
    probs: np.ndarray
    states: list

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.ndim != 1 or len(self.probs) != len(self.states) or not len(self.states):
            raise ValueError("need one probability per state")
        if np.any(self.probs < 0) or abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities must be non-negative and sum to 1 (sum {self.probs.sum()!r})")
        self.states = [validate_density(s) for s in self.states]

    @classmethod
    def uniform(cls, states) -> "Ensemble":
        return cls(np.full(len(states), 1.0 / len(states)), list(states))

    def average(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.probs, np.stack(self.states))


def holevo_chi(ensemble: Ensemble) -> float:
    """``S(sum p rho) - sum p S(rho)`` in nats."""
    inner = sum(p * von_neumann_entropy(s) for p, s in zip(ensemble.probs, ensemble.states))
    return max(0.0, von_neumann_entropy(ensemble.average()) - inner)


def _relative_entropy(rho, sigma_log):
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    nz = w > 1e-300
    self_term = float(np.sum(w[nz] * np.log(w[nz])))
    return self_term - float(np.real(np.trace(rho @ sigma_log)))


def _matrix_log(sigma):
    w, v = np.linalg.eigh(sigma)
    if w[0] <= 0:
        raise ValueError("ensemble average is singular; relative entropies are infinite")
    return (v * np.log(w)) @ v.conj().T


def holevo_chi_with_stderr(states):
    """Holevo information of the uniform ensemble with a Monte Carlo standard error.

    Uses ``chi = mean_j D(rho_j || rho_bar)``; the error bar is that of the mean of the
    per-state relative entropies.
    """
    ens = Ensemble.uniform(states)
    log_avg = _matrix_log(ens.average())
    terms = np.array([_relative_entropy(s, log_avg) for s in ens.states])
    return float(terms.mean()), float(terms.std(ddof=1) / math.sqrt(len(terms)))


def tau_entropy(d: int, r: int, t: float) -> float:
    return binary_entropy((1 + t) / 2) + (1 + t) / 2 * math.log(r) + (1 - t) / 2 * math.log(d - r)


def kind_i_average_entropy(d: int, r: int, t: float) -> float:
    """Entropy of the Haar average of kind I states (diagonal by invariance)."""
    tt = t * t
    return binary_entropy(tt) + (1 - tt) * math.log(r) + (tt * math.log(d - r) if tt else 0.0)


def chi0_analytic(family: NetFamily, relaxed: bool = False) -> float:
    """Per-copy Holevo upper bound for the Haar-averaged family, in nats.

    For kind I, ``relaxed=True`` gives the weaker ``t^2 ln(e d / (t^2 r))``.
    """
    d, r, t = family.d, family.r, family.t
    if family.kind == "I":
        if t == 0:
            return 0.0
        if relaxed:
            return t * t * math.log(math.e * d / (t * t * r))
        return binary_entropy(t * t) + t * t * math.log((d - r) / r)
    if family.kind in ("II", "III"):
        return 0.5 * math.log(d * d / (r * (d - r))) + t / 2 * math.log((d - r) / r) - binary_entropy((1 + t) / 2)
    raise ValueError("no closed-form per-copy bound is available for OMEGA")


def sample_lower_bound(n_states=None, eta: float = 0.5, chi0: float = None, log_n_states: float = None) -> float:
    """Fano bound ``((1 - eta) ln N - ln 2) / chi0`` on the number of copies.

    A non-positive value means the bound is vacuous. Pass ``log_n_states`` when ``N`` is
    too large for a float.
    """
    if chi0 is None or chi0 <= 0:
        raise ValueError("chi0 must be positive")
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if log_n_states is None:
        if n_states is None or n_states < 2:
            raise ValueError("need at least two states")
        log_n_states = math.log(n_states)
    return ((1 - eta) * log_n_states - math.log(2)) / chi0


def omega_chi_bound(t: float, r: int, n: int) -> float:
    """``4 (n t^2 / r) ln(2/t)``; only established for ``0 < t < 1/3``."""
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    if not 0.0 < t < 1.0 / 3.0:
        warnings.warn(f"t={t} lies outside (0, 1/3), where this bound is not established", stacklevel=2)
    if t == 0:
        return 0.0
    return 4.0 * (n * t * t / r) * math.log(2.0 / t)


def random_rank1_povm(d: int, k: int, rng) -> np.ndarray:
    """``k - 1`` scaled rank-one Haar elements completed by ``I - sum``.

    The scale is ``1 / (1.05 ||S||)`` with ``S`` the sum of the projectors, so the last
    element is positive definite.
    """
    if k < 2:
        raise ValueError("need at least two outcomes")
    vecs = haar_isometry(d, 1, rng, size=k - 1)[..., 0]
    elems = np.einsum("ki,kj->kij", vecs, vecs.conj())
    s = elems.sum(axis=0)
    elems = elems / (1.05 * np.linalg.eigvalsh(s)[-1])
    last = np.eye(d) - elems.sum(axis=0)
    if np.linalg.eigvalsh(last)[0] < -1e-12:
        raise ArithmeticError("POVM completion is not positive")
    return np.concatenate([elems, last[None]], axis=0)


@dataclass(frozen=True)
class ClassicalChiReport:
    d: int
    t: float
    chi: float
    stderr: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.chi <= self.bound + 3 * self.stderr


def indep_chi_per_copy_mc(d: int, t: float, povm_size: int, ensemble_size: int, rng) -> ClassicalChiReport:
    """Mutual information between a Haar-random kind II state and one POVM outcome.

    Computed as the mean KL divergence of each outcome distribution from their average,
    and compared with ``t^2 / (d + 1)``.
    """
    family = NetFamily("II", d, d // 2, t)
    povm = random_rank1_povm(d, povm_size, rng)
    states = make_state(family, family.sample_unitaries(rng, ensemble_size))
    probs = np.clip(np.real(np.einsum("aij,sji->sa", povm, states)), 0.0, None)
    probs /= probs.sum(axis=1, keepdims=True)
    mean = probs.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl = np.sum(np.where(probs > 0, probs * np.log(probs / mean), 0.0), axis=1)
    se = float(kl.std(ddof=1) / math.sqrt(ensemble_size))
    return ClassicalChiReport(d, t, float(kl.mean()), se, t * t / (d + 1))
