"""Density matrices, distance measures and random sampling of states and unitaries.

States are plain ``numpy`` arrays of shape ``(d, d)``; the helpers here validate
them on entry rather than wrapping them in a class.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
#: eigenvalues below ``RANK_TOL * max(eigenvalue)`` are treated as zero
RANK_TOL = 1e-9
SQRT_FLOOR = 16 * np.finfo(float).eps


def validate_density(rho, atol: float = 1e-10) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a density matrix.

    Raises
    ------
    ValueError
        If ``rho`` is not square, not Hermitian, not positive semidefinite or not
        of unit trace. The message carries the size of the violation.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise ValueError(f"density matrix must be a non-empty square matrix, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > atol:
        raise ValueError(f"matrix is not Hermitian (max deviation {herm:.3e})")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals[0] < -atol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {evals[0]:.3e})")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > atol:
        raise ValueError(f"trace must be 1 (deviation {abs(tr - 1.0):.3e})")
    return rho


def _same_dim(rho, sigma):
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")


def hermitian_part(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def psd_sqrt(a) -> np.ndarray:
    """Square root of a Hermitian PSD matrix (or stack).

    Eigenvalues below ``16 eps`` times the largest are not resolved by ``eigh`` and are
    set to zero; their square roots would otherwise inject ``~1e-8`` noise.
    """
    w, v = np.linalg.eigh(hermitian_part(a))
    floor = SQRT_FLOOR * np.max(np.abs(w), axis=-1, keepdims=True)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)[..., None, :]) @ np.swapaxes(v, -1, -2).conj()


def fidelity(rho, sigma) -> float:
    """Fidelity ``tr sqrt(sqrt(rho) sigma sqrt(rho))`` (not squared).

    Computed as the nuclear norm of ``sqrt(rho) sqrt(sigma)``, which stays accurate for
    rank-deficient inputs.
    """
    rho = validate_density(rho)
    sigma = validate_density(sigma)
    _same_dim(rho, sigma)
    sv = np.linalg.svd(psd_sqrt(rho) @ psd_sqrt(sigma), compute_uv=False)
    return float(min(1.0, np.sum(sv)))


def fidelity_batch(rho, sigmas) -> np.ndarray:
    """Fidelity of ``rho`` with each matrix in a stack ``sigmas`` (no validation of the stack)."""
    s = psd_sqrt(validate_density(rho))
    sv = np.linalg.svd(s @ psd_sqrt(np.asarray(sigmas)), compute_uv=False)
    return np.minimum(1.0, np.sum(sv, axis=-1))


def trace_norm(a) -> float:
    """Schatten 1-norm of a Hermitian matrix (or stack of them)."""
    w = np.linalg.eigvalsh(hermitian_part(a))
    return np.sum(np.abs(w), axis=-1)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho = validate_density(rho)
    sigma = validate_density(sigma)
    _same_dim(rho, sigma)
    return float(0.5 * trace_norm(rho - sigma))


@dataclass(frozen=True)
class FuchsVanDeGraafReport:
    lower: float  # 1 - F
    trace_distance: float
    upper: float  # sqrt(1 - F^2)
    violation: float
    holds: bool


def check_fuchs_van_de_graaf(rho, sigma, slack: float = 1e-9) -> FuchsVanDeGraafReport:
    """Check ``1 - F <= T <= sqrt(1 - F**2)`` for a pair of states."""
    f = fidelity(rho, sigma)
    t = trace_distance(rho, sigma)
    lower = 1.0 - f
    upper = float(np.sqrt(max(0.0, 1.0 - f * f)))
    violation = max(0.0, lower - t, t - upper)
    return FuchsVanDeGraafReport(lower, t, upper, violation, violation <= slack)


def ginibre(shape, rng) -> np.ndarray:
    """Complex Gaussian matrix with independent entries of unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_isometry(d: int, k: int, rng, size=None) -> np.ndarray:
    """First ``k`` columns of a Haar random unitary of dimension ``d``.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into ``Q``;
    without that correction the law of ``Q`` is not invariant.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not 1 <= k <= d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={d}")
    shape = (d, k) if size is None else (size, d, k)
    q, r = np.linalg.qr(ginibre(shape, rng))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return q * phase[..., None, :]


def haar_unitary(d: int, rng, size=None) -> np.ndarray:
    """Haar distributed unitary of dimension ``d`` (or a stack of ``size`` of them)."""
    return haar_isometry(d, d, rng, size)


def is_unitary(u, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= atol)


def random_state(d: int, r: int, rng) -> np.ndarray:
    """Random rank-``r`` state from the induced measure ``G G^dag / tr``.

    ``G`` is a ``d x r`` Ginibre matrix, so the law is unitarily invariant and the rank
    is ``r`` with probability one.
    """
    if d < 1 or not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= d, got r={r}, d={d}")
    g = ginibre((d, r), rng)
    rho = g @ g.conj().T
    rho = hermitian_part(rho / np.real(np.trace(rho)))
    return rho


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def spectrum(rho) -> np.ndarray:
    """Eigenvalues in non-increasing order."""
    return np.linalg.eigvalsh(hermitian_part(rho))[::-1]


def rank(rho, tol: float = RANK_TOL) -> int:
    w = spectrum(rho)
    return int(np.count_nonzero(w > tol * max(w[0], 0.0)))


def von_neumann_entropy(rho) -> float:
    """Entropy in nats, with ``0 ln 0 = 0``."""
    w = np.linalg.eigvalsh(hermitian_part(rho))
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log(w)))
