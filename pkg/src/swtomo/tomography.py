"""Simulation of the covariant Schur-Weyl tomography measurement.

An outcome is a pair ``(lam, U)``; the estimate is ``U diag(lam/n) U^dag``. The
diagram is drawn from ``Pr[lam] = dim P_lam s_lam(rho)``. Given ``lam``, ``U`` has
density ``dim Q_lam s_lam(rho U lam_bar U^dag) / (s_lam(lam_bar) s_lam(rho))`` with
respect to Haar measure.

For qubits that density depends on ``U`` only through the Bloch angle ``theta``
between the top eigenvectors of ``rho`` and of the estimate, and it is sampled exactly
by inverse CDF on a grid. For ``d >= 3`` a Metropolis chain on ``U(d)`` is used.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from ._io import write_csv
from .partitions import (
    as_partition,
    dim_gl_irrep,
    dim_sn_irrep,
    enumerate_partitions,
    padded,
)
from .schur import (
    LogScalar,
    log_schur_many,
    log_schur_two,
    product_eigenvalues,
    schur_at_integers,
    schur_eval,
)
from .states import fidelity, fidelity_batch, haar_unitary, hermitian_part, rank, validate_density

logger = logging.getLogger(__name__)

MAX_D = 4
MAX_N = 200
WEIGHT_RAISE_TOL = 1e-6
WEIGHT_WARN_TOL = 1e-9


@dataclass(frozen=True)
class SamplerConfig:
    grid_size: int = 4096
    burn_in: int = 1000
    thinning: int = 10
    step_size: float = 0.3
    global_prob: float = 0.1
    target_acceptance: tuple = (0.2, 0.5)
    #: below this post-burn-in acceptance rate the outcome carries a warning flag
    min_acceptance: float = 0.05


@dataclass
class TomographyOutcome:
    lam: tuple
    u: np.ndarray
    estimate: np.ndarray
    metadata: dict = field(default_factory=dict)


@dataclass
class OutcomePdfCurve:
    """Conditional density of the Bloch angle for one diagram.

    ``density`` is relative to the Haar measure, whose angular marginal is
    ``sin(theta) / 2 dtheta``; ``weight`` is ``Pr[lam]``.
    """

    lam: tuple
    angles: np.ndarray
    density: np.ndarray
    weight: float

    def normalization(self) -> float:
        return float(simpson(self.density * np.sin(self.angles) / 2.0, x=self.angles))


# --- diagram marginal ----------------------------------------------------------------


def _log_lam_bar(lam) -> float:
    """``ln s_lam(lam / n)`` exactly."""
    n = sum(lam)
    return math.log(schur_at_integers(lam, lam)) - n * math.log(n)


def schur_weyl_weights(eigs, n: int):
    """Diagrams of ``n`` with at most ``d`` rows and their probabilities ``dim P s_lam(eigs)``.

    Raises
    ------
    ValueError
        If the weights miss 1 by more than ``1e-6``, which would mean a Schur evaluation bug.
    """
    eigs = np.sort(np.clip(np.asarray(eigs, dtype=float), 0.0, None))[::-1]
    d = eigs.size
    if d > MAX_D or n > MAX_N or n < 1:
        raise ValueError(f"supported range is d <= {MAX_D}, 1 <= n <= {MAX_N}; got d={d}, n={n}")
    lams = enumerate_partitions(n, d)
    log_dims = np.array([math.log(dim_sn_irrep(lam)) for lam in lams])
    if d == 1:
        log_s = np.array([n * math.log(eigs[0])])
    elif d == 2:
        a = np.array([lam[0] for lam in lams])
        b = np.array([lam[1] if len(lam) > 1 else 0 for lam in lams])
        log_s = log_schur_two(a, b, eigs[0], eigs[1])
    else:
        log_s = np.array([schur_eval(lam, eigs).log() for lam in lams])
    weights = np.exp(log_dims + log_s)
    total = weights.sum()
    if abs(total - 1.0) > WEIGHT_RAISE_TOL:
        raise ValueError(f"Schur-Weyl weights sum to {total!r}")
    if abs(total - 1.0) > WEIGHT_WARN_TOL:
        logger.warning("Schur-Weyl weights sum to %r; renormalising", total)
    return lams, weights / total


def schur_weyl_sample(rho, n: int, rng, size=None):
    """Draw ``lam`` with probability ``dim P_lam s_lam(rho)``; a list if ``size`` is given."""
    rho = validate_density(rho)
    lams, w = schur_weyl_weights(np.linalg.eigvalsh(hermitian_part(rho)), n)
    idx = rng.choice(len(lams), size=size, p=w)
    return lams[idx] if size is None else [lams[i] for i in idx]


# --- density of an outcome -------------------------------------------------------------


def estimate_from(lam, u) -> np.ndarray:
    lam = as_partition(lam)
    u = np.asarray(u)
    n = sum(lam)
    bar = np.array(padded(lam, u.shape[0]), dtype=float) / n
    return hermitian_part((u * bar) @ u.conj().T)


def povm_density(rho, lam, u) -> LogScalar:
    """``tr(M(lam, U) rho^{⊗n})``, a density for counting measure on ``lam`` times Haar ``dU``."""
    rho = validate_density(rho)
    lam = as_partition(lam)
    d = rho.shape[0]
    if len(lam) > d:
        return LogScalar.zero()
    sigma = estimate_from(lam, u)
    s = schur_eval(lam, product_eigenvalues(rho, sigma))
    if s.is_zero:
        return s
    prefactor = math.log(dim_gl_irrep(lam, d)) + math.log(dim_sn_irrep(lam)) - _log_lam_bar(lam)
    return s * LogScalar.from_log(prefactor)


@dataclass(frozen=True)
class DensityBoundReport:
    log_density: float
    log_bound: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.log_density == -math.inf or self.log_density <= self.log_bound + self.slack


def check_density_bound(rho, lam, u, slack: float = 1e-9) -> DensityBoundReport:
    """``tr(M(lam, U) rho^{⊗n}) <= (n+1)^{2dr} F^{2n}`` in log form."""
    rho = validate_density(rho)
    lam = as_partition(lam)
    d = rho.shape[0]
    n = sum(lam)
    f = fidelity(rho, estimate_from(lam, u))
    log_bound = 2 * d * rank(rho) * math.log(n + 1) + (2 * n * math.log(f) if f > 0 else -math.inf)
    return DensityBoundReport(povm_density(rho, lam, u).log(), log_bound, slack)


# --- qubit exact path --------------------------------------------------------------------


def _qubit_log_density(p, lam, theta):
    n = sum(lam)
    lam = padded(lam, 2)
    l1, l2 = lam[0] / n, lam[1] / n
    tr = 0.5 * (1.0 + (2 * p - 1) * (l1 - l2) * np.cos(theta))
    det = p * (1 - p) * l1 * l2
    a = 0.5 * (tr + np.sqrt(np.clip(tr * tr - 4 * det, 0.0, None)))
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(a > 0, det / a, 0.0)
    log_num = log_schur_two(lam[0], lam[1], a, b)
    log_norm = math.log(dim_gl_irrep(lam, 2)) - _log_lam_bar(lam) - float(log_schur_two(lam[0], lam[1], p, 1 - p))
    return log_num + log_norm


def qubit_outcome_pdf(p: float, n: int, lam, grid_size: int = 4096) -> OutcomePdfCurve:
    """Angular density for ``rho = diag(p, 1-p)`` and diagram ``lam = (n-k, k)``."""
    lam = as_partition(lam)
    if sum(lam) != n or len(lam) > 2:
        raise ValueError(f"{lam} is not a two-row diagram of {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    p = max(p, 1.0 - p)
    angles = np.linspace(0.0, math.pi, grid_size)
    log_w = math.log(dim_sn_irrep(lam)) + float(log_schur_two(lam[0], lam[1] if len(lam) > 1 else 0, p, 1 - p))
    if log_w == -math.inf:
        return OutcomePdfCurve(lam, angles, np.zeros(grid_size), 0.0)
    return OutcomePdfCurve(lam, angles, np.exp(_qubit_log_density(p, lam, angles)), math.exp(log_w))


def qubit_outcome_pdfs(p: float, n: int, grid_size: int = 4096) -> list:
    return [qubit_outcome_pdf(p, n, lam, grid_size) for lam in enumerate_partitions(n, 2)]


def hdr_width(curves, mass: float = 0.9) -> float:
    """Angular extent (radians of ``theta``) of the highest-density region of the outcome law.

    The law is the ``lam``-mixture of the conditional densities, viewed on the Bloch
    angle with its Haar weight ``sin(theta)/2``; the region is the smallest super-level
    set of the density holding ``mass`` of the probability.
    """
    angles = curves[0].angles
    g = sum(c.weight * c.density for c in curves)
    step = angles[1] - angles[0]
    cell = g * np.sin(angles) / 2.0 * step
    order = np.argsort(-g, kind="stable")
    cum = np.cumsum(cell[order])
    k = int(np.searchsorted(cum, mass * cum[-1])) + 1
    return float(k * step)


def _bloch_rotation(theta, phi):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.empty(np.shape(theta) + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -np.exp(-1j * phi) * s
    out[..., 1, 0] = np.exp(1j * phi) * s
    out[..., 1, 1] = c
    return out


def _sample_qubit(rho, n, count, rng, config):
    w, v = np.linalg.eigh(hermitian_part(rho))
    w, v = w[::-1], v[:, ::-1]
    p = float(np.clip(w[0], 0.0, 1.0))
    lams, weights = schur_weyl_weights(w, n)
    picks = rng.choice(len(lams), size=count, p=weights)
    thetas = np.empty(count)
    grid = np.linspace(0.0, math.pi, config.grid_size)
    for i in np.unique(picks):
        sel = np.flatnonzero(picks == i)
        mass = np.exp(_qubit_log_density(p, lams[i], grid)) * np.sin(grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (mass[1:] + mass[:-1]))])
        thetas[sel] = np.interp(rng.random(sel.size) * cdf[-1], cdf, grid)
    phis = rng.uniform(0.0, 2 * math.pi, count)
    phases = np.exp(1j * rng.uniform(0.0, 2 * math.pi, (count, 2)))
    us = v @ _bloch_rotation(thetas, phis) * phases[:, None, :]
    return [lams[i] for i in picks], us, {"method": "qubit-inverse-cdf", "warning": False}


# --- Metropolis path ---------------------------------------------------------------------


def _log_target(rho, lam, u):
    return schur_eval(lam, product_eigenvalues(rho, estimate_from(lam, u))).log()


def _local_step(u, eps, rng):
    d = u.shape[0]
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = (g + g.conj().T) / 2.0
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * eps * w)) @ q.conj().T @ u


def _run_chain(rho, lam, count, rng, config):
    w, v = np.linalg.eigh(hermitian_part(rho))
    u = v[:, ::-1].copy()  # start at the mode, aligned with rho's eigenbasis
    cur = _log_target(rho, lam, u)
    eps = config.step_size
    lo, hi = config.target_acceptance
    window = [0, 0]
    stats = [0, 0]
    out = []
    total = config.burn_in + count * config.thinning
    for step in range(total):
        is_global = rng.random() < config.global_prob
        prop = haar_unitary(u.shape[0], rng) if is_global else _local_step(u, eps, rng)
        new = _log_target(rho, lam, prop)
        accept = new > -math.inf and math.log(rng.random()) < new - cur
        if accept:
            u, cur = prop, new
        if not is_global:
            if step < config.burn_in:
                window[0] += accept
                window[1] += 1
                if window[1] == 100:
                    rate = window[0] / window[1]
                    eps *= 0.7 if rate < lo else (1.3 if rate > hi else 1.0)
                    window = [0, 0]
            else:
                stats[0] += accept
                stats[1] += 1
        if step >= config.burn_in and (step - config.burn_in) % config.thinning == config.thinning - 1:
            q, r = np.linalg.qr(u)
            u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            out.append(u.copy())
    rate = stats[0] / stats[1] if stats[1] else float("nan")
    meta = {
        "method": "metropolis",
        "acceptance_rate": rate,
        "step_size": eps,
        "warning": not rate >= config.min_acceptance,
    }
    return out, meta


def _sample_metropolis(rho, n, count, rng, config):
    lams, weights = schur_weyl_weights(np.linalg.eigvalsh(hermitian_part(rho)), n)
    picks = rng.choice(len(lams), size=count, p=weights)
    us = np.empty((count, rho.shape[0], rho.shape[0]), dtype=complex)
    metas = [None] * count
    for i in np.unique(picks):
        sel = np.flatnonzero(picks == i)
        chain, meta = _run_chain(rho, lams[i], sel.size, rng, config)
        us[sel] = chain
        for j in sel:
            metas[j] = meta
    return [lams[i] for i in picks], us, metas


def sample_estimates(rho, n: int, count: int, rng, config: SamplerConfig = SamplerConfig()) -> list:
    """Draw ``count`` independent outcomes of the measurement on ``rho^{⊗n}``."""
    rho = validate_density(rho)
    d = rho.shape[0]
    if d > MAX_D:
        raise ValueError(f"sampling supports d <= {MAX_D}")
    if d == 1:
        one = np.ones((1, 1), dtype=complex)
        return [TomographyOutcome((n,), one, one.copy(), {"method": "trivial", "warning": False}) for _ in range(count)]
    if d == 2:
        lams, us, meta = _sample_qubit(rho, n, count, rng, config)
        metas = [meta] * count
    else:
        lams, us, metas = _sample_metropolis(rho, n, count, rng, config)
        bad = sum(1 for m in metas if m["warning"])
        if bad:
            logger.warning("%d of %d outcomes came from chains with low acceptance", bad, count)
    return [TomographyOutcome(lam, u, estimate_from(lam, u), dict(m)) for lam, u, m in zip(lams, us, metas)]


def sample_estimate(rho, n: int, rng, config: SamplerConfig = SamplerConfig()) -> TomographyOutcome:
    return sample_estimates(rho, n, 1, rng, config)[0]


# --- failure probability ------------------------------------------------------------------


def log_failure_bound(n: int, d: int, r: int, delta: float) -> float:
    """``ln min(1, (n+1)^{3dr} e^{-2n delta})``."""
    return min(0.0, 3 * d * r * math.log(n + 1) - 2 * n * delta)


@dataclass
class FailureProbabilityReport:
    n: int
    d: int
    r: int
    samples: int
    deltas: list
    empirical: list
    bounds: list
    stderr: list
    mean_infidelity: float

    @property
    def holds(self) -> list:
        return [e <= b + 3 * s for e, b, s in zip(self.empirical, self.bounds, self.stderr)]

    def rows(self):
        return list(zip(self.deltas, self.empirical, self.bounds, self.stderr, self.holds))


def failure_probability_report(rho, n: int, deltas, samples: int, rng,
                               config: SamplerConfig = SamplerConfig()) -> FailureProbabilityReport:
    """Empirical ``Pr[F(rho_hat, rho) <= 1 - delta]`` against the analytic tail bound.

    The standard error is the binomial one at the bound value, so a bound of exactly
    zero tolerates no failures at all.
    """
    rho = validate_density(rho)
    d, r = rho.shape[0], rank(rho)
    outcomes = sample_estimates(rho, n, samples, rng, config)
    fids = fidelity_batch(rho, np.stack([o.estimate for o in outcomes]))
    emp, bounds, ses = [], [], []
    for delta in deltas:
        b = math.exp(log_failure_bound(n, d, r, delta))
        emp.append(float(np.mean(fids <= 1.0 - delta)))
        bounds.append(b)
        ses.append(math.sqrt(b * (1.0 - b) / samples))
    return FailureProbabilityReport(n, d, r, samples, list(deltas), emp, bounds, ses, float(np.mean(1.0 - fids)))


# --- export -------------------------------------------------------------------------------


def write_curves_csv(path, curves) -> None:
    """Columns ``lambda_index, angle_rad, density, weight``; ``lambda_index`` follows the list order."""
    rows = ((i, a, f, c.weight) for i, c in enumerate(curves) for a, f in zip(c.angles, c.density))
    write_csv(path, ["lambda_index", "angle_rad", "density", "weight"], rows)


def curves_summary(curves) -> dict:
    return {
        "diagrams": [list(c.lam) for c in curves],
        "weights": [c.weight for c in curves],
        "normalizations": [c.normalization() if c.weight > 0 else None for c in curves],
        "weight_sum": float(sum(c.weight for c in curves)),
        "hdr90_width_rad": hdr_width(curves),
    }
