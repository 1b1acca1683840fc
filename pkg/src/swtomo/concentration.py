"""Concentration of overlaps between Haar-rotated projectors.

``Z_{n,m}`` is ``(n/m)`` times the share of the first ``2m`` out of ``2n`` squared
variance-1/2 Gaussians. Its law is ``(n/m) Beta(m, n - m)``. The overlap
``(d/pq) tr(Q U P U^dag)`` of Haar-rotated rank-``p`` and rank-``q`` projectors has
Chernoff-type tails governed by ``f(z) = z - ln(1 + z)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from ._io import write_csv
from .states import haar_isometry, random_state


@dataclass(frozen=True)
class ZParams:
    n: int
    m: int

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got n={self.n}, m={self.m}")


def sample_z(params: ZParams, rng, size: int = None, chunk: int = 20000):
    """Draws of ``Z_{n,m}`` built literally from ``2n`` Gaussians of variance 1/2."""
    n, m = params.n, params.m
    count = 1 if size is None else size
    out = np.empty(count)
    for start in range(0, count, chunk):
        k = min(chunk, count - start)
        sq = rng.normal(0.0, math.sqrt(0.5), size=(k, 2 * n)) ** 2
        out[start:start + k] = (n / m) * sq[:, :2 * m].sum(axis=1) / sq.sum(axis=1)
    return out[0] if size is None else out


def _check_nondegenerate(params):
    if params.m == params.n:
        raise ValueError("Z_{n,n} is the point mass at 1 and has no density")


def z_pdf(params: ZParams, z):
    """Density of ``Z_{n,m}`` on ``[0, n/m]`` (zero outside)."""
    _check_nondegenerate(params)
    n, m = params.n, params.m
    z = np.asarray(z, dtype=float)
    u = m * z / n
    inside = (u >= 0) & (u <= 1)
    uc = np.clip(u, 0.0, 1.0)
    log_c = math.log(m / n) + math.lgamma(n) - math.lgamma(n - m) - math.lgamma(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(m == 1, 0.0, (m - 1) * np.log(uc))
        b = np.where(n - m == 1, 0.0, (n - m - 1) * np.log1p(-uc))
        val = np.exp(log_c + a + b)
    return np.where(inside, val, 0.0)


def z_cdf(params: ZParams, z):
    _check_nondegenerate(params)
    n, m = params.n, params.m
    return stats.beta(m, n - m).cdf(m * np.asarray(z, dtype=float) / n)


def z_mean() -> float:
    return 1.0


def z_second_moment(params: ZParams) -> float:
    return (1 + 1 / params.m) / (1 + 1 / params.n)


def z_moments_by_quadrature(params: ZParams):
    """``(mass, mean, second moment)`` from integrating :func:`z_pdf`."""
    top = params.n / params.m
    out = []
    for k in range(3):
        val, _ = integrate.quad(lambda z: z ** k * float(z_pdf(params, z)), 0.0, top,
                                epsabs=1e-13, epsrel=1e-12, limit=200)
        out.append(val)
    return tuple(out)


def ks_distance(samples, params: ZParams) -> float:
    return float(stats.kstest(samples, lambda z: z_cdf(params, z)).statistic)


# --- f(z) and its piecewise lower bounds ------------------------------------------------


def f(z):
    z = np.asarray(z, dtype=float)
    return z - np.log1p(z)


@dataclass(frozen=True)
class FBoundReport:
    points: int
    #: smallest ``f(z) - bound(z)`` on each bound's domain
    margins: dict
    slack: float

    @property
    def holds(self) -> bool:
        return all(m >= -self.slack for m in self.margins.values())


def f_bound_check(z_grid=None, slack: float = 1e-12) -> FBoundReport:
    """Check ``f >= (1+z)/2`` on ``[5, inf)``, ``(1-ln2) z^2`` on ``(-1, 1]`` and ``z^2/2`` on ``(-1, 0]``."""
    if z_grid is None:
        z_grid = np.arange(-0.999, 50.0, 1e-3)
    z = np.asarray(z_grid, dtype=float)
    if np.any(z <= -1):
        raise ValueError("grid must lie in (-1, inf)")
    fz = f(z)
    pieces = {
        "half_one_plus_z": (z >= 5, (1 + z) / 2),
        "one_minus_ln2_z2": ((z > -1) & (z <= 1), (1 - math.log(2)) * z * z),
        "half_z2": ((z > -1) & (z <= 0), z * z / 2),
    }
    margins = {k: float(np.min(fz[mask] - b[mask])) if mask.any() else math.inf
               for k, (mask, b) in pieces.items()}
    return FBoundReport(int(z.size), margins, slack)


# --- projector overlaps --------------------------------------------------------------------


def projector_overlaps(d: int, p: int, q: int, samples: int, rng, chunk: int = 20000) -> np.ndarray:
    """Draws of ``(d/pq) tr(Q U P U^dag)`` for diagonal ``P``, ``Q``: the top-left ``q x p`` block of ``U``."""
    if not (1 <= p <= d and 1 <= q <= d):
        raise ValueError(f"need 1 <= p, q <= d, got d={d}, p={p}, q={q}")
    out = np.empty(samples)
    for start in range(0, samples, chunk):
        k = min(chunk, samples - start)
        v = haar_isometry(d, p, rng, size=k)
        out[start:start + k] = (d / (p * q)) * np.sum(np.abs(v[:, :q, :]) ** 2, axis=(1, 2))
    return out


@dataclass(frozen=True)
class TailRow:
    side: str  # "upper" or "lower"
    z: float
    empirical: float
    bound: float
    stderr: float

    @property
    def holds(self) -> bool:
        return self.empirical <= self.bound + 3 * self.stderr


def tail_rows(values, pq: int, upper=(), lower=()) -> list:
    """Empirical tails of overlap draws against ``exp(-pq f(+-z))``."""
    n = values.size
    rows = []
    for side, zs in (("upper", upper), ("lower", lower)):
        for z in zs:
            if side == "upper":
                emp = float(np.mean(values >= 1 + z))
                bound = math.exp(-pq * float(f(z)))
            else:
                if not 0 <= z < 1:
                    raise ValueError("lower-tail z must lie in [0, 1)")
                emp = float(np.mean(values <= 1 - z))
                bound = math.exp(-pq * float(f(-z)))
            b = min(bound, 1.0)
            rows.append(TailRow(side, float(z), emp, bound, math.sqrt(b * (1 - b) / n)))
    return rows


def projector_overlap_tail(d: int, p: int, q: int, z, samples: int, rng, lower=()) -> list:
    if samples < 10000:
        raise ValueError("use at least 10^4 samples")
    return tail_rows(projector_overlaps(d, p, q, samples, rng), p * q, upper=np.atleast_1d(z), lower=lower)


def write_tails_csv(path, rows) -> None:
    """Columns ``z, empirical, bound, stderr``; lower-tail rows carry ``-z``."""
    write_csv(path, ["z", "empirical", "bound", "stderr"],
              ((r.z if r.side == "upper" else -r.z, r.empirical, r.bound, r.stderr) for r in rows))


# --- Gaussian domination ---------------------------------------------------------------------


@dataclass(frozen=True)
class DominationRow:
    zeta: float
    closed_form: float
    gaussian_mc: float  # nan where the MC variance is infinite
    gaussian_se: float
    haar_mc: float
    haar_se: float

    @property
    def closed_form_matches_mc(self) -> bool:
        return math.isnan(self.gaussian_mc) or abs(self.gaussian_mc - self.closed_form) <= 3 * self.gaussian_se

    @property
    def holds(self) -> bool:
        return self.haar_mc <= self.closed_form + 3 * self.haar_se


def gaussian_domination_check(d: int, p: int, q: int, zeta_grid, samples: int, rng) -> list:
    """Compare ``E exp(zeta sum_{2pq} x^2) = (1 - zeta)^{-pq}`` with ``E_U exp(zeta d tr QUPU^dag)``.

    ``zeta`` is the normalised parameter ``xi / pq``, so the pole sits at 1. The Gaussian
    Monte Carlo check is skipped for ``zeta >= 1/2``, where its variance diverges.
    """
    pq = p * q
    overlaps = projector_overlaps(d, p, q, samples, rng) * pq  # d tr(Q U P U^dag)
    sums = (rng.normal(0.0, math.sqrt(0.5), size=(samples, 2 * pq)) ** 2).sum(axis=1)
    rows = []
    for zeta in zeta_grid:
        zeta = float(zeta)
        if zeta >= 1:
            raise ValueError(f"zeta={zeta} is at or beyond the pole at 1")
        closed = (1 - zeta) ** (-pq)
        h = np.exp(zeta * overlaps)
        if zeta < 0.5:
            g = np.exp(zeta * sums)
            g_mean, g_se = float(g.mean()), float(g.std(ddof=1) / math.sqrt(samples))
        else:
            g_mean = g_se = float("nan")
        rows.append(DominationRow(zeta, closed, g_mean, g_se, float(h.mean()), float(h.std(ddof=1) / math.sqrt(samples))))
    return rows


# --- spectrum / eigenbasis decoupling --------------------------------------------------------


@dataclass(frozen=True)
class SymmetryReport:
    d: int
    p: int
    samples: int
    mean_max_z: float  # largest |entry of E rho - I/d| in standard errors
    permuted_max_z: float  # largest |mean of randomly permuted eigenvalue - 1/p| in standard errors
    independence_pvalue: float

    def holds(self, alpha: float = 1e-3) -> bool:
        # Bonferroni over the d^2 mean entries and the p permuted components
        mean_cut = stats.norm.isf(alpha / (2 * self.d * self.d))
        perm_cut = stats.norm.isf(alpha / (2 * self.p))
        return self.mean_max_z <= mean_cut and self.permuted_max_z <= perm_cut and self.independence_pvalue > alpha


def induced_state_symmetry_check(d: int, p: int, samples: int, rng, bins: int = 4) -> SymmetryReport:
    """Statistical checks that rank-``p`` induced states split into independent spectrum and Haar basis.

    * the ensemble mean equals ``I/d``;
    * a uniformly permuted nonzero eigenvalue has mean ``1/p``;
    * the top eigenvalue's quantile bin is independent of which basis vector the top
      eigenvector overlaps most (chi-squared contingency test).
    """
    if not 1 <= p <= d:
        raise ValueError("need 1 <= p <= d")
    rhos = np.stack([random_state(d, p, rng) for _ in range(samples)])
    mean = rhos.mean(axis=0)
    se = rhos.std(axis=0, ddof=1) / math.sqrt(samples)
    target = np.eye(d) / d
    dev = np.abs(mean - target)
    with np.errstate(divide="ignore", invalid="ignore"):
        zs = np.where(se > 0, dev / np.where(se > 0, se, 1.0), np.where(dev > 1e-12, np.inf, 0.0))
    mean_z = float(np.max(zs))

    w, v = np.linalg.eigh(rhos)
    top = w[:, -p:]
    perm = rng.permuted(top, axis=1)
    pz = np.abs(perm.mean(axis=0) - 1.0 / p) / (perm.std(axis=0, ddof=1) / math.sqrt(samples))
    permuted_z = float(np.max(pz)) if p > 1 else 0.0

    lead = w[:, -1]
    edges = np.quantile(lead, np.linspace(0, 1, bins + 1)[1:-1])
    lead_bin = np.searchsorted(edges, lead)
    align = np.argmax(np.abs(v[:, :, -1]) ** 2, axis=1)
    table = np.zeros((bins, d))
    np.add.at(table, (lead_bin, align), 1)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    pval = float(stats.chi2_contingency(table)[1]) if min(table.shape) > 1 else 1.0
    return SymmetryReport(d, p, samples, mean_z, permuted_z, pval)
