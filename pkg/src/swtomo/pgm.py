"""Pretty-good-measurement variant over spectra drawn uniformly from the simplex.

The density for outcome ``sigma`` needs ``E s_lam`` with the spectrum uniform on the
simplex. Only a lower bound is available in closed form,
``E s_lam >= lam_1! ... lam_d! (d-1)! / (n+d-1)!``. This module therefore keeps
three quantities apart:

* the analytic lower bound,
* an exact value for ``n <= 12``, from Kostka numbers and Dirichlet moments,
* a Monte Carlo estimate.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .partitions import (
    KOSTKA_MAX_N,
    LogBoundReport,
    UnsupportedSizeError,
    as_partition,
    dim_gl_irrep,
    dim_sn_irrep,
    entropy,
    enumerate_partitions,
    kostka,
    padded,
    weight_vectors,
)
from .schur import LogScalar, log_schur_many, schur_eval_product
from .states import validate_density


def log_expected_schur_bound(lam, d: int) -> float:
    """ln of ``lam_1! ... lam_d! (d-1)! / (n+d-1)!``."""
    lam = padded(lam, d)
    n = sum(lam)
    return sum(math.lgamma(p + 1) for p in lam) + math.lgamma(d) - math.lgamma(n + d)


@lru_cache(maxsize=None)
def exact_expected_schur(lam, d: int) -> Fraction:
    """``E s_lam`` exactly, as ``sum_nu K_{lam nu} E x^nu`` with Dirichlet(1, ..., 1) moments."""
    lam = as_partition(lam)
    n = sum(lam)
    if len(lam) > d:
        return Fraction(0)
    if n > KOSTKA_MAX_N:
        raise UnsupportedSizeError(f"exact expectation is limited to n <= {KOSTKA_MAX_N}")
    total = sum(kostka(lam, nu) * math.prod(math.factorial(v) for v in nu) for nu in weight_vectors(n, d))
    return Fraction(total * math.factorial(d - 1), math.factorial(n + d - 1))


def uniform_spectra(d: int, size: int, rng) -> np.ndarray:
    """Uniform points on the probability simplex, as normalised exponentials."""
    e = rng.standard_exponential((size, d))
    return e / e.sum(axis=1, keepdims=True)


def mc_expected_schur(lam, d: int, samples: int, rng, chunk: int = 20000):
    """Monte Carlo ``(mean, standard error)`` of ``s_lam`` over uniform spectra."""
    total = total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        vals = np.exp(log_schur_many(lam, uniform_spectra(d, m, rng)))
        total += vals.sum()
        total_sq += (vals * vals).sum()
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return mean, math.sqrt(var / samples)


@dataclass(frozen=True)
class ExpectedSchur:
    lam: tuple
    d: int
    bound: LogScalar
    exact: object = None  # Fraction, or None above the Kostka cap
    mc_mean: float = None
    mc_stderr: float = None


def expected_schur_uniform(lam, d: int, mc_samples: int = 0, rng=None) -> ExpectedSchur:
    """Analytic lower bound on ``E s_lam``, plus the exact value and an MC estimate when available."""
    lam = as_partition(lam)
    if len(lam) > d:
        raise ValueError(f"{lam} has more than {d} rows")
    bound = LogScalar.from_log(log_expected_schur_bound(lam, d))
    exact = exact_expected_schur(lam, d) if sum(lam) <= KOSTKA_MAX_N else None
    mean = se = None
    if mc_samples:
        if rng is None:
            raise ValueError("an rng is required for the Monte Carlo estimate")
        mean, se = mc_expected_schur(lam, d, mc_samples, rng)
    return ExpectedSchur(lam, d, bound, exact, mean, se)


def check_pgm_bound(lam, d: int, slack: float = 1e-12) -> LogBoundReport:
    """``(n+d)^{-d} <= e^{nH} E s_lam``, with the analytic lower bound standing in for ``E s_lam``."""
    lam = as_partition(lam)
    n = sum(lam)
    rhs = n * entropy(lam) + log_expected_schur_bound(lam, d)
    return LogBoundReport(-d * math.log(n + d), rhs, slack)


@dataclass(frozen=True)
class PgmDensity:
    value: LogScalar
    #: "bound": analytic denominators, so ``value`` is an upper bound on the density;
    #: "exact" or "mc": the density itself (MC up to sampling error)
    mode: str
    terms: dict


def pgm_density(rho, sigma, n: int, mode: str = "bound", mc_samples: int = 100000, rng=None) -> PgmDensity:
    """``sum_lam dim Q dim P s_lam(sigma rho) / E s_lam`` with respect to the uniform-spectrum prior."""
    rho = validate_density(rho)
    d = rho.shape[0]
    if mode not in ("bound", "exact", "mc"):
        raise ValueError(f"unknown mode {mode!r}")
    total = LogScalar.zero()
    terms = {}
    for lam in enumerate_partitions(n, d):
        s = schur_eval_product(lam, sigma, rho)
        if s.is_zero:
            continue
        if mode == "bound":
            denom = LogScalar.from_log(log_expected_schur_bound(lam, d))
        elif mode == "exact":
            denom = LogScalar.from_value(exact_expected_schur(lam, d))
        else:
            denom = LogScalar.from_value(mc_expected_schur(lam, d, mc_samples, rng)[0])
        term = s * dim_gl_irrep(lam, d) * dim_sn_irrep(lam) / denom
        terms[lam] = term
        total = total + term
    return PgmDensity(total, mode, terms)


@dataclass(frozen=True)
class BetaIntegralReport:
    a: float
    b: float
    quadrature: float
    closed_form: float
    abs_error_estimate: float

    @property
    def rel_error(self) -> float:
        return abs(self.quadrature - self.closed_form) / self.closed_form


def beta_integral_check(a: float, b: float) -> BetaIntegralReport:
    """Quadrature of ``int_0^1 u^{a-1} (1-u)^{b-1} du`` against ``Gamma(a)Gamma(b)/Gamma(a+b)``.

    Each half of ``[0, 1]`` is mapped by ``u = v^{1/a}`` (``1 - u = v^{1/b}`` on the right),
    which removes the endpoint singularity for parameters below 1: the integrand becomes
    ``(1/a) (1 - v^{1/a})^{b-1}``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    left, e1 = integrate.quad(lambda v: (1.0 - v ** (1.0 / a)) ** (b - 1) / a, 0.0, 0.5 ** a,
                              epsabs=0.0, epsrel=1e-11, limit=200)
    right, e2 = integrate.quad(lambda v: (1.0 - v ** (1.0 / b)) ** (a - 1) / b, 0.0, 0.5 ** b,
                               epsabs=0.0, epsrel=1e-11, limit=200)
    return BetaIntegralReport(a, b, left + right, float(special.beta(a, b)), e1 + e2)
