"""Schur polynomial evaluation and the character bounds built on it.

Three backends are available through :func:`schur_eval`:

``"ssyt"``
    Sum over semistandard tableaux, organised as the branching rule
    ``s_lam(x_1..x_k) = sum_mu x_k^{|lam/mu|} s_mu(x_1..x_{k-1})``. Every term is
    non-negative, so the result is accurate to a few ulps. Used for ``n <= 12``.
``"closed2"``
    Two variables: ``s_(a,b)(x, y) = (xy)^b h_{a-b}(x, y)`` with the geometric sum
    evaluated through ``expm1`` so that ``x ~ y`` loses nothing.
``"bialternant"``
    The ratio ``det[x_i^(lam_j + l - j)] / det[x_i^(l - j)]`` in exact integer
    arithmetic. Floats are dyadic rationals, so after scaling to a common denominator
    the determinant ratio is an exact integer. Coincident values use the confluent
    (derivative) rows, which are the limit of divided differences, so degenerate points
    and zero eigenvalues need no tolerance.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import groupby
from numbers import Rational

import numpy as np

from .partitions import (
    KOSTKA_MAX_N,
    as_partition,
    dim_gl_irrep,
    entropy,
    kostka,
    LogBoundReport,
    weight_vectors,
)
from .states import RANK_TOL, hermitian_part, psd_sqrt, validate_density

SSYT_MAX_N = 12
CLIP_TOL = 1e-12


@dataclass(frozen=True)
class LogScalar:
    """A real number stored as ``sign * exp(log_abs)``.

    ``sign == 0`` is the exact zero. Products and quotients are exact in the log
    domain; sums use log-sum-exp.
    """

    sign: int
    log_abs: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.sign == 0:
            object.__setattr__(self, "log_abs", -math.inf)
        elif math.isnan(self.log_abs) or self.log_abs == -math.inf:
            raise ValueError("non-zero LogScalar needs a finite or +inf log magnitude")

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0)

    @classmethod
    def one(cls) -> "LogScalar":
        return cls(1, 0.0)

    @classmethod
    def from_log(cls, log_abs: float) -> "LogScalar":
        return cls(0) if log_abs == -math.inf else cls(1, float(log_abs))

    @classmethod
    def from_value(cls, x) -> "LogScalar":
        if isinstance(x, LogScalar):
            return x
        if x == 0:
            return cls(0)
        sign = 1 if x > 0 else -1
        if isinstance(x, Rational) and not isinstance(x, int):
            return cls(sign, math.log(abs(x.numerator)) - math.log(x.denominator))
        return cls(sign, math.log(abs(x)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def log(self) -> float:
        """Natural log of a non-negative value (``-inf`` for zero)."""
        if self.sign < 0:
            raise ValueError("log of a negative LogScalar")
        return self.log_abs

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf

    def __neg__(self):
        return LogScalar(-self.sign, self.log_abs)

    def __mul__(self, other):
        other = LogScalar.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = LogScalar.from_value(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScalar")
        if self.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign * other.sign, self.log_abs - other.log_abs)

    def __pow__(self, k: int):
        if k == 0:
            return LogScalar.one()
        if self.sign == 0:
            return LogScalar(0)
        return LogScalar(self.sign ** k, self.log_abs * k)

    def __add__(self, other):
        other = LogScalar.from_value(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        if big.log_abs == math.inf:
            return big
        ratio = math.exp(small.log_abs - big.log_abs)
        if big.sign == small.sign:
            return LogScalar(big.sign, big.log_abs + math.log1p(ratio))
        if ratio == 1.0:
            return LogScalar(0)
        return LogScalar(big.sign, big.log_abs + math.log1p(-ratio))

    __radd__ = __add__

    def isclose(self, other, rel: float = 1e-9) -> bool:
        other = LogScalar.from_value(other)
        if self.sign == 0 or other.sign == 0:
            return self.sign == other.sign
        return self.sign == other.sign and abs(self.log_abs - other.log_abs) <= rel


# --- evaluation points -----------------------------------------------------------


def _eval_point(x):
    """Return (values, exact). Exact points keep ``Fraction`` entries."""
    vals = list(np.asarray(x, dtype=object).ravel()) if not isinstance(x, (list, tuple)) else list(x)
    exact = all(isinstance(v, Rational) for v in vals)
    if exact:
        vals = [Fraction(v) for v in vals]
        if any(v < 0 for v in vals):
            raise ValueError("evaluation point must be non-negative")
        return vals, True
    out = []
    for v in vals:
        v = float(v)
        if v < -CLIP_TOL or math.isnan(v):
            raise ValueError(f"evaluation point entry {v!r} is negative beyond the clip tolerance")
        out.append(max(v, 0.0))
    return out, False


def schur_eval(lam, x, method: str = "auto") -> LogScalar:
    """Evaluate the Schur polynomial ``s_lam`` at the point ``x``.

    Parameters
    ----------
    lam : sequence of int
        Young diagram.
    x : sequence of non-negative numbers
        Floats (entries down to ``-1e-12`` are clipped to zero) or exact rationals
        (``int``/``Fraction``), which are always routed to the exact bialternant.
    method : {"auto", "ssyt", "closed2", "bialternant"}

    Returns
    -------
    LogScalar
        Exact zero when ``lam`` has more rows than ``x`` has non-zero entries.
    """
    lam = as_partition(lam)
    vals, exact = _eval_point(x)
    n = sum(lam)
    nonzero = [v for v in vals if v > 0]
    if method not in ("auto", "ssyt", "closed2", "bialternant"):
        raise ValueError(f"unknown method {method!r}")
    if len(lam) > len(nonzero):
        return LogScalar.zero()
    if n == 0:
        return LogScalar.one()
    if method == "auto":
        if exact:
            method = "bialternant"
        elif len(nonzero) <= 2:
            method = "closed2"
        elif n <= SSYT_MAX_N:
            method = "ssyt"
        else:
            method = "bialternant"
    if method == "closed2":
        if len(nonzero) > 2:
            raise ValueError("closed2 backend needs at most two non-zero variables")
        a = lam[0]
        b = lam[1] if len(lam) > 1 else 0
        xs = [float(v) for v in nonzero] + [0.0] * (2 - len(nonzero))
        return LogScalar.from_log(float(log_schur_two(a, b, xs[0], xs[1])))
    if method == "ssyt":
        if n > SSYT_MAX_N:
            raise ValueError(f"ssyt backend is limited to n <= {SSYT_MAX_N}")
        return _schur_ssyt(lam, [float(v) for v in nonzero])
    return _schur_bialternant(lam, nonzero)


def log_schur_two(a, b, x, y):
    """Vectorised ``ln s_(a,b)(x, y)`` for non-negative ``x, y``; ``-inf`` encodes zero."""
    a = np.asarray(a)
    b = np.asarray(b)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    k = a - b
    with np.errstate(divide="ignore", invalid="ignore"):
        log_hi = np.log(hi)
        log_lo = np.log(lo)
        log_q = log_lo - log_hi
        ratio = np.where(log_q == 0.0, k + 1.0, np.expm1((k + 1) * log_q) / np.expm1(log_q))
        log_h = k * log_hi + np.log(ratio)
        pair = np.where(b == 0, 0.0, b * (log_hi + log_lo))
        out = pair + log_h
    out = np.where(hi > 0, out, -np.inf)
    return np.where(np.isnan(out), -np.inf, out)


def _interlacing(mu):
    """All ``nu`` with ``mu[i+1] <= nu[i] <= mu[i]`` (trailing zeros dropped)."""
    k = len(mu)

    def rec(i, acc):
        if i == k:
            yield as_partition(acc)
            return
        lo = mu[i + 1] if i + 1 < k else 0
        for v in range(mu[i], lo - 1, -1):
            yield from rec(i + 1, acc + (v,))

    yield from rec(0, ())


def _schur_ssyt(lam, vals) -> LogScalar:
    top = max(vals)
    y = [v / top for v in vals]
    n = sum(lam)

    @lru_cache(maxsize=None)
    def rec(mu, k):
        if not mu:
            return 1.0
        if len(mu) > k:
            return 0.0
        if k == 1:
            return y[0] ** mu[0]
        size = sum(mu)
        xk = y[k - 1]
        return sum(xk ** (size - sum(nu)) * rec(nu, k - 1) for nu in _interlacing(mu))

    val = rec(lam, len(y))
    if val == 0.0:
        return LogScalar.zero()
    return LogScalar(1, math.log(val) + n * math.log(top))


# --- exact bialternant -------------------------------------------------------------


def _bareiss_det(rows) -> int:
    """Fraction-free Gaussian elimination determinant of an integer matrix."""
    m = [list(r) for r in rows]
    size = len(m)
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for i in range(k + 1, size):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        tail_k = m[k][k + 1:]
        for i in range(k + 1, size):
            row_i = m[i]
            mik = row_i[k]
            m[i] = row_i[:k + 1] + [(a * pivot - mik * b) // prev for a, b in zip(row_i[k + 1:], tail_k)]
        prev = pivot
    return sign * m[size - 1][size - 1]


def _confluent_rows(clusters, exps):
    rows = []
    for c, mult in clusters:
        rows.append([c ** a for a in exps])
        for k in range(1, mult):
            rows.append([math.comb(a, k) * c ** (a - k) if a >= k else 0 for a in exps])
    return rows


def _confluent_vandermonde(clusters) -> int:
    # determinant of the confluent rows for exponents (l-1, ..., 0)
    out = 1
    for p in range(len(clusters)):
        cp, mp = clusters[p]
        if (mp * (mp - 1) // 2) % 2:
            out = -out
        for q in range(p + 1, len(clusters)):
            cq, mq = clusters[q]
            out *= (cp - cq) ** (mp * mq)
    return out


def schur_at_integers(lam, m) -> int:
    """Exact ``s_lam(m)`` at a point of non-negative integers."""
    lam = as_partition(lam)
    m = [int(v) for v in m if v != 0]
    if any(v < 0 for v in m):
        raise ValueError("integer point must be non-negative")
    return _schur_int(lam, m)


def _schur_int(lam, m) -> int:
    # unvalidated core of schur_at_integers; m holds positive ints
    if len(lam) > len(m):
        return 0
    if not lam:
        return 1
    l = len(m)
    scale = 1
    if len(lam) == l:
        # full columns factor out as powers of the product of the variables
        scale = math.prod(m) ** lam[-1]
        lam = tuple(p - lam[-1] for p in lam if p > lam[-1])
        if not lam:
            return scale
    parts = lam + (0,) * (l - len(lam))
    exps = [parts[j] + l - 1 - j for j in range(l)]
    clusters = [(c, len(list(g))) for c, g in groupby(sorted(m, reverse=True))]
    if len(clusters) == l:
        rows = [[c ** a for a in exps] for c, _ in clusters]
    else:
        rows = _confluent_rows(clusters, exps)
    q, r = divmod(_bareiss_det(rows), _confluent_vandermonde(clusters))
    if r:
        raise ArithmeticError("bialternant division was not exact")
    return scale * q


def _schur_bialternant(lam, vals) -> LogScalar:
    fr = [Fraction(v) for v in vals if v != 0]
    den = 1
    for f in fr:
        den = math.lcm(den, f.denominator)
    m = [f.numerator * (den // f.denominator) for f in fr]
    s = schur_at_integers(lam, m)
    if s == 0:
        return LogScalar.zero()
    return LogScalar(1, math.log(s) - sum(lam) * math.log(den))


# --- vectorised evaluation -----------------------------------------------------------


@lru_cache(maxsize=None)
def _kostka_table(lam, d):
    weights = weight_vectors(sum(lam), d)
    coeffs = [kostka(lam, w) for w in weights]
    keep = [i for i, c in enumerate(coeffs) if c]
    return np.array([weights[i] for i in keep], dtype=float), np.array([coeffs[i] for i in keep], dtype=float)


def log_schur_many(lam, points) -> np.ndarray:
    """``ln s_lam`` at each row of ``points`` (shape ``(m, d)``), ``-inf`` for zeros.

    Two variables use :func:`log_schur_two`; ``n <= 12`` uses the monomial expansion with
    Kostka coefficients; anything else falls back to :func:`schur_eval` per row.
    """
    lam = as_partition(lam)
    pts = np.clip(np.asarray(points, dtype=float), 0.0, None)
    if pts.ndim != 2:
        raise ValueError("points must have shape (m, d)")
    d = pts.shape[1]
    n = sum(lam)
    if len(lam) > d:
        return np.full(pts.shape[0], -np.inf)
    if d == 2:
        return log_schur_two(lam[0], lam[1] if len(lam) > 1 else 0, pts[:, 0], pts[:, 1])
    if n <= KOSTKA_MAX_N:
        weights, coeffs = _kostka_table(lam, d)
        top = pts.max(axis=1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        y = pts / safe
        with np.errstate(divide="ignore"):
            mono = np.exp(np.log(y) @ weights.T) if np.all(y > 0) else np.prod(y[:, None, :] ** weights[None], axis=2)
            return np.where(top[:, 0] > 0, np.log(mono @ coeffs) + n * np.log(safe[:, 0]), -np.inf)
    return np.array([schur_eval(lam, p).log() for p in pts])


# --- products of states and the character bounds ------------------------------------


def product_eigenvalues(rho, sigma, tol: float = RANK_TOL) -> np.ndarray:
    """Eigenvalues of ``rho sigma`` via the PSD matrix ``sqrt(rho) sigma sqrt(rho)``.

    Values below ``tol * max`` are set to exactly zero so that rank deficiency yields
    structural zeros downstream.
    """
    s = psd_sqrt(rho)
    w = np.clip(np.linalg.eigvalsh(hermitian_part(s @ np.asarray(sigma) @ s)), 0.0, None)[::-1]
    w[w <= tol * max(w[0], 0.0)] = 0.0
    return w


def schur_eval_product(lam, rho, sigma) -> LogScalar:
    rho = validate_density(rho)
    sigma = validate_density(sigma)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return schur_eval(lam, product_eigenvalues(rho, sigma))


@dataclass(frozen=True)
class CharacterBoundReport:
    """``ln s_lam(rho sigma) <= ln dim Q - 2nH + 2n ln F``, plus the vanishing case."""

    lhs: float
    rhs: float
    slack: float
    expected_zero: bool

    @property
    def is_zero(self) -> bool:
        return self.lhs == -math.inf

    @property
    def margin(self) -> float:
        return math.inf if self.is_zero else self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        if self.expected_zero and not self.is_zero:
            return False
        return self.margin >= -self.slack


def check_character_upper_bound(rho, sigma, lam, slack: float = 1e-9) -> CharacterBoundReport:
    from .states import fidelity, rank

    lam = as_partition(lam)
    rho = validate_density(rho)
    d = rho.shape[0]
    n = sum(lam)
    f = fidelity(rho, sigma)
    lhs = schur_eval_product(lam, rho, sigma).log()
    dim_q = dim_gl_irrep(lam, d)
    if dim_q == 0 or f == 0.0:
        rhs = -math.inf
    else:
        rhs = math.log(dim_q) - 2 * n * entropy(lam) + 2 * n * math.log(f)
    r = rank(rho)
    return CharacterBoundReport(lhs, rhs, slack, expected_zero=len(lam) > r)


def check_character_lower_bound(lam, slack: float = 1e-12) -> LogBoundReport:
    """``ln s_lam(lam / n) >= -n H(lam / n)``, evaluated exactly at the rational point."""
    lam = as_partition(lam)
    n = sum(lam)
    s = _schur_int(lam, list(lam))
    largest = math.prod(p ** p for p in lam)
    neg_nh = sum(p * math.log(p / n) for p in lam)
    # the ratio s / largest is formed exactly before taking logs
    return LogBoundReport(neg_nh, neg_nh + math.log(s / largest), slack)


def largest_monomial_bound(lam, x) -> LogScalar:
    """``dim Q_lam * x^lam`` for ``x`` sorted non-increasing."""
    lam = as_partition(lam)
    xs = sorted((float(v) for v in x), reverse=True)
    if len(lam) > len(xs):
        return LogScalar.zero()
    out = LogScalar.from_value(dim_gl_irrep(lam, len(xs)))
    for p, v in zip(lam, xs):
        out = out * LogScalar.from_value(v) ** p
    return out
