"""Young diagram combinatorics.

A partition is a plain tuple of positive, non-increasing integers. Functions accept
any sequence and normalise it with :func:`as_partition`; trailing zeros are dropped,
so ``(2, 1, 0)`` and ``(2, 1)`` denote the same diagram.
"""

import logging
import math
import operator
from dataclasses import dataclass
from functools import lru_cache

logger = logging.getLogger(__name__)

#: largest total for which Kostka numbers are computed
KOSTKA_MAX_N = 12


class UnsupportedSizeError(ValueError):
    """Raised when an exhaustive routine is asked for an instance above its cap."""


def _part(p) -> int:
    try:
        return operator.index(p)
    except TypeError:
        if float(p) != int(p):
            raise ValueError(f"partition parts must be integers, got {p!r}") from None
        return int(p)


def as_partition(parts) -> tuple:
    if type(parts) is tuple and all(type(p) is int for p in parts):
        lam = parts
    else:
        lam = tuple(_part(p) for p in parts)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    if any(p <= 0 for p in lam):
        raise ValueError(f"partition parts must be positive: {parts!r}")
    if any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"partition must be non-increasing: {parts!r}")
    return lam


def padded(lam, d: int) -> tuple:
    lam = as_partition(lam)
    if len(lam) > d:
        raise ValueError(f"{lam} has more than {d} rows")
    return lam + (0,) * (d - len(lam))


def enumerate_partitions(n: int, max_rows: int) -> list:
    """All partitions of ``n`` with at most ``max_rows`` rows, lexicographically decreasing.

    >>> enumerate_partitions(4, 2)
    [(4,), (3, 1), (2, 2)]
    """
    if n < 0 or max_rows < 0:
        raise ValueError("n and max_rows must be non-negative")
    return list(_partitions(n, max_rows, n))


def _partitions(n, rows, cap):
    if n == 0:
        yield ()
        return
    if rows == 0:
        return
    for first in range(min(n, cap), 0, -1):
        # the remaining rows can hold at most (rows - 1) * first boxes
        if (rows - 1) * first < n - first:
            break
        for rest in _partitions(n - first, rows - 1, first):
            yield (first,) + rest


def weight_vectors(n: int, d: int) -> list:
    """All length-``d`` non-negative integer vectors summing to ``n``."""
    if d == 0:
        return [()] if n == 0 else []
    if d == 1:
        return [(n,)]
    return [(k,) + rest for k in range(n, -1, -1) for rest in weight_vectors(n - k, d - 1)]


def conjugate(lam) -> tuple:
    lam = as_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def hook_lengths(lam) -> list:
    lam = as_partition(lam)
    cols = conjugate(lam)
    return [lam[i] - j + cols[j] - i - 1 for i in range(len(lam)) for j in range(lam[i])]


def dim_sn_irrep(lam) -> int:
    """Dimension of the symmetric-group irrep, ``n! / prod(hooks)``.

    Python integers are exact at any size, so no log-domain switch is needed here;
    :func:`log_dim_sn_irrep` is the float companion for bound checks.
    """
    return _dim_sn(as_partition(lam))


def _dim_sn(lam) -> int:
    # Frobenius form n! prod_{i<j} (l_i - l_j) / prod l_i! with l_i = lam_i + k - i,
    # equal to the hook formula and quadratic in the number of rows
    k = len(lam)
    ls = [p + k - 1 - i for i, p in enumerate(lam)]
    num = math.factorial(sum(lam)) * math.prod(ls[i] - ls[j] for i in range(k) for j in range(i + 1, k))
    return num // math.prod(math.factorial(v) for v in ls)


def log_dim_sn_irrep(lam) -> float:
    return math.log(_dim_sn(as_partition(lam)))


def dim_gl_irrep(lam, d: int) -> int:
    """Dimension of the ``GL(d)`` irrep, ``prod_{i<j} (l_i - l_j + j - i) / (j - i)``.

    Zero when ``lam`` has more than ``d`` rows.
    """
    lam = as_partition(lam)
    if len(lam) > d:
        return 0
    lam = lam + (0,) * (d - len(lam))
    num = den = 1
    for i in range(d):
        for j in range(i + 1, d):
            num *= lam[i] - lam[j] + j - i
            den *= j - i
    return num // den


def log_dim_gl_irrep(lam, d: int) -> float:
    dim = dim_gl_irrep(lam, d)
    return math.log(dim) if dim else -math.inf


def majorizes(lam, nu) -> bool:
    """True iff ``nu`` is majorized by ``lam`` (prefix sums of sorted ``nu`` never exceed ``lam``'s)."""
    lam = as_partition(lam)
    nu = sorted((int(v) for v in nu), reverse=True)
    if any(v < 0 for v in nu):
        raise ValueError("weights must be non-negative")
    if sum(nu) != sum(lam):
        logger.debug("majorizes: totals differ (%d vs %d)", sum(lam), sum(nu))
        return False
    a = b = 0
    for k in range(max(len(lam), len(nu))):
        a += lam[k] if k < len(lam) else 0
        b += nu[k] if k < len(nu) else 0
        if b > a:
            return False
    return True


def horizontal_strips(lam, size: int):
    """Partitions ``mu`` such that ``lam / mu`` is a horizontal strip of ``size`` boxes.

    These interlace ``lam``: ``lam[i+1] <= mu[i] <= lam[i]``.
    """
    lam = as_partition(lam)
    k = len(lam)
    target = sum(lam) - size
    if target < 0:
        return

    def rec(i, acc, total):
        if i == k:
            if total == target:
                yield as_partition(acc)
            return
        lo = lam[i + 1] if i + 1 < k else 0
        # remaining rows can add at most sum(lam[i:]) boxes
        rest_max = sum(lam[i + 1:])
        for m in range(lam[i], lo - 1, -1):
            if total + m > target:
                continue
            if total + m + rest_max < target:
                break
            yield from rec(i + 1, acc + (m,), total + m)

    yield from rec(0, (), 0)


def kostka(lam, nu) -> int:
    """Number of semistandard tableaux of shape ``lam`` and weight ``nu``.

    Counted by peeling horizontal strips (the boxes holding the largest label) off
    ``lam``. Limited to totals up to :data:`KOSTKA_MAX_N`.
    """
    lam = as_partition(lam)
    nu = tuple(int(v) for v in nu)
    if any(v < 0 for v in nu):
        raise ValueError("weights must be non-negative")
    n = sum(lam)
    if n > KOSTKA_MAX_N:
        raise UnsupportedSizeError(f"kostka is limited to n <= {KOSTKA_MAX_N}, got n={n}")
    if sum(nu) != n:
        return 0
    return _kostka(lam, nu)


@lru_cache(maxsize=None)
def _kostka(lam, nu):
    if not nu:
        return 1 if not lam else 0
    if len(lam) > len(nu):
        return 0
    return sum(_kostka(mu, nu[:-1]) for mu in horizontal_strips(lam, nu[-1]))


def semistandard_tableaux(lam, d: int):
    """Yield every SSYT of shape ``lam`` with entries in ``1..d``, as a tuple of rows.

    Direct cell-by-cell backtracking; independent of :func:`kostka`, which makes it a
    useful cross-check at small sizes.
    """
    lam = as_partition(lam)
    cells = [(i, j) for i in range(len(lam)) for j in range(lam[i])]
    grid = [[0] * p for p in lam]

    def rec(c):
        if c == len(cells):
            yield tuple(tuple(row) for row in grid)
            return
        i, j = cells[c]
        lo = 1
        if j > 0:
            lo = max(lo, grid[i][j - 1])
        if i > 0:
            lo = max(lo, grid[i - 1][j] + 1)
        # leave room for the strictly increasing column below
        below = sum(1 for r in range(i + 1, len(lam)) if lam[r] > j)
        for v in range(lo, d - below + 1):
            grid[i][j] = v
            yield from rec(c + 1)
        grid[i][j] = 0

    yield from rec(0)


def tableau_weight(tableau, d: int) -> tuple:
    counts = [0] * d
    for row in tableau:
        for v in row:
            counts[v - 1] += 1
    return tuple(counts)


def entropy(lam, d=None) -> float:
    """Shannon entropy (nats) of ``lam / n``; zero parts contribute nothing.

    ``d`` is accepted for symmetry with the other routines and only checks the row count.
    """
    lam = as_partition(lam)
    if d is not None and len(lam) > d:
        raise ValueError(f"{lam} has more than {d} rows")
    return _entropy(lam)


def _entropy(lam) -> float:
    n = sum(lam)
    return -sum((p / n) * math.log(p / n) for p in lam)


@dataclass(frozen=True)
class LogBoundReport:
    """Outcome of a log-domain inequality check ``lhs <= rhs``."""

    lhs: float
    rhs: float
    slack: float

    @property
    def margin(self) -> float:
        if self.lhs == -math.inf:
            return math.inf
        return self.rhs - self.lhs

    @property
    def violation(self) -> float:
        return max(0.0, -self.margin)

    @property
    def holds(self) -> bool:
        return self.margin >= -self.slack


def check_dim_entropy_bound(lam, slack: float = 1e-12) -> LogBoundReport:
    """``ln dim P_lam <= n H(lam / n)``."""
    lam = as_partition(lam)
    return LogBoundReport(math.log(_dim_sn(lam)), sum(lam) * _entropy(lam), slack)
