import math
from fractions import Fraction

import numpy as np
import pytest

from swtomo.partitions import dim_sn_irrep, enumerate_partitions, padded
from swtomo.pgm import (
    beta_integral_check,
    check_pgm_bound,
    exact_expected_schur,
    expected_schur_uniform,
    log_expected_schur_bound,
    pgm_density,
    uniform_spectra,
)


def f2(a, b):
    # int_0^1 u^a (1-u)^b du
    return Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))


def f_recursive(lam):
    """Simplex integral of ``x^lam`` peeled one coordinate at a time."""
    if len(lam) == 1:
        return Fraction(1)
    rest = lam[1:]
    return f2(lam[0], len(lam) - 2 + sum(rest)) * f_recursive(rest)


def test_recursion_reproduces_closed_form():
    for d in range(2, 5):
        for n in range(1, 11):
            for lam in enumerate_partitions(n, d):
                val = math.factorial(d - 1) * f_recursive(padded(lam, d))
                assert math.log(val) == pytest.approx(log_expected_schur_bound(lam, d), abs=1e-12)


def test_point_simplex():
    assert math.exp(log_expected_schur_bound((1,), 1)) == pytest.approx(1.0)
    assert exact_expected_schur((1,), 1) == 1


def test_row_bound_and_mc(rng):
    for n in (1, 4, 9):
        assert math.exp(log_expected_schur_bound((n,), 2)) == pytest.approx(1 / (n + 1))
    res = expected_schur_uniform((6,), 2, mc_samples=100_000, rng=rng)
    exact = float(res.exact)
    assert exact == pytest.approx(sum(1 / (7 * math.comb(6, j)) for j in range(7)), rel=1e-12)
    assert abs(res.mc_mean - exact) <= 0.03 * exact + 3 * res.mc_stderr
    assert float(res.bound) <= exact


def test_two_one_bound(rng):
    res = expected_schur_uniform((2, 1), 2, mc_samples=100_000, rng=rng)
    assert float(res.bound) == pytest.approx(1 / 12)
    assert res.mc_mean + 3 * res.mc_stderr >= 1 / 12
    assert abs(res.mc_mean - float(res.exact)) <= 3 * res.mc_stderr


def test_exact_sum_rule():
    # sum_lam dim P_lam E s_lam = E (x_1 + ... + x_d)^n = 1
    for d in range(1, 4):
        for n in range(1, 9):
            assert sum(dim_sn_irrep(l) * exact_expected_schur(l, d) for l in enumerate_partitions(n, d)) == 1


def test_exact_at_least_bound():
    for d in range(1, 4):
        for n in range(1, 11):
            for lam in enumerate_partitions(n, d):
                assert math.log(exact_expected_schur(lam, d)) >= log_expected_schur_bound(lam, d) - 1e-12


def test_uniform_spectra_on_simplex(rng):
    x = uniform_spectra(4, 1000, rng)
    np.testing.assert_allclose(x.sum(axis=1), 1.0)
    assert np.all(x >= 0)


def test_mc_requires_rng():
    with pytest.raises(ValueError):
        expected_schur_uniform((2,), 2, mc_samples=10)


def test_pgm_bound_row_cases():
    for n in range(1, 60):
        rep = check_pgm_bound((n,), 2)
        assert rep.rhs == pytest.approx(-math.log(n + 1))
        assert rep.holds


def test_pgm_bound_column():
    for d in range(1, 5):
        rep = check_pgm_bound((1,) * d, d)
        assert rep.holds and math.isfinite(rep.lhs) and math.isfinite(rep.rhs)


def test_pgm_bound_sweep():
    for d in range(1, 5):
        for n in range(1, 41):
            assert all(check_pgm_bound(l, d).holds for l in enumerate_partitions(n, d))


def test_density_pure_equal():
    rho = np.diag([1.0, 0.0])
    dens = pgm_density(rho, rho, 5)
    assert dens.mode == "bound"
    assert float(dens.value) == pytest.approx(36.0)
    assert list(dens.terms) == [(5,)]


def test_density_rank_one_single_term(rng):
    from swtomo.states import random_state
    dens = pgm_density(random_state(3, 1, rng), random_state(3, 3, rng), 6, mode="exact")
    assert list(dens.terms) == [(6,)]


def test_density_log_rate():
    rho, sigma = np.diag([1.0, 0.0]), np.diag([0.81, 0.19])
    devs = []
    for n in (20, 40, 80):
        dev = pgm_density(rho, sigma, n).value.log() / n - 2 * math.log(0.9)
        assert 0 <= dev <= 2 * 2 * 1 * math.log(n + 1) / n
        devs.append(dev)
    assert devs[0] > devs[1] > devs[2]


def test_bound_mode_is_upper_bound(rng):
    from swtomo.states import random_state
    rho, sigma = random_state(2, 2, rng), random_state(2, 2, rng)
    b = pgm_density(rho, sigma, 8).value
    e = pgm_density(rho, sigma, 8, mode="exact").value
    assert float(e) <= float(b) * (1 + 1e-12)


@pytest.mark.parametrize("a,b,want", [(1, 1, 1.0), (2, 3, 1 / 12), (0.5, 0.5, math.pi)])
def test_beta_examples(a, b, want):
    rep = beta_integral_check(a, b)
    assert rep.quadrature == pytest.approx(want, rel=1e-8)
    assert rep.rel_error < 1e-8


def test_beta_grid():
    for a in (0.1, 0.3, 0.5, 1, 2.5, 7, 20):
        for b in (0.1, 0.5, 1, 3, 11.5, 40):
            assert beta_integral_check(a, b).rel_error < 1e-8


def test_beta_rejects_nonpositive():
    with pytest.raises(ValueError):
        beta_integral_check(0, 1)
