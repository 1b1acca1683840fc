import math

import numpy as np
import pytest

from swtomo.packing import (
    Ensemble,
    NetFamily,
    PackingNet,
    analytic_distance_lower_bound,
    base_state,
    binary_entropy,
    chi0_analytic,
    distances,
    greedy_pack,
    greedy_pack_from,
    holevo_chi,
    holevo_chi_with_stderr,
    indep_chi_per_copy_mc,
    kind_i_average_entropy,
    make_state,
    omega_chi_bound,
    random_rank1_povm,
    sample_lower_bound,
    tau_entropy,
)
from swtomo.states import haar_unitary, pure_state, trace_norm, validate_density, von_neumann_entropy


def test_family_validation():
    for args in [("I", 6, 2, 0.4), ("II", 7, 3, 0.5), ("II", 8, 3, 0.5), ("OMEGA", 3, 2, 0.2), ("X", 4, 1, 0.1),
                 ("II", 4, 2, 1.5)]:
        with pytest.raises(ValueError):
            NetFamily(*args)
    with pytest.raises(ValueError):
        NetFamily("III", 12, 1, 0.5, epsilon=0.1)
    with pytest.raises(ValueError):
        NetFamily("III", 12, 2, 1.0, epsilon=0.1)
    NetFamily("III", 12, 1, 1.0, epsilon=0.1)


def test_kind_ii_base_state():
    np.testing.assert_allclose(base_state(NetFamily("II", 4, 2, 0.5)), np.diag([0.375, 0.375, 0.125, 0.125]))


def test_omega_base_state():
    np.testing.assert_allclose(base_state(NetFamily("OMEGA", 4, 2, 0.3)), np.diag([0.7, 0.15, 0.15, 0.0]))


def test_kind_iii_is_flat(rng):
    fam = NetFamily("III", 12, 1, 1.0, epsilon=0.1)
    rho = make_state(fam, haar_unitary(12, rng))
    assert von_neumann_entropy(rho) == pytest.approx(math.log(1), abs=1e-12)
    fam = NetFamily("III", 24, 3, 1.0, epsilon=0.1)
    assert von_neumann_entropy(make_state(fam, haar_unitary(24, rng))) == pytest.approx(math.log(3))


def test_kind_i_states_valid(rng):
    fam = NetFamily("I", 7, 2, 0.4)
    for u in fam.sample_unitaries(rng, 20):
        rho = validate_density(make_state(fam, u))
        np.testing.assert_allclose(np.linalg.eigvalsh(rho)[-2:], [0.5, 0.5], atol=1e-12)


def test_make_state_shape_check(rng):
    with pytest.raises(ValueError):
        make_state(NetFamily("I", 6, 1, 0.4), haar_unitary(6, rng))


def test_bound_zero_for_block_diagonal(rng):
    fam = NetFamily("II", 6, 3, 0.5)
    assert analytic_distance_lower_bound(fam, np.eye(6)) == 0
    u = np.zeros((6, 6), dtype=complex)
    u[:3, :3], u[3:, 3:] = haar_unitary(3, rng), haar_unitary(3, rng)
    assert analytic_distance_lower_bound(fam, u) == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("fam", [NetFamily("I", 6, 1, 0.4), NetFamily("II", 8, 4, 0.5),
                                 NetFamily("III", 12, 1, 1.0, epsilon=0.1)])
def test_bound_below_exact(fam, rng):
    us = fam.sample_unitaries(rng, 1000)
    exact = trace_norm(make_state(fam, us) - base_state(fam))
    bound = analytic_distance_lower_bound(fam, us)
    assert np.all(bound <= exact + 1e-9)


def test_distances_metrics(rng):
    fam = NetFamily("II", 4, 2, 0.5)
    states = make_state(fam, fam.sample_unitaries(rng, 5))
    d = distances(states[0], states, "trace")
    assert d[0] == pytest.approx(0, abs=1e-12)
    assert np.all(distances(states[0], states, "infidelity") >= -1e-12)
    with pytest.raises(ValueError):
        distances(states[0], states, "hamming")


def test_greedy_separation_and_roundtrip(rng):
    fam = NetFamily("II", 8, 4, 0.5)
    net = greedy_pack(fam, 0.25, "trace", 500, rng, max_size=15)
    assert len(net) == 15 and net.verify()
    assert net.min_separation() > 0.25
    back = PackingNet.from_json(net.to_json())
    assert len(back) == len(net) and back.verify()
    np.testing.assert_allclose(np.stack(back.states), np.stack(net.states))


def test_greedy_huge_threshold_keeps_first(rng):
    fam = NetFamily("I", 6, 1, 0.4)
    net = greedy_pack(fam, 10.0, "trace", 100, rng)
    assert len(net) == 1 and net.draws == 100


def test_greedy_is_order_deterministic(rng):
    fam = NetFamily("I", 6, 1, 0.4)
    us = fam.sample_unitaries(rng, 300)
    a = greedy_pack_from(fam, 0.1, "trace", us)
    b = greedy_pack_from(fam, 0.1, "trace", us)
    assert len(a) == len(b)
    np.testing.assert_array_equal(np.stack(a.states), np.stack(b.states))


def test_holevo_identical_and_orthogonal(rng):
    rho = validate_density(np.diag([0.6, 0.4]))
    assert holevo_chi(Ensemble.uniform([rho] * 4)) == pytest.approx(0, abs=1e-10)
    basis = [pure_state(np.eye(5)[i]) for i in range(5)]
    assert holevo_chi(Ensemble.uniform(basis)) == pytest.approx(math.log(5), abs=1e-9)


def test_holevo_two_pure_states():
    theta = math.pi / 3
    a = pure_state([1, 0])
    b = pure_state([math.cos(theta), math.sin(theta)])
    chi = holevo_chi(Ensemble.uniform([a, b]))
    assert chi == pytest.approx(binary_entropy((1 + math.cos(theta)) / 2), abs=1e-12)
    assert chi == pytest.approx(0.5623, abs=1e-4)


def test_holevo_is_bounded(rng):
    fam = NetFamily("II", 4, 2, 0.7)
    states = list(make_state(fam, fam.sample_unitaries(rng, 30)))
    chi = holevo_chi(Ensemble.uniform(states))
    assert 0 <= chi <= math.log(30)
    mean, se = holevo_chi_with_stderr(states)
    assert mean == pytest.approx(chi, abs=1e-10) and se > 0


def test_ensemble_validation():
    with pytest.raises(ValueError):
        Ensemble(np.array([0.5, 0.6]), [np.eye(2) / 2] * 2)


def test_tau_entropy_matches_eigen():
    for d, t in [(4, 0.5), (8, 0.3), (10, 0.9)]:
        assert tau_entropy(d, d // 2, t) == pytest.approx(von_neumann_entropy(base_state(NetFamily("II", d, d // 2, t))),
                                                          abs=1e-10)


def test_kind_i_average_entropy(rng):
    fam = NetFamily("I", 7, 2, 0.4)
    avg = make_state(fam, fam.sample_unitaries(rng, 20000)).mean(axis=0)
    assert von_neumann_entropy(avg) == pytest.approx(kind_i_average_entropy(7, 2, 0.4), abs=5e-3)


def test_chi0_examples():
    fam = NetFamily("II", 8, 4, 0.3)
    assert chi0_analytic(fam) == pytest.approx(math.log(2) - binary_entropy(0.65), abs=1e-12)
    assert chi0_analytic(fam) == pytest.approx(0.0458, abs=1e-4)
    assert chi0_analytic(fam) <= 0.09
    assert chi0_analytic(NetFamily("III", 12, 1, 1.0, epsilon=0.1)) == pytest.approx(math.log(12))
    assert chi0_analytic(NetFamily("I", 6, 1, 0.0)) == 0.0
    kind_i = NetFamily("I", 10, 2, 0.3)
    assert chi0_analytic(kind_i) <= chi0_analytic(kind_i, relaxed=True)
    with pytest.raises(ValueError):
        chi0_analytic(NetFamily("OMEGA", 4, 2, 0.3))


def test_sample_lower_bound_examples():
    d, t = 8, 0.1
    val = sample_lower_bound(log_n_states=d * d / 32, eta=0.5, chi0=t * t)
    assert val == pytest.approx((1 - math.log(2)) / 0.01)
    assert val == pytest.approx(30.7, abs=0.05)
    assert sample_lower_bound(2, eta=0.01, chi0=math.log(2)) < 0
    with pytest.raises(ValueError):
        sample_lower_bound(10, eta=0.5, chi0=0.0)


def test_omega_bound_examples():
    assert omega_chi_bound(0.1, 2, 100) == pytest.approx(4 * 0.5 * math.log(20))
    assert omega_chi_bound(0.1, 2, 100) == pytest.approx(5.99, abs=0.01)
    assert omega_chi_bound(0.3, 1, 10) == pytest.approx(3.6 * math.log(2 / 0.3))
    assert omega_chi_bound(0.3, 1, 10) == pytest.approx(6.83, abs=0.01)
    assert omega_chi_bound(1e-8, 1, 10) < 1e-12
    with pytest.warns(UserWarning):
        omega_chi_bound(0.5, 1, 10)


def test_povm_is_resolution_of_identity(rng):
    povm = random_rank1_povm(4, 16, rng)
    np.testing.assert_allclose(povm.sum(axis=0), np.eye(4), atol=1e-12)
    assert all(np.linalg.eigvalsh(e)[0] >= -1e-12 for e in povm)


def test_independent_chi_zero_at_t0(rng):
    rep = indep_chi_per_copy_mc(4, 0.0, 16, 50, rng)
    assert rep.chi == pytest.approx(0, abs=1e-12)


def test_independent_chi_small(rng):
    rep = indep_chi_per_copy_mc(4, 0.2, 16, 500, rng)
    assert rep.bound == pytest.approx(0.008)
    assert rep.holds
