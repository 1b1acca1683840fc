import itertools
import math

import numpy as np
import pytest

from swtomo.oracle import (
    centralizer_order,
    check_projector_algebra,
    compose,
    cycle_type,
    isotypic_projector,
    permutation_operator,
    sn_character,
    verify_schur_weyl_measure,
)
from swtomo.partitions import dim_sn_irrep, enumerate_partitions
from swtomo.states import pure_state, random_state


def test_identity_and_swap():
    np.testing.assert_array_equal(permutation_operator((0, 1, 2), 2), np.eye(8))
    swap = np.zeros((4, 4))
    for i, j in itertools.product(range(2), repeat=2):
        swap[2 * j + i, 2 * i + j] = 1
    np.testing.assert_array_equal(permutation_operator((1, 0), 2), swap)


def test_homomorphism_on_s3():
    perms = list(itertools.permutations(range(3)))
    for pi, tau in itertools.product(perms, perms):
        np.testing.assert_array_equal(
            permutation_operator(pi, 2) @ permutation_operator(tau, 2),
            permutation_operator(compose(pi, tau), 2))


def test_cycle_type():
    assert cycle_type((1, 2, 0, 4, 3)) == (3, 2)
    assert cycle_type((0, 1, 2)) == (1, 1, 1)


def test_characters_on_identity_and_trivial():
    for n in range(1, 7):
        for lam in enumerate_partitions(n, n):
            assert sn_character(lam, (1,) * n) == dim_sn_irrep(lam)
        for mu in enumerate_partitions(n, n):
            assert sn_character((n,), mu) == 1


def test_character_orthogonality():
    for n in range(1, 7):
        classes = enumerate_partitions(n, n)
        for a, b in itertools.product(classes, classes):
            s = sum(sn_character(lam, a) * sn_character(lam, b) for lam in classes)
            assert s == (centralizer_order(a) if a == b else 0)


def test_row_orthogonality():
    n = 5
    classes = enumerate_partitions(n, n)
    for lam, mu in itertools.product(classes, classes):
        s = sum(math.factorial(n) // centralizer_order(c) * sn_character(lam, c) * sn_character(mu, c) for c in classes)
        assert s == (math.factorial(n) if lam == mu else 0)


def test_character_total_mismatch():
    with pytest.raises(ValueError):
        sn_character((2, 1), (2, 2))


def test_two_copy_projectors():
    sym = isotypic_projector((2,), 2)
    anti = isotypic_projector((1, 1), 2)
    assert np.trace(sym) == pytest.approx(3)
    assert np.trace(anti) == pytest.approx(1)
    swap = permutation_operator((1, 0), 2)
    np.testing.assert_allclose(sym, (np.eye(4) + swap) / 2, atol=1e-14)


def test_three_copy_traces():
    assert np.trace(isotypic_projector((3,), 2)) == pytest.approx(4)
    assert np.trace(isotypic_projector((2, 1), 2)) == pytest.approx(4)
    assert np.trace(isotypic_projector((1, 1, 1), 2)) == pytest.approx(0, abs=1e-14)


def test_projector_algebra_with_commutation(rng):
    rep = check_projector_algebra(2, 4, rng=rng, unitaries=20)
    assert rep.holds(1e-10), rep


def test_size_cap():
    with pytest.raises(ValueError):
        isotypic_projector((3, 3), 3)


def test_maximally_mixed_three_copies():
    rep = verify_schur_weyl_measure(np.eye(2) / 2, 3)
    assert rep.explicit[(3,)] == pytest.approx(0.5)
    assert rep.explicit[(2, 1)] == pytest.approx(0.5)
    assert rep.holds()


def test_pure_state_all_mass_on_row(rng):
    psi = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    for n in range(1, 6):
        rep = verify_schur_weyl_measure(pure_state(psi), n)
        assert rep.explicit[(n,)] == pytest.approx(1.0, abs=1e-12)
        assert rep.holds()


def test_random_states_agree(rng):
    for _ in range(5):
        rho = random_state(3, 2, rng)
        assert verify_schur_weyl_measure(rho, 4).holds(1e-10)
