"""Carre-du-champ builders, axiomatic checks, conditional complete
negativity, amplification, and the commutative classification."""
import numpy as np
import pytest

import nca
from nca.errors import InputError

from conftest import K3_C, seeded_generators


# -- gamma_from_generator ------------------------------------------------


def test_generator_zero_gives_zero_form(m2):
    gamma = nca.gamma_from_generator(nca.SuperOperator.zero(m2))
    assert gamma.magnitude() == 0


def test_generator_requires_unit_annihilation(m2):
    with pytest.raises(InputError):
        nca.gamma_from_generator(nca.SuperOperator.identity(m2))


def test_network_generator_reproduces_network_form():
    alg = nca.build_algebra([1, 1, 1], [1.0] * 3)
    lap = nca.SuperOperator(alg, np.diag(K3_C.sum(axis=1)) - K3_C)
    via_generator = nca.gamma_from_generator(lap, scale=0.5)
    direct = nca.network_cdc(alg, K3_C, scale=0.5)
    assert np.abs(via_generator.gram - direct.gram).max() < 1e-12


def test_double_commutator_value(m2):
    e11 = m2.basis_element(0)
    n = nca.double_commutator_generator(m2, [m2.basis_element(1)])
    gamma = nca.gamma_from_generator(n, scale=1.0)
    assert gamma.value(e11, e11).distance(m2.identity()) < 1e-12


def test_lindblad_generator_matches_commutator_form(m2):
    rng = np.random.default_rng(31)
    vs = [nca.random_element(m2, rng) for _ in range(2)]
    via_generator = nca.gamma_from_generator(nca.lindblad_generator(m2, vs), scale=1.0)
    direct = nca.commutator_cdc(vs)
    assert np.abs(via_generator.gram - direct.gram).max() < 1e-10 * (1 + direct.magnitude())


def test_generator_invariant_under_inner_derivations(m2):
    rng = np.random.default_rng(37)
    n = nca.lindblad_generator(m2, [nca.random_element(m2, rng)])
    w = nca.random_element(m2, rng)
    derivation = nca.left_multiplication(m2, w) - nca.right_multiplication(m2, w)
    shifted = nca.gamma_from_generator(n + derivation)
    base = nca.gamma_from_generator(n)
    assert np.abs(shifted.gram - base.gram).max() < 1e-10 * (1 + base.magnitude())


def test_symmetry_iff_sharp_difference_is_derivation(m2):
    rng = np.random.default_rng(41)
    # a Lindblad sum: N - N# = [[v*, v], .] is an inner derivation -> symmetric
    n_good = nca.lindblad_generator(m2, [nca.random_element(m2, rng)])
    assert nca.is_cdc(nca.gamma_from_generator(n_good)).symmetric

    # a generic unit-annihilating map: the difference fails the Leibniz rule
    mat = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    one = m2.to_coords(m2.identity())
    mat -= np.outer(mat @ one, one.conj()) / (one.conj() @ one)
    n_bad = nca.SuperOperator(m2, mat)
    report = nca.is_cdc(nca.gamma_from_generator(n_bad))
    diff = n_bad - n_bad.sharp()
    leibniz_gap = 0.0
    for i in range(m2.dim):
        for j in range(m2.dim):
            a, b = m2.basis_element(i), m2.basis_element(j)
            lhs = diff.apply(a * b)
            rhs = diff.apply(a) * b + a * diff.apply(b)
            leibniz_gap = max(leibniz_gap, lhs.distance(rhs))
    assert not report.symmetric and leibniz_gap > 1e-6
    assert report.witness is not None and report.witness["kind"] == "symmetry"


# -- commutator and group-action forms ------------------------------------


def test_commutator_central_vanishes(m2):
    gamma = nca.commutator_cdc([m2.identity()])
    assert gamma.magnitude() == 0


def test_commutator_basic_value(m2):
    e11, e12, _, e22 = (m2.basis_element(i) for i in range(4))
    gamma = nca.commutator_cdc([e12])
    assert gamma.value(e11, e11).distance(e22) == 0
    assert gamma.unit_residual() == 0


def test_group_action_swap_value():
    c2 = nca.build_algebra([1, 1], [1.0, 1.0])
    swap = nca.permutation_superop(c2, [1, 0])
    gamma = nca.group_action_cdc([swap], [1.0])
    f = c2.element([[[1.0]], [[0.0]]])
    vals = gamma.value(f, f)
    assert vals.data[0][0, 0] == pytest.approx(1.0)
    assert vals.data[1][0, 0] == pytest.approx(1.0)
    assert gamma.unit_residual() == 0


def test_group_action_trivial_action_gives_zero():
    c2 = nca.build_algebra([1, 1], [1.0, 1.0])
    ident = nca.permutation_superop(c2, [0, 1])
    assert nca.group_action_cdc([ident], [3.0]).magnitude() == 0


def test_group_action_rejects_non_automorphism(m2):
    rng = np.random.default_rng(43)
    mat = rng.standard_normal((4, 4))
    with pytest.raises(InputError):
        nca.group_action_cdc([nca.SuperOperator(m2, mat)], [1.0])


def test_group_action_conjugation_on_m2(m2):
    theta = 0.3
    u = m2.element([np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])])
    alpha = nca.conjugation_superop(m2, u)
    gamma = nca.group_action_cdc([alpha], [2.0])
    assert nca.is_cdc(gamma).is_cdc


# -- spectral triple ------------------------------------------------------


def test_spectral_triple_commuting_operator_gives_zero():
    alg = nca.build_algebra([1, 1], [0.5, 0.5])
    gamma = nca.spectral_triple_cdc(np.diag([1.0, 2.0]), alg)
    assert gamma.magnitude() == 0


def test_spectral_triple_two_point_metric_space():
    # two points at distance 1: Gamma(f, f)(x) = |f(x) - f(y)|^2
    alg = nca.build_algebra([1, 1], [0.5, 0.5])
    d_op = np.array([[0.0, 1.0], [1.0, 0.0]])
    gamma = nca.spectral_triple_cdc(d_op, alg)
    f = alg.element([[[1.0]], [[0.0]]])
    vals = gamma.value(f, f)
    assert vals.data[0][0, 0] == pytest.approx(1.0)
    assert vals.data[1][0, 0] == pytest.approx(1.0)
    assert gamma.unit_residual() == 0


def test_spectral_triple_rejects_non_hermitian():
    alg = nca.build_algebra([1, 1], [0.5, 0.5])
    with pytest.raises(InputError):
        nca.spectral_triple_cdc(np.array([[0.0, 1.0], [0.0, 0.0]]), alg)


# -- network forms and the classification ---------------------------------


def test_network_zero_is_zero():
    alg = nca.build_algebra([1] * 3, [1.0] * 3)
    assert nca.network_cdc(alg, np.zeros((3, 3))).magnitude() == 0


def test_network_k3_values():
    alg = nca.build_algebra([1] * 3, [1.0] * 3)
    gamma = nca.network_cdc(alg, K3_C, scale=1.0)
    d1 = alg.basis_element(0)
    vals = [gamma.value(d1, d1).data[i][0, 0].real for i in range(3)]
    assert vals == pytest.approx([2.0, 1.0, 1.0])
    assert gamma.unit_residual() == 0


def test_network_requires_commutative(m2):
    with pytest.raises(InputError):
        nca.network_cdc(m2, np.zeros((4, 4)))


def test_conductance_roundtrip_seeded():
    rng = np.random.default_rng(47)
    for size in (3, 4, 5):
        alg = nca.build_algebra([1] * size, [1.0] * size)
        c = rng.uniform(0.0, 2.0, (size, size))
        np.fill_diagonal(c, 0.0)  # no symmetry required for the bijection
        gamma = nca.network_cdc(alg, c, scale=0.5)
        assert np.abs(nca.conductances_from_cdc(gamma) - c).max() < 1e-10
        assert nca.is_cdc(gamma).is_cdc


def test_negative_conductance_fails_positivity():
    alg = nca.build_algebra([1] * 3, [1.0] * 3)
    c = K3_C.copy()
    c[0, 1] = c[1, 0] = -0.5
    gamma = nca.network_cdc(alg, c, scale=0.5, allow_negative=True)
    report = nca.is_cdc(gamma)
    assert report.symmetric and report.star_representation
    assert not report.completely_positive
    assert report.witness["kind"] == "negative-direction"


def test_commutative_forms_are_real():
    rng = np.random.default_rng(53)
    alg = nca.build_algebra([1] * 4, [1.0] * 4)
    c = rng.uniform(0.0, 1.0, (4, 4))
    np.fill_diagonal(c, 0.0)
    gamma = nca.network_cdc(alg, c, scale=0.5)
    # Gamma(f*, g*) = Gamma(g, f) entrywise over the basis
    adj = alg.adj_table
    assert np.abs(gamma.gram[np.ix_(adj, adj)] - gamma.gram.transpose(1, 0, 2, 3)).max() < 1e-10
    assert nca.reality_checks(gamma)["tau_real"]


# -- conditional complete negativity ---------------------------------------


def test_ccn_examples(m2):
    alg = nca.build_algebra([1] * 3, [1.0] * 3)
    lap = nca.SuperOperator(alg, np.diag(K3_C.sum(axis=1)) - K3_C)
    assert nca.ccn_check(lap)

    rng = np.random.default_rng(59)
    n_v = nca.lindblad_generator(m2, [nca.random_element(m2, rng)])
    assert nca.ccn_check(n_v)

    c = K3_C.copy()
    c[0, 1] = c[1, 0] = -0.5
    bad = nca.SuperOperator(alg, np.diag(c.sum(axis=1)) - c)
    assert not nca.ccn_check(bad)


def test_ccn_agrees_with_complete_positivity():
    for kind, gen in seeded_generators():
        gamma = nca.gamma_from_generator(gen)
        report = nca.is_cdc(gamma)
        assert nca.ccn_check(gen) == report.completely_positive, kind


# -- amplification ----------------------------------------------------------


def test_amplify_identity_order_one(m2):
    gamma = nca.commutator_cdc([m2.basis_element(1)])
    assert nca.amplify_cdc(gamma, 1) is gamma


def test_amplified_form_is_cdc(m2):
    gamma = nca.commutator_cdc([m2.basis_element(1)])
    big = nca.amplify_cdc(gamma, 2)
    assert big.algebra.blocks == (4,)
    report = nca.is_cdc(big)
    assert report.is_cdc
    assert big.unit_residual() < 1e-12


def test_amplified_values_match_entrywise_rule(m2):
    # (Gamma_n(A, B))_{jk} = sum_p Gamma(a_pj, b_pk) on seeded matrices
    rng = np.random.default_rng(61)
    gamma = nca.commutator_cdc([nca.random_element(m2, rng)])
    big = nca.amplify_cdc(gamma, 2)
    grid_a = [[nca.random_element(m2, rng) for _ in range(2)] for _ in range(2)]
    grid_b = [[nca.random_element(m2, rng) for _ in range(2)] for _ in range(2)]
    a = nca.from_cells(m2, 2, grid_a)
    b = nca.from_cells(m2, 2, grid_b)
    value = big.value(a, b)
    cells = nca.to_cells(m2, 2, value)
    for j in range(2):
        for k in range(2):
            expected = m2.zero()
            for p in range(2):
                expected = expected + gamma.value(grid_a[p][j], grid_b[p][k])
            assert cells[j][k].distance(expected) < 1e-9 * (1 + expected.norm())


def test_catalog_examples_are_cdc(catalog):
    for ex in catalog:
        report = nca.is_cdc(ex.gamma)
        assert report.is_cdc, (ex.name, report.residuals)
        assert nca.reality_checks(ex.gamma)["tau_real"] == ex.tau_real, ex.name
