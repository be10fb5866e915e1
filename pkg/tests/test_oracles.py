import math

import numpy as np
import pytest

from spincorr.core import CoherenceMatrix, PolarizationState
from spincorr.kernels import boson_kernel, fermion_G
from spincorr.oracles import (
    MAX_FOCK_MODES,
    MCConfig,
    ModeBasis,
    chaotic_weights,
    cholesky_psd,
    draw_field_components,
    fermion_mode_operators,
    fock_oracle_fermion,
    mc_oracle_boson,
)
from spincorr.partition import correlation_grouped


def random_basis(rng, n_modes, n_points):
    phi = (
        rng.standard_normal((n_modes, n_points)) + 1j * rng.standard_normal((n_modes, n_points))
    ) / math.sqrt(2.0)
    occ = rng.uniform(0.1, 0.9, n_modes)
    return ModeBasis(phi, occ)


def test_mode_operators_satisfy_car():
    ops = fermion_mode_operators(3)
    eye = np.eye(8)
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            anti_mixed = a @ b.conj().T + b.conj().T @ a
            expected = eye if i == j else 0.0 * eye
            assert np.abs(anti_mixed - expected).max() < 1e-14
            assert np.abs(a @ b + b @ a).max() < 1e-14


def test_chaotic_weights_reproduce_mean_occupations():
    occ = np.array([0.2, 0.7, 0.4])
    w = chaotic_weights(occ)
    assert w.sum() == pytest.approx(1.0)
    ops = fermion_mode_operators(3)
    for j, a in enumerate(ops):
        number_diag = np.diagonal(a.conj().T @ a).real
        assert w @ number_diag == pytest.approx(occ[j])


def test_fock_single_mode_examples():
    basis = ModeBasis(np.array([[1.0 + 0.0j]]), np.array([0.3]))
    assert fock_oracle_fermion(basis, [0]) == pytest.approx(0.3)
    # one mode seen at two points: a second detection is impossible
    basis2 = ModeBasis(np.array([[1.0 + 0.0j, 1.0 + 0.0j]]), np.array([0.3]))
    assert fock_oracle_fermion(basis2, [0, 1]) == pytest.approx(0.0, abs=1e-14)


def test_fock_matches_determinant_kernel():
    rng = np.random.default_rng(67)
    worst = 0.0
    for _ in range(25):
        n_modes = int(rng.integers(1, 7))
        k = int(rng.integers(1, min(3, n_modes) + 1))
        basis = random_basis(rng, n_modes, k)
        oracle = fock_oracle_fermion(basis, range(k))
        gamma, intens = basis.coherence()
        kernel = fermion_G(range(k), gamma, intens)
        worst = max(worst, abs(kernel - oracle) / (1.0 + abs(oracle)))
    assert worst <= 1e-10


def test_mode_basis_validation_and_coherence():
    rng = np.random.default_rng(83)
    with pytest.raises(ValueError):
        random_basis(rng, MAX_FOCK_MODES + 1, 1)
    with pytest.raises(ValueError):
        ModeBasis(np.ones((2, 2)), np.array([0.5, -0.1]))
    basis = random_basis(rng, 5, 4)
    gamma, intens = basis.coherence()
    assert np.all(np.diagonal(gamma.entries) == 1.0)
    assert np.all(intens > 0.0)
    c = basis.first_order_correlation()
    manual = sum(
        basis.occupations[j] * np.outer(basis.mode_functions[j], basis.mode_functions[j].conj())
        for j in range(5)
    )
    assert np.abs(c - manual).max() < 1e-12


def test_fock_order_cap_and_occupation_bound():
    rng = np.random.default_rng(71)
    basis = random_basis(rng, 4, 4)
    with pytest.raises(ValueError):
        fock_oracle_fermion(basis, [0, 1, 2, 3])
    boson_occ = ModeBasis(np.ones((1, 1)), np.array([2.5]))  # valid basis, not fermionic
    with pytest.raises(ValueError):
        fock_oracle_fermion(boson_occ, [0])


def test_mc_determinism():
    ones = CoherenceMatrix.full_coherence(2)
    pol = PolarizationState(0.6)
    a = mc_oracle_boson(pol, ones, None, 2, MCConfig(30000, 97, workers=1))
    b = mc_oracle_boson(pol, ones, None, 2, MCConfig(30000, 97, workers=1))
    assert a == b
    c = mc_oracle_boson(pol, ones, None, 2, MCConfig(30000, 97, workers=3))
    d = mc_oracle_boson(pol, ones, None, 2, MCConfig(30000, 97, workers=3))
    assert c == d
    assert a != mc_oracle_boson(pol, ones, None, 2, MCConfig(30000, 98, workers=1))


def test_mc_landmark_values():
    ones = CoherenceMatrix.full_coherence(2)
    est, se = mc_oracle_boson(PolarizationState(1.0), ones, None, 2, MCConfig(200000, 5))
    assert se > 0.0
    assert abs(est - 2.0) <= 3.0 * se
    est, se = mc_oracle_boson(PolarizationState(0.0), ones, None, 2, MCConfig(200000, 6))
    assert abs(est - 1.5) <= 3.0 * se


def test_mc_matches_grouped_closed_form():
    rng = np.random.default_rng(73)
    g = CoherenceMatrix.random(3, rng)
    pol = PolarizationState(0.6)
    closed = correlation_grouped(3, pol, boson_kernel(), g).value
    est, se = mc_oracle_boson(pol, g, None, 3, MCConfig(400000, 11, workers=2))
    assert abs(est - closed) <= 3.0 * se
    assert abs(est - closed) / closed <= 0.02


def test_mc_z_scores_across_seeded_trials():
    # the 3-sigma criterion should hold in at least 99 of 100 seeded trials
    rng = np.random.default_rng(79)
    fails = 0
    for trial in range(100):
        k = 2 + trial % 2
        g = CoherenceMatrix.random(k, rng)
        pol = PolarizationState(float(rng.uniform(0.0, 1.0)))
        closed = correlation_grouped(k, pol, boson_kernel(), g).value
        est, se = mc_oracle_boson(pol, g, None, k, MCConfig(20000, 1000 + trial))
        if abs(est - closed) > 3.0 * se:
            fails += 1
    assert fails <= 1


def test_mc_standard_error_scaling():
    ones = CoherenceMatrix.full_coherence(2)
    pol = PolarizationState(0.5)
    _, se_small = mc_oracle_boson(pol, ones, None, 2, MCConfig(20000, 17))
    _, se_big = mc_oracle_boson(pol, ones, None, 2, MCConfig(200000, 17))
    assert abs(se_small / se_big - math.sqrt(10.0)) <= 0.2 * math.sqrt(10.0)


def test_mc_component_independence():
    rng = np.random.Generator(np.random.Philox(key=123))
    g = CoherenceMatrix.full_coherence(2)
    up, down = draw_field_components(PolarizationState(0.4), g, np.ones(2), 2, 50000, rng)
    n = up.shape[0]
    for i in range(2):
        for j in range(2):
            cross = up[:, i] * np.conj(down[:, j])
            se = float(cross.std()) / math.sqrt(n)
            assert abs(cross.mean()) <= 4.0 * se


def test_mc_component_covariances():
    rng = np.random.Generator(np.random.Philox(key=321))
    pol = PolarizationState(0.8)
    g = CoherenceMatrix([[1.0, 0.5], [0.5, 1.0]])
    up, down = draw_field_components(pol, g, np.ones(2), 2, 200000, rng)
    cov_up = (up.conj().T @ up) / up.shape[0]
    cov_down = (down.conj().T @ down) / down.shape[0]
    assert np.abs(cov_up - pol.rho1 * g.entries.T.conj()).max() < 0.02
    assert np.abs(cov_down - pol.rho2 * g.entries.T.conj()).max() < 0.02


def test_cholesky_jitter_on_singular_matrix():
    ones = np.ones((3, 3), dtype=complex)
    ch = cholesky_psd(ones)
    assert np.abs(ch @ ch.conj().T - ones).max() <= 1e-6
    with pytest.raises(ValueError):
        cholesky_psd(-np.eye(2, dtype=complex))


def test_mc_config_validation():
    with pytest.raises(ValueError):
        MCConfig(0, 1)
    with pytest.raises(ValueError):
        MCConfig(10, -1)
    with pytest.raises(ValueError):
        MCConfig(10, 1, workers=0)


def test_mc_order_cap():
    g = CoherenceMatrix.identity(7)
    with pytest.raises(ValueError):
        mc_oracle_boson(PolarizationState(0.5), g, None, 7, MCConfig(10, 1))
