import numpy as np
import pytest

from spincorr.core import CoherenceMatrix, PolarizationState, Statistics
from spincorr.kernels import boson_kernel, custom_kernel, fermion_kernel
from spincorr.partition import (
    MAX_PARTITION_ORDER,
    Method,
    correlation_enumeration,
    correlation_grouped,
    partition_terms,
    two_particle_closed_form,
    weight_factor,
)


def test_partition_terms_normalization_and_counts():
    pol = PolarizationState(0.37)
    terms = list(partition_terms(5, pol))
    assert len(terms) == 32
    assert sum(t.weight for t in terms) == pytest.approx(1.0, abs=1e-12)
    for t in terms:
        assert t.n1 == len(t.subset_up)
        assert t.n1 + t.n2 == 5
        assert t.weight == pytest.approx(pol.rho1**t.n1 * pol.rho2**t.n2, rel=1e-15)


def test_k1_polarization_drops_out():
    g = CoherenceMatrix.identity(1)
    for p in (0.0, 0.3, 1.0):
        r = correlation_enumeration(1, PolarizationState(p), fermion_kernel(), g)
        assert r.value == pytest.approx(1.0, rel=1e-14)
        assert r.term_count == 2
        assert r.statistics is Statistics.FERMION


def test_two_point_weighted_average_structure():
    rng = np.random.default_rng(41)
    g = CoherenceMatrix.random(2, rng)
    pol = PolarizationState(0.45)
    kern = fermion_kernel()
    g12 = kern.evaluate([0, 1], g)
    expected = (pol.rho1**2 + pol.rho2**2) * g12 + 2.0 * pol.rho1 * pol.rho2 * 1.0
    assert correlation_enumeration(2, pol, kern, g).value == pytest.approx(expected, rel=1e-13)


def test_grouped_equals_enumeration_randomized():
    rng = np.random.default_rng(43)
    kernels = [
        fermion_kernel(),
        boson_kernel(),
        custom_kernel(lambda s, g, i: 0.8 ** len(s)),
    ]
    for trial in range(40):
        k = int(rng.integers(1, 7))
        g = CoherenceMatrix.random(k, rng)
        pol = PolarizationState(float(rng.uniform(0.0, 1.0)))
        kern = kernels[trial % 3]
        a = correlation_enumeration(k, pol, kern, g)
        b = correlation_grouped(k, pol, kern, g)
        assert abs(a.value - b.value) <= 1e-12 * max(1.0, abs(a.value))
        assert a.term_count == 2**k
        assert b.term_count == 2 ** (k - 1)
        assert a.method is Method.ENUMERATION
        assert b.method is Method.GROUPED


def test_polarized_limit_reduces_to_full_kernel():
    rng = np.random.default_rng(47)
    g = CoherenceMatrix.random(4, rng)
    kern = fermion_kernel()
    full = kern.evaluate(range(4), g)
    assert correlation_grouped(4, PolarizationState(1.0), kern, g).value == full
    assert correlation_enumeration(4, PolarizationState(1.0), kern, g).value == full


def test_zero_coherence_limit():
    g = CoherenceMatrix.identity(5)
    intens = [1.1, 0.9, 1.3, 0.7, 1.0]
    expected = float(np.prod(intens))
    for kern in (fermion_kernel(), boson_kernel()):
        for p in (0.0, 0.6, 1.0):
            r = correlation_grouped(5, PolarizationState(p), kern, g, intens)
            assert r.value == pytest.approx(expected, rel=1e-12)


def test_engine_permutation_symmetry():
    # relabeling detection points permutes gamma rows/columns; O is unchanged
    rng = np.random.default_rng(53)
    g = CoherenceMatrix.random(4, rng)
    pol = PolarizationState(0.42)
    base = correlation_grouped(4, pol, boson_kernel(), g).value
    for _ in range(5):
        perm = rng.permutation(4)
        gp = CoherenceMatrix(g.entries[np.ix_(perm, perm)])
        assert correlation_grouped(4, pol, boson_kernel(), gp).value == pytest.approx(
            base, rel=1e-12
        )


def test_synthetic_kernel_binomial_identity():
    c = 0.77
    kern = custom_kernel(lambda s, g, i: c ** len(s))
    g = CoherenceMatrix.identity(6)
    for p in (0.0, 0.31, 1.0):
        r = correlation_enumeration(6, PolarizationState(p), kern, g)
        assert r.value == pytest.approx(c**6, rel=1e-12)


def test_grouped_coefficient_normalization():
    # constant-1 kernel exposes the bare coefficient sum
    kern = custom_kernel(lambda s, g, i: 1.0)
    g = CoherenceMatrix.identity(7)
    r = correlation_grouped(7, PolarizationState(0.68), kern, g)
    assert r.value == pytest.approx(1.0, abs=1e-12)


def test_two_particle_closed_form_landmarks():
    assert two_particle_closed_form(PolarizationState(1.0), 1.0) == pytest.approx(0.0, abs=1e-14)
    assert two_particle_closed_form(PolarizationState(0.0), 1.0) == pytest.approx(0.5)
    boson = two_particle_closed_form(PolarizationState(0.0), 1.0, statistics=Statistics.BOSON)
    assert boson == pytest.approx(1.5)
    assert two_particle_closed_form(PolarizationState(0.7), 0.5) == pytest.approx(0.6275)
    scaled = two_particle_closed_form(PolarizationState(0.0), 1.0, 2.0, 3.0)
    assert scaled == pytest.approx(3.0)


def test_two_particle_closed_form_matches_engine():
    rng = np.random.default_rng(59)
    for _ in range(20):
        g = CoherenceMatrix.random(2, rng)
        pol = PolarizationState(float(rng.uniform(0.0, 1.0)))
        mod2 = abs(g.entries[0, 1]) ** 2
        pairs = ((fermion_kernel(), Statistics.FERMION), (boson_kernel(), Statistics.BOSON))
        for kern, stats in pairs:
            closed = two_particle_closed_form(pol, mod2, 1.0, 1.0, stats)
            engine = correlation_grouped(2, pol, kern, g).value
            assert engine == pytest.approx(closed, rel=1e-12, abs=1e-12)


def test_weight_factor_values_and_monotonicity():
    assert weight_factor(10, 0.7) == pytest.approx(0.1969, abs=1e-4)
    assert weight_factor(10, 1.0) == 1.0
    assert weight_factor(10, 0.0) == 2.0**-9
    assert weight_factor(2, 0.0) == 0.5
    grid = np.linspace(0.0, 1.0, 1000)
    vals = [weight_factor(7, float(p)) for p in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(2.0**-6)
    assert vals[-1] == 1.0


def test_value_nonnegative_for_psd_inputs():
    rng = np.random.default_rng(61)
    for _ in range(30):
        k = int(rng.integers(1, 6))
        g = CoherenceMatrix.random(k, rng)
        pol = PolarizationState(float(rng.uniform(0.0, 1.0)))
        for kern in (fermion_kernel(), boson_kernel()):
            assert correlation_grouped(k, pol, kern, g).value >= -1e-10


def test_size_and_domain_errors():
    g = CoherenceMatrix.identity(2)
    pol = PolarizationState(0.5)
    with pytest.raises(ValueError):
        correlation_enumeration(0, pol, fermion_kernel(), g)
    with pytest.raises(ValueError):
        correlation_enumeration(3, pol, fermion_kernel(), g)  # order exceeds matrix
    big = CoherenceMatrix.identity(MAX_PARTITION_ORDER + 1)
    with pytest.raises(ValueError):
        correlation_enumeration(MAX_PARTITION_ORDER + 1, pol, fermion_kernel(), big)
    with pytest.raises(ValueError):
        two_particle_closed_form(pol, 1.5)
    with pytest.raises(ValueError):
        two_particle_closed_form(pol, 0.5, -1.0)
    with pytest.raises(ValueError):
        weight_factor(0, 0.5)
