"""Tests for norms, bound evaluators, the iteration lemma and the
layer-inequality ratio machinery."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hydrostat.errors import ConfigurationError
from hydrostat.estimates import (BoundParams, IterationInstance,
                                 certified_log_bounds, fit_constant,
                                 fit_envelope, fit_l4_growth_c,
                                 fit_sup_envelope_c0, growth_envelope,
                                 iteration_base, iteration_weight,
                                 iteration_weight_integral,
                                 ladyzhenskaya_ratio, moser_bound_check,
                                 norms, perturbation_response,
                                 random_instance, saturated_instance,
                                 sup_norm_envelope)
from hydrostat.spectral import (Grid, PhysicalField, dealias,
                                field_from_function, l2_lattice_norm, l2_norm,
                                to_physical, to_spectral, zero_field)

H = 0.5


@pytest.fixture(scope="module")
def grid():
    return Grid.make(16, 16, 16, H)


class TestNorms:
    def test_zero_field(self, grid):
        rec = norms(zero_field(grid, 2), t=1.0)
        assert rec.l2 == rec.l4 == rec.l6 == rec.linf == rec.grad_l2 == 0.0

    def test_constant_field(self, grid):
        c = 1.7
        f = field_from_function(grid, lambda X, Y, Z: c + 0 * X)
        rec = norms(f, qs=(8,))
        vol = 2 * H
        assert rec.l2 == pytest.approx(c * vol ** 0.5, rel=1e-12)
        assert rec.l4 == pytest.approx(c * vol ** 0.25, rel=1e-12)
        assert rec.l6 == pytest.approx(c * vol ** (1 / 6), rel=1e-12)
        assert rec.lq[8.0] == pytest.approx(c * vol ** 0.125, rel=1e-12)
        assert rec.linf == pytest.approx(c, rel=1e-12)

    def test_cosine_l2(self, grid):
        f = field_from_function(grid, lambda X, Y, Z: np.cos(2 * np.pi * X))
        assert l2_norm(f) ** 2 == pytest.approx(H, rel=1e-12)

    def test_parseval_vs_lattice(self, grid):
        rng = np.random.default_rng(0)
        f = dealias(to_spectral(PhysicalField(
            grid, rng.standard_normal((2,) + grid.physical_shape))))
        assert l2_norm(f) == pytest.approx(l2_lattice_norm(to_physical(f)),
                                           rel=1e-12)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_volume_normalized_lq_monotone(self, seed):
        """|Omega|^(-1/q) ||v||_q is nondecreasing in q (Jensen)."""
        grid = Grid.make(8, 8, 8, H)
        rng = np.random.default_rng(seed)
        f = dealias(to_spectral(PhysicalField(
            grid, rng.standard_normal((1,) + grid.physical_shape))))
        rec = norms(f, qs=(3, 8, 12))
        vol = grid.volume
        order = [rec.l2 * vol ** (-1 / 2), rec.lq[3.0] * vol ** (-1 / 3),
                 rec.l4 * vol ** (-1 / 4), rec.l6 * vol ** (-1 / 6),
                 rec.lq[8.0] * vol ** (-1 / 8), rec.lq[12.0] * vol ** (-1 / 12),
                 rec.linf]                      # q = 2, 3, 4, 6, 8, 12, inf
        for lo, hi in zip(order, order[1:]):
            assert lo <= hi * (1 + 1e-9)


class TestBoundEvaluators:
    def test_envelope_at_origin(self):
        p = BoundParams(c0=1.0)
        assert sup_norm_envelope(0.0, 0.0, p) == pytest.approx(np.e, rel=1e-14)

    def test_envelope_monotone_in_time_and_data(self):
        p = BoundParams()
        t = np.linspace(0.0, 2.0, 50)
        vals = sup_norm_envelope(t, 0.3, p)
        assert np.all(np.diff(vals) > 0)
        assert sup_norm_envelope(1.0, 0.6, p) > sup_norm_envelope(1.0, 0.3, p)
        assert growth_envelope(1.0, 0.3, 2.0) > growth_envelope(1.0, 0.3, 1.0)

    def test_perturbation_response_vanishes_at_zero(self):
        assert perturbation_response(0.0, 1.0, H, BoundParams()) == 0.0

    def test_perturbation_response_continuous_near_zero(self):
        """rho is increasing and tends to zero with s (steeply: the
        prefactor is ~(1+||v0||_4)^40 e^{(1+||v0||_4)^4})."""
        p = BoundParams()
        s = np.logspace(-30, -1, 40)
        vals = perturbation_response(s, 1.0, H, p)
        assert np.all(np.diff(vals) > 0)
        assert vals[0] < 1e-9

    def test_iteration_base_at_least_two(self):
        p = BoundParams()
        for t in (0.0, 0.5, 1.0):
            s1 = iteration_weight_integral(t, 1.0, p)
            assert iteration_base(t, s1, H, p) >= 2.0

    def test_iteration_weight_integral_matches_closed_form_at_zero(self):
        p = BoundParams()
        assert iteration_weight_integral(0.0, 1.0, p) == 0.0
        # integrand at t=0 equals the closed form
        assert iteration_weight(0.0, 0.0, p) == pytest.approx(np.exp(20.0), rel=1e-12)

    def test_invalid_constants_rejected(self):
        with pytest.raises(ConfigurationError):
            BoundParams(c0=0.0)


class TestMoserIteration:
    def test_first_certified_bound_collapses(self):
        """a_1 = M0 * delta0^2 exactly."""
        m0, d0 = 3.7, 0.42
        log_a = certified_log_bounds(m0, d0, 5)
        assert log_a[0] == pytest.approx(np.log(m0) + 2 * np.log(d0), abs=1e-12)

    def test_exponent_inequality(self):
        """4*2^k - (k+3) >= 3k+1 for k = 1..60, in exact integers."""
        for k in range(1, 61):
            assert 4 * 2 ** k - (k + 3) >= 3 * k + 1

    def test_saturated_sequences_certified(self):
        inst = saturated_instance(2.0, 0.1, 40)
        verdict = moser_bound_check(inst)
        assert verdict.ok
        assert verdict.first_violation is None

    @given(seed=st.integers(0, 100_000))
    @settings(max_examples=100, deadline=None)
    def test_random_hypothesis_satisfying_instances_pass(self, seed):
        rng = np.random.default_rng(seed)
        verdict = moser_bound_check(random_instance(rng))
        assert verdict.ok

    def test_hypothesis_violation_detected(self):
        inst = IterationInstance(2.0, 0.5, np.array([np.log(2.0 * 0.25) + 1.0]))
        verdict = moser_bound_check(inst)
        assert verdict.status == "hypothesis-violated"
        assert verdict.first_violation == 1

    def test_from_values_round_trip(self):
        inst = IterationInstance.from_values(2.0, 0.5, [0.4, 0.3])
        assert inst.log_terms[0] == pytest.approx(np.log(0.4))
        verdict = moser_bound_check(inst)
        assert verdict.status in ("ok", "hypothesis-violated", "bound-violated")

    def test_base_below_two_rejected(self):
        with pytest.raises(ConfigurationError):
            IterationInstance(1.5, 0.5, np.array([0.0]))


class TestLadyzhenskayaRatio:
    def test_constant_fields_ratio_one(self, grid):
        """At 2h = 1 both sides collapse to 1 for unit constants."""
        one = field_from_function(grid, lambda X, Y, Z: 1.0 + 0 * X)
        r = ladyzhenskaya_ratio(one, one, one)
        assert abs(r.ratio1 - 1.0) <= 1e-12
        assert abs(r.ratio2 - 1.0) <= 1e-12
        assert r.lhs == pytest.approx(4 * H * H, rel=1e-12)

    def test_zero_factor_gives_zero_lhs(self, grid):
        one = field_from_function(grid, lambda X, Y, Z: 1.0 + 0 * X)
        z = zero_field(grid, 1)
        r = ladyzhenskaya_ratio(z, one, one)
        assert r.lhs == 0.0
        assert r.ratio1 == 0.0

    def test_ensemble_ratios_bounded(self, grid):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(25):
            fields = []
            for _ in range(3):
                vals = rng.standard_normal((1,) + grid.physical_shape)
                fields.append(dealias(to_spectral(PhysicalField(grid, vals))))
            r = ladyzhenskaya_ratio(*fields)
            assert np.isfinite(r.ratio1) and np.isfinite(r.ratio2)
            worst = max(worst, r.ratio1, r.ratio2)
        assert worst < 10.0

    def test_vector_input_rejected(self, grid):
        v = zero_field(grid, 2)
        one = field_from_function(grid, lambda X, Y, Z: 1.0 + 0 * X)
        with pytest.raises(ConfigurationError):
            ladyzhenskaya_ratio(v, one, one)


class TestEnvelopeFitting:
    def test_constant_form_returns_max(self):
        assert fit_constant([1.0, 3.0, 2.0]) == 3.0

    def test_empty_series_rejected(self):
        with pytest.raises(ConfigurationError):
            fit_constant([])
        with pytest.raises(ConfigurationError):
            fit_sup_envelope_c0([], [], 1.0, 1.0)

    def test_sup_envelope_fit_dominates(self):
        t = np.linspace(0.0, 0.5, 20)
        measured = 0.3 * (1.0 + 0.5 * t)          # gentle growth
        c0 = fit_sup_envelope_c0(t, measured, measured[0], v0_l4=0.4)
        envelope = growth_envelope(t, 0.4, c0) * measured[0]
        assert np.all(envelope >= measured * (1 - 1e-9))
        # and it is minimal: slightly smaller constant fails somewhere
        smaller = growth_envelope(t, 0.4, c0 * 0.95) * measured[0]
        assert np.any(smaller < measured)

    def test_l4_growth_fit_finite(self):
        t = np.linspace(0.0, 0.5, 20)
        l4 = 2.0 * np.exp(-3.0 * t) + 0.5
        c = fit_l4_growth_c(t, l4, v0_l2=1.0, v0_l4=l4[0])
        assert np.isfinite(c) and c >= 0.0

    def test_dispatcher(self):
        assert fit_envelope("constant", None, [2.0, 5.0]) == 5.0
        with pytest.raises(ConfigurationError):
            fit_envelope("no-such-form", None, [1.0])
