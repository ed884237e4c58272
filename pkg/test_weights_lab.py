"""Tests for weights, characteristics, weighted norms, exponent arithmetic and operator norms"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from rlplab.core import ValidationException, settings
from rlplab.schemas import Signal, Weight
from rlplab.services import (
    FrequencyFamilyService,
    OpNormService,
    SignalService,
    SquareFunctionService,
    WeightsService,
)


class TestWeights:
    def test_power_weight_floor(self):
        w = WeightsService.power_weight(-0.5, 3, 16)
        assert w.array[3] == pytest.approx((1 / 16) ** -0.5)
        assert w.array[3] == w.array.max()

    def test_step_weight(self):
        w = WeightsService.step_weight([1.0, 4.0], 16)
        np.testing.assert_array_equal(w.array, [1.0] * 8 + [4.0] * 8)

    def test_step_weight_too_many_levels(self):
        with pytest.raises(ValidationException):
            WeightsService.step_weight([1.0] * 17, 16)

    @pytest.mark.parametrize("spec", ["power:0.5@3", "constant:2", "step:1,2,3,4"])
    def test_parse(self, spec):
        assert WeightsService.parse_weight(spec, 16).n == 16

    @pytest.mark.parametrize("spec", ["bogus:1", "power:abc", "step:", "constant:-1"])
    def test_parse_rejects(self, spec):
        with pytest.raises(ValidationException):
            WeightsService.parse_weight(spec, 16)

    def test_parse_file(self, tmp_path):
        from rlplab.utils.codecs import write_signal

        path = str(tmp_path / "w.txt")
        write_signal(path, Signal(samples=np.linspace(1.0, 2.0, 16)))
        assert WeightsService.parse_weight(f"file:{path}", 16).array[-1] == pytest.approx(2.0)
        with pytest.raises(ValidationException):
            WeightsService.parse_weight(f"file:{path}", 32)


class TestCharacteristics:
    def test_constant_weight(self):
        chars = WeightsService.characteristics(Weight.from_array(np.full(32, 3.0)), [1.5, 2.0, 4.0])
        assert chars.a1 == pytest.approx(1.0)
        assert chars.ainfty == pytest.approx(1.0)
        for value in chars.ap.values():
            assert value == pytest.approx(1.0)
        assert chars.exact

    @pytest.mark.parametrize("a", [-0.6, 0.4])
    def test_power_weight_against_brute_force(self, a):
        w = WeightsService.power_weight(a, 5, 16)
        fast = WeightsService.characteristics(w, [1.5, 3.0])
        slow = WeightsService.brute_force_characteristics(WeightsService.power_weight(a, 5, 16), [1.5, 3.0])
        assert fast.a1 == pytest.approx(slow.a1, rel=1e-12)
        assert fast.ainfty == pytest.approx(slow.ainfty, rel=1e-12)
        for key, value in slow.ap.items():
            assert fast.ap[key] == pytest.approx(value, rel=1e-12)

    @hsettings(max_examples=15, deadline=None)
    @given(st.lists(st.floats(min_value=0.5, max_value=20.0), min_size=2, max_size=8))
    def test_step_weights_against_brute_force(self, levels):
        fast = WeightsService.characteristics(WeightsService.step_weight(levels, 16), [2.0])
        slow = WeightsService.brute_force_characteristics(WeightsService.step_weight(levels, 16), [2.0])
        assert fast.a1 == pytest.approx(slow.a1, rel=1e-12)
        assert fast.ainfty == pytest.approx(slow.ainfty, rel=1e-12)
        assert fast.ap["2.0"] == pytest.approx(slow.ap["2.0"], rel=1e-12)

    def test_ordering(self):
        w = WeightsService.power_weight(-0.4, 0, 32)
        chars = WeightsService.characteristics(w, [2.0, 4.0])
        assert chars.ap["4.0"] <= chars.ap["2.0"] * (1 + 1e-12)
        assert chars.ap["2.0"] <= chars.a1 * (1 + 1e-12)

    def test_dyadic_fallback(self, monkeypatch):
        from rlplab.core import settings

        w = WeightsService.power_weight(-0.4, 0, 32)
        monkeypatch.setattr(settings, "EXACT_AINFTY_LIMIT", 16)
        assert WeightsService.ainfty_characteristic(w) == pytest.approx(
            WeightsService.dyadic_ainfty_characteristic(w)
        )

    def test_ap_needs_p_above_one(self):
        with pytest.raises(ValidationException):
            WeightsService.ap_characteristic(Weight.from_array(np.ones(16)), 1.0)

    @hsettings(max_examples=15, deadline=None)
    @given(
        st.lists(st.floats(min_value=0.5, max_value=20.0), min_size=2, max_size=8),
        st.integers(min_value=1, max_value=15),
        st.floats(min_value=0.01, max_value=100.0),
    )
    def test_invariant_under_translation_and_scaling(self, levels, shift, factor):
        w = WeightsService.step_weight(levels, 16)
        base = WeightsService.characteristics(w, [1.5, 3.0])
        moved = WeightsService.characteristics(Weight.from_array(np.roll(w.array, shift)), [1.5, 3.0])
        scaled = WeightsService.characteristics(WeightsService.step_weight(levels, 16).scaled(factor), [1.5, 3.0])
        for other in (moved, scaled):
            assert other.a1 == pytest.approx(base.a1, rel=1e-9)
            assert other.ainfty == pytest.approx(base.ainfty, rel=1e-9)
            for key, value in base.ap.items():
                assert other.ap[key] == pytest.approx(value, rel=1e-9)

    def test_ainfty_reads_each_interval_as_a_segment(self):
        # heavy cell at the end of the long interval starting at 0
        values = np.ones(16)
        values[14] = 50.0
        w = Weight.from_array(values)
        slow = WeightsService.brute_force_characteristics(Weight.from_array(values.copy()), [2.0])
        assert WeightsService.ainfty_characteristic(w) == pytest.approx(slow.ainfty, rel=1e-12)


class TestNorms:
    def test_weighted_norm_constant_weight(self, random_signal):
        from rlplab.services import SignalService

        f = random_signal(32)
        w = Weight.from_array(np.ones(32))
        assert WeightsService.weighted_lp_norm(f, w, 3) == pytest.approx(SignalService.lp_norm(f, 3))

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
    def test_weak_below_strong(self, random_signal, p):
        f = random_signal(64)
        w = WeightsService.power_weight(0.3, 7, 64)
        assert WeightsService.weak_norm(f, w, p) <= WeightsService.weighted_lp_norm(f, w, p) * (1 + 1e-12)

    def test_weak_norm_of_indicator(self):
        samples = np.zeros(16)
        samples[:4] = 1.0
        w = Weight.from_array(np.ones(16))
        assert WeightsService.weak_norm(Signal(samples=samples), w, 2) == pytest.approx(0.5)

    def test_rejects_small_p(self, random_signal):
        with pytest.raises(ValidationException):
            WeightsService.weak_norm(random_signal(16), Weight.from_array(np.ones(16)), 0.5)


class TestExponents:
    def test_formula_values(self):
        assert WeightsService.exponent_formula(3.0)[1] == 1.0
        assert WeightsService.exponent_formula(2.5)[1] == 2.0
        assert WeightsService.exponent_formula(4.0)[0] == 2.0

    def test_formula_with_finite_q0(self):
        phi, exponent = WeightsService.exponent_formula(3.0, 2.0, 6.0)
        assert phi == pytest.approx(2.0 * 0.5 + 1.0)
        assert exponent == pytest.approx(max(1.0, 5.0 / 3.0) / 2.0)

    @pytest.mark.parametrize("p", [2.0, 1.5])
    def test_formula_range(self, p):
        with pytest.raises(ValidationException):
            WeightsService.exponent_formula(p)

    def test_lacunary_bounds(self):
        assert WeightsService.lacunary_exponent_bounds(2.0) == pytest.approx((1.5, 1.5))
        assert WeightsService.lacunary_exponent_bounds(3.0) == pytest.approx((1.0, 1.25))

    def test_extrapolated_exponent(self):
        assert WeightsService.extrapolated_exponent(4.0, 2.0, 1.0) == 1.0
        assert WeightsService.extrapolated_exponent(1.5, 2.0, 1.0) == pytest.approx(2.0)
        with pytest.raises(ValidationException):
            WeightsService.extrapolated_exponent(1.0, 2.0, 1.0)

    def test_lower_bound(self):
        assert WeightsService.exponent_lower_bound(3.0, 2.0, math.inf, 0.5, 1.0) == pytest.approx(1.0)

    def test_weak_bound_formula(self):
        assert WeightsService.weak_bound_formula(2.0, 1.0, 1.0) == pytest.approx(math.log(math.e + 1.0))
        assert WeightsService.conjectured_weak_bound(1.0) == pytest.approx(math.log(math.e + 1.0))

    def test_fit_recovers_power_law(self):
        fit = WeightsService.fit_exponent([(x, 3.0 * x ** 1.5) for x in (1.0, 2.0, 4.0, 8.0, 16.0)])
        assert fit.slope == pytest.approx(1.5)
        assert fit.samples == 5
        assert fit.width == pytest.approx(0.0, abs=1e-9)

    def test_fit_needs_four_samples(self):
        with pytest.raises(ValidationException):
            WeightsService.fit_exponent([(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)])

    def test_fit_needs_distinct_characteristics(self):
        with pytest.raises(ValidationException):
            WeightsService.fit_exponent([(2.0, float(y)) for y in range(1, 5)])


class TestCongruent:
    def test_factorization(self, lacunary64):
        pieces = FrequencyFamilyService.halving_pieces(lacunary64)
        report = WeightsService.congruent_composition_check(
            lacunary64, pieces, Weight.from_array(np.ones(64)), trials=3, seed=5
        )
        assert report.factorization_error < 1e-12
        assert report.max_ratio <= 1.0 + 1e-12
        assert report.a1 == pytest.approx(1.0)
        assert len(report.ratios) == 3

    def test_needs_trials(self, lacunary64):
        with pytest.raises(ValidationException):
            WeightsService.congruent_composition_check(lacunary64, [1] * len(lacunary64), Weight.from_array(np.ones(64)), trials=0)


class TestOpNorm:
    def test_spike_ratio_for_unit_family(self):
        family = FrequencyFamilyService.make_unit(64)
        estimate = OpNormService.estimate_opnorm(family, Weight.from_array(np.ones(64)), 1.5, budget=4, seed=3)
        assert estimate.ratios[0] == pytest.approx(64 ** (1 / 6))
        assert estimate.lower_bound >= estimate.ratios[0]
        assert estimate.trials == 1 + 1 + 4 + settings.REFINED_CANDIDATES

    def test_dual_spike_bound(self, lacunary64):
        p = 8.0
        dual = p / (p - 1.0)
        delta = np.zeros(64, dtype=np.complex128)
        delta[0] = 1.0
        spike = Signal(samples=delta)
        floor = max(
            SignalService.lp_norm(SquareFunctionService.project(spike, omega), dual) / SignalService.lp_norm(spike, dual)
            for omega in lacunary64.intervals
        )
        estimate = OpNormService.estimate_opnorm(lacunary64, Weight.from_array(np.ones(64)), p, budget=2, seed=0)
        assert floor > 1.0
        assert estimate.lower_bound >= floor * (1 - 1e-9)
        assert estimate.witness_kind in {"dual-spike", "power"}

    def test_power_iteration_never_loses(self, lacunary64, random_signal):
        w = WeightsService.power_weight(0.3, 0, 64)
        f = random_signal(64)
        start = OpNormService.ratio(f, lacunary64, w, 4.0, "strong")
        value, witness = OpNormService.power_iteration(f, lacunary64, w, 4.0, steps=5)
        assert value >= start
        assert value == pytest.approx(OpNormService.ratio(witness, lacunary64, w, 4.0, "strong"), rel=1e-12)

    def test_power_iteration_skips_endpoints(self, lacunary64, random_signal):
        f = random_signal(64)
        value, witness = OpNormService.power_iteration(f, lacunary64, Weight.from_array(np.ones(64)), 1.0)
        assert witness is f
        assert value == pytest.approx(OpNormService.ratio(f, lacunary64, Weight.from_array(np.ones(64)), 1.0, "strong"))

    def test_partition_family_is_isometric_at_two(self):
        family = FrequencyFamilyService.make_partition(32)
        estimate = OpNormService.estimate_opnorm(family, Weight.from_array(np.ones(32)), 2.0, budget=8, seed=1)
        assert estimate.lower_bound == pytest.approx(1.0)

    def test_weak_mode(self, lacunary64):
        w = WeightsService.power_weight(0.3, 0, 64)
        strong = OpNormService.estimate_opnorm(lacunary64, w, 2.0, "strong", budget=4, seed=2)
        weak = OpNormService.estimate_opnorm(lacunary64, w, 2.0, "weak", budget=4, seed=2)
        assert weak.lower_bound <= strong.lower_bound * (1 + 1e-12)

    @pytest.mark.parametrize(
        "kwargs", [{"mode": "median"}, {"p": 0.5}, {"budget": 0}],
    )
    def test_rejects(self, lacunary64, kwargs):
        arguments = {"mode": "strong", "p": 2.0, "budget": 2, **kwargs}
        with pytest.raises(ValidationException):
            OpNormService.estimate_opnorm(lacunary64, Weight.from_array(np.ones(64)), **arguments)

    def test_weight_grid_mismatch(self, lacunary64):
        with pytest.raises(ValidationException):
            OpNormService.estimate_opnorm(lacunary64, Weight.from_array(np.ones(32)), 2.0, budget=2)
