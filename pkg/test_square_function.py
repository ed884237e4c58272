"""Tests for band projections, the square function and the dual pairing"""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from rlplab.core import GridMismatchException, ValidationException
from rlplab.schemas import FrequencyInterval, Signal, VectorSignal
from rlplab.services import FrequencyFamilyService, SignalService, SquareFunctionService


def test_plancherel_on_partition(random_signal):
    family = FrequencyFamilyService.make_partition(256)
    f = random_signal(256)
    tf = SquareFunctionService.square_fn(f, family)
    assert SignalService.lp_norm(tf, 2) == pytest.approx(SignalService.lp_norm(f, 2), rel=1e-10)


def test_full_band_gives_modulus(random_signal):
    f = random_signal(64)
    tf = SquareFunctionService.square_fn(f, FrequencyFamilyService.make_full(64))
    np.testing.assert_allclose(tf.samples.real, f.modulus, atol=1e-12)


def test_unit_family_is_constant(random_signal):
    f = random_signal(64)
    tf = SquareFunctionService.square_fn(f, FrequencyFamilyService.make_unit(64))
    np.testing.assert_allclose(tf.modulus, SignalService.lp_norm(f, 2), rtol=1e-10)


def test_projection_support(random_signal):
    f = random_signal(64)
    omega = FrequencyInterval(a=5, b=11)
    spectrum = SignalService.spectrum(SquareFunctionService.project(f, omega))
    outside = np.ones(64, dtype=bool)
    outside[5:11] = False
    assert np.abs(spectrum[outside]).max() < 1e-12
    np.testing.assert_allclose(spectrum[5:11], SignalService.spectrum(f)[5:11], atol=1e-12)


def test_projection_outside_grid():
    with pytest.raises(ValidationException):
        SquareFunctionService.project(Signal.zeros(16), FrequencyInterval(a=10, b=20))


def test_projections_match_square_values(random_signal, lacunary64):
    f = random_signal(64)
    stack = SquareFunctionService.project_all(f, lacunary64)
    np.testing.assert_allclose(
        np.sqrt(np.sum(np.abs(stack) ** 2, axis=0)), SquareFunctionService.square_values(f, lacunary64), atol=1e-12
    )


def test_many_intervals_cross_chunks(random_signal):
    family = FrequencyFamilyService.make_unit(256)
    f = random_signal(256)
    stack = SquareFunctionService.project_all(f, family)
    assert stack.shape == (256, 256)
    np.testing.assert_allclose(stack.sum(axis=0), f.samples, atol=1e-10)


def test_aligned_dual_pairing_is_l1_norm(random_signal, lacunary64):
    f = random_signal(64)
    g = SquareFunctionService.aligned_dual(f, lacunary64)
    tf = SquareFunctionService.square_fn(f, lacunary64)
    pairing = SquareFunctionService.dual_pairing(f, g)
    assert pairing.real == pytest.approx(SignalService.lp_norm(tf, 1), rel=1e-10)
    assert abs(pairing.imag) < 1e-10
    assert SquareFunctionService.vector_norm(g).modulus.max() <= 1 + 1e-12


def test_pairing_cauchy_schwarz(random_signal, lacunary64, rng):
    f = random_signal(64)
    g = VectorSignal.from_array(rng.standard_normal((len(lacunary64), 64)) + 0j, lacunary64)
    tf = SquareFunctionService.square_fn(f, lacunary64)
    bound = SignalService.lp_norm(tf, 2) * SignalService.lp_norm(SquareFunctionService.vector_norm(g), 2)
    assert abs(SquareFunctionService.dual_pairing(f, g)) <= bound * (1 + 1e-12)


def test_pairing_is_bilinear_without_conjugation(random_signal, lacunary64, rng):
    f = random_signal(64)
    g = VectorSignal.from_array(rng.standard_normal((len(lacunary64), 64)) + 0j, lacunary64)
    scaled = f.with_samples(1j * f.samples)
    assert SquareFunctionService.dual_pairing(scaled, g) == pytest.approx(
        1j * SquareFunctionService.dual_pairing(f, g), rel=1e-12
    )


def test_vector_signal_component_count(lacunary64):
    with pytest.raises(ValueError):
        VectorSignal(components=(Signal.zeros(64),), family=lacunary64)


def test_grid_mismatch(random_signal, lacunary64):
    f = random_signal(128)
    with pytest.raises(GridMismatchException):
        SquareFunctionService.square_fn(f, lacunary64)
    g = SquareFunctionService.aligned_dual(random_signal(64), lacunary64)
    with pytest.raises(GridMismatchException):
        SquareFunctionService.dual_pairing(f, g)


@hsettings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=32), st.integers(min_value=0, max_value=2**32 - 1))
def test_modulation_covariance(offset, seed):
    family = FrequencyFamilyService.make_lacunary(2, 64)
    rng = np.random.default_rng(seed)
    f = Signal(samples=rng.standard_normal(64) + 1j * rng.standard_normal(64))
    modulated = f.with_samples(np.exp(2j * np.pi * offset * np.arange(64) / 64) * f.samples)
    shifted = FrequencyFamilyService.shift_family(family, offset)
    np.testing.assert_allclose(
        SquareFunctionService.square_values(modulated, shifted),
        SquareFunctionService.square_values(f, family),
        atol=1e-10,
    )


@hsettings(max_examples=25, deadline=None)
@given(
    st.lists(st.tuples(st.integers(min_value=0, max_value=31), st.integers(min_value=1, max_value=16)), min_size=1, max_size=6),
    st.integers(min_value=0, max_value=2**32 - 1),
)
def test_overlap_bound(pairs, seed):
    intervals = [FrequencyInterval(a=a, b=min(a + length, 32)) for a, length in pairs]
    # a repeated interval forces B >= 2
    family = FrequencyFamilyService.build(intervals + intervals[:1], 32)
    assert family.overlap_B > 1
    rng = np.random.default_rng(seed)
    f = Signal(samples=rng.standard_normal(32) + 1j * rng.standard_normal(32))
    tf = SquareFunctionService.square_fn(f, family)
    bound = np.sqrt(family.overlap_B) * SignalService.lp_norm(f, 2)
    assert SignalService.lp_norm(tf, 2) <= bound * (1 + 1e-12)


def test_overlap_bound_attained_at_deepest_bin():
    intervals = [FrequencyInterval(a=0, b=8), FrequencyInterval(a=4, b=12), FrequencyInterval(a=6, b=16)]
    family = FrequencyFamilyService.build(intervals, 32)
    assert family.overlap_B == 3
    f = Signal(samples=np.exp(2j * np.pi * 6 * np.arange(32) / 32))
    tf = SquareFunctionService.square_fn(f, family)
    assert SignalService.lp_norm(tf, 2) == pytest.approx(np.sqrt(3) * SignalService.lp_norm(f, 2), rel=1e-12)


def test_synthesize_is_adjoint_of_projections(random_signal, lacunary64, rng):
    f = random_signal(64)
    stack = rng.standard_normal((len(lacunary64), 64)) + 1j * rng.standard_normal((len(lacunary64), 64))
    left = np.vdot(SquareFunctionService.synthesize(stack, lacunary64), f.samples)
    right = np.vdot(stack, SquareFunctionService.project_all(f, lacunary64))
    assert left == pytest.approx(right, rel=1e-10)


def test_synthesize_shape_mismatch(lacunary64):
    with pytest.raises(GridMismatchException):
        SquareFunctionService.synthesize(np.zeros((2, 64)), lacunary64)
