"""Tests for norms, spectra, local averages and the smoothed cutoff"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from rlplab.core import GridMismatchException, ValidationException
from rlplab.schemas import GridInterval, Signal
from rlplab.services import SignalService


def test_constant_norms():
    f = Signal.constant(64, 2.0)
    for p in (1, 2, 3.5, math.inf):
        assert SignalService.lp_norm(f, p) == pytest.approx(2.0)


def test_norm_scales_with_domain_length():
    f = Signal.constant(32, 1.0, domain_length=4.0)
    assert SignalService.lp_norm(f, 2) == pytest.approx(2.0)
    assert f.dx == pytest.approx(4.0 / 32)


def test_norm_rejects_small_p():
    with pytest.raises(ValidationException):
        SignalService.lp_norm(Signal.zeros(16), 0.5)


def test_parseval(random_signal):
    f = random_signal(128, domain_length=3.0)
    assert SignalService.spectral_energy(f) == pytest.approx(SignalService.lp_norm(f, 2) ** 2, rel=1e-12)


def test_spectrum_inverse(random_signal):
    f = random_signal(64)
    back = SignalService.from_spectrum(SignalService.spectrum(f))
    np.testing.assert_allclose(back.samples, f.samples, atol=1e-12)


def test_local_average_of_indicator():
    samples = np.zeros(32)
    samples[8:16] = 3.0
    f = Signal(samples=samples)
    inside = GridInterval(start=8, length=8, n=32)
    half = GridInterval(start=4, length=8, n=32)
    assert SignalService.local_average(f, 2, inside) == pytest.approx(3.0)
    assert SignalService.local_average(f, 1, half) == pytest.approx(1.5)
    assert SignalService.local_average(f, 2, half) == pytest.approx(3.0 / math.sqrt(2))
    assert SignalService.local_average(f, math.inf, half) == pytest.approx(3.0)


def test_local_average_errors():
    f = Signal.zeros(32)
    with pytest.raises(ValidationException):
        SignalService.local_average(f, 0.5, GridInterval(start=0, length=4, n=32))
    with pytest.raises(ValidationException):
        SignalService.local_average(f, 2, GridInterval(start=0, length=4, n=64))


def test_block_averages_wrap(rng):
    values = rng.uniform(size=16)
    averages = SignalService.block_averages(values, 5)
    for s in (0, 7, 14):
        expected = values[(s + np.arange(5)) % 16].mean()
        assert averages[s] == pytest.approx(expected)


def test_cutoff_chi():
    interval = GridInterval(start=8, length=4, n=64)
    assert SignalService.cutoff_chi(interval, 9) == 1.0
    assert SignalService.cutoff_chi(interval, 15, exponent=2) == pytest.approx(1 / 4)
    values = SignalService.cutoff_chi(interval, np.arange(64), exponent=3)
    assert values.shape == (64,)
    assert values.max() == 1.0
    with pytest.raises(ValidationException):
        SignalService.cutoff_chi(interval, 0, exponent=0)


def test_chi_correlation_matches_direct_sum(rng):
    values = rng.uniform(size=32)
    corr = SignalService.chi_correlation(values, 4, 3)
    for s in (0, 5, 30):
        interval = GridInterval(start=s, length=4, n=32)
        direct = np.sum(values * SignalService.cutoff_chi(interval, np.arange(32), exponent=3))
        assert corr[s] == pytest.approx(direct, rel=1e-10)


def test_grid_mismatch():
    with pytest.raises(GridMismatchException):
        SignalService.require_same_grid(Signal.zeros(16), Signal.zeros(32))
    with pytest.raises(GridMismatchException):
        SignalService.require_same_grid(Signal.zeros(16), Signal.zeros(16, domain_length=2.0))


@hsettings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(min_value=-10, max_value=10, allow_nan=False), min_size=16, max_size=16),
    st.floats(min_value=1.0, max_value=6.0),
    st.floats(min_value=0.0, max_value=6.0),
)
def test_norms_increase_with_p_on_unit_domain(values, p, step):
    f = Signal(samples=np.asarray(values))
    assert SignalService.lp_norm(f, p) <= SignalService.lp_norm(f, p + step) * (1 + 1e-9) + 1e-12
