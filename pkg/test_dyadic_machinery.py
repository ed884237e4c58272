"""Tests for shifted grids, maximal functions, stopping intervals and sparse families"""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from rlplab.core import GridMismatchException, ValidationException, settings
from rlplab.schemas import DyadicInterval, GridInterval, Signal, SparseFamily, SparseMember
from rlplab.services import DyadicService, SquareFunctionService


def _brute_maximal(values):
    n = values.shape[0]
    out = np.array(values, dtype=float)
    for start in range(n):
        for length in range(1, n + 1):
            cells = (start + np.arange(length)) % n
            out[cells] = np.maximum(out[cells], values[cells].mean())
    return out


def _spike(n, at):
    samples = np.zeros(n)
    samples[at] = float(n)
    return Signal(samples=samples)


class TestEnclosingShifted:
    @hsettings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=63), st.integers(min_value=1, max_value=21))
    def test_contains_tripled_within_six(self, start, length):
        interval = GridInterval(start=start, length=length, n=64)
        enclosing = DyadicService.enclosing_shifted(interval)
        assert enclosing.interval.contains(interval.tripled())
        assert enclosing.length <= 6 * 3 * length

    def test_too_long(self):
        with pytest.raises(ValidationException):
            DyadicService.enclosing_shifted(GridInterval(start=0, length=22, n=64))


class TestMaximal:
    def test_matches_brute_force(self, rng):
        values = rng.uniform(0, 5, size=16)
        result = DyadicService.maximal_fn(Signal(samples=values), 1)
        np.testing.assert_allclose(result.modulus, _brute_maximal(values), rtol=1e-12)

    def test_exponent_two(self, rng):
        values = rng.uniform(0, 5, size=16)
        result = DyadicService.maximal_fn(Signal(samples=values), 2)
        np.testing.assert_allclose(result.modulus, np.sqrt(_brute_maximal(values ** 2)), rtol=1e-12)

    def test_constant(self):
        result = DyadicService.maximal_fn(Signal.constant(32, 2.5), 1)
        np.testing.assert_allclose(result.modulus, 2.5)

    def test_dyadic_comparable(self, rng):
        f = Signal(samples=rng.uniform(0, 1, size=64) ** 4)
        exact = DyadicService.maximal_fn(f, 1).modulus
        dyadic = DyadicService.dyadic_maximal_fn(f, 1).modulus
        assert np.all(dyadic <= exact * (1 + 1e-12))
        assert np.all(exact <= 18 * dyadic * (1 + 1e-12))

    def test_fallback_above_limit(self, rng, monkeypatch):
        monkeypatch.setattr(settings, "EXACT_MAXIMAL_LIMIT", 16)
        f = Signal(samples=rng.uniform(size=32))
        np.testing.assert_allclose(
            DyadicService.maximal_fn(f, 1).modulus, DyadicService.dyadic_maximal_fn(f, 1).modulus
        )

    def test_rejects_small_p(self):
        with pytest.raises(ValidationException):
            DyadicService.maximal_fn(Signal.zeros(16), 0.5)

    def test_local_maximal_sees_tripled_window(self):
        f = _spike(64, 20)
        q = GridInterval(start=24, length=8, n=64)
        local = DyadicService.local_maximal(f, 1, q)
        assert local.shape == (8,)
        assert np.all(local > 0)
        far = DyadicService.local_maximal(f, 1, GridInterval(start=48, length=8, n=64))
        assert np.all(far == 0)


class TestStopping:
    def test_constant_must_exceed_one(self):
        with pytest.raises(ValidationException):
            DyadicService.stopping_intervals(Signal.constant(32, 1.0), 2, DyadicInterval.root(32), 1.0)

    def test_vanishing_function(self):
        assert DyadicService.stopping_intervals(Signal.zeros(32), 2, DyadicInterval.root(32), 4.0) == []

    def test_spike_is_isolated(self):
        f = _spike(64, 37)
        stops = DyadicService.stopping_intervals(f, 1, DyadicInterval.root(64), 4.0)
        assert stops
        cover = np.zeros(64, dtype=int)
        for stop in stops:
            cover[stop.interval.indices()] += 1
        assert cover.max() == 1
        assert cover[37] == 1
        assert cover.sum() < 64

    def test_merge_packs_within_half(self, random_signal):
        f = random_signal(64)
        g_abs = random_signal(64).abs()
        stops = DyadicService.merge_stopping(f, g_abs, DyadicInterval.root(64))
        cover = np.zeros(64, dtype=int)
        for stop in stops:
            cover[stop.interval.indices()] += 1
        assert cover.max() <= 1
        assert cover.sum() <= 32


class TestSparse:
    def test_construction_is_sparse(self, random_signal):
        f = random_signal(64)
        g_abs = random_signal(64).abs()
        construction = DyadicService.build_sparse_tree(f, g_abs)
        assert construction.nodes[0].interval.is_full
        assert construction.constants["max_packing"] <= 0.5
        assert DyadicService.verify_sparse(construction.grid_family, 0.5).valid
        assert DyadicService.verify_sparse(construction.family, 1 / 6).valid
        assert len(construction.interval_types) == len(construction.nodes)
        assert set(construction.interval_types) <= {0, 1, 2}

    def test_spike_builds_a_chain(self):
        f = _spike(64, 21)
        construction = DyadicService.build_sparse_tree(f, Signal.constant(64, 1.0))
        assert construction.depth >= 1
        leaves = [node.interval for node in construction.nodes if node.children == 0]
        assert any(interval.contains(GridInterval(start=21, length=1, n=64)) for interval in leaves)

    @pytest.mark.parametrize("grid_id", [1, 2])
    def test_shifted_roots(self, random_signal, grid_id):
        f = random_signal(32)
        family = DyadicService.build_sparse(f, f.abs(), grid_id)
        assert DyadicService.verify_sparse(family, settings.SPARSE_ETA).valid

    def test_verify_rejects_overlap(self):
        members = (
            SparseMember(interval=GridInterval(start=0, length=8, n=16), witness=[0, 1, 2, 3]),
            SparseMember(interval=GridInterval(start=0, length=4, n=16), witness=[2, 3]),
        )
        result = DyadicService.verify_sparse(SparseFamily(members=members, eta=0.5, n=16), 0.5)
        assert not result.valid
        assert "overlap" in result.reason
        assert result.offending == (0, 1)

    def test_verify_rejects_small_witness(self):
        members = (SparseMember(interval=GridInterval(start=0, length=8, n=16), witness=[0]),)
        result = DyadicService.verify_sparse(SparseFamily(members=members, eta=0.5, n=16), 1 / 6)
        assert not result.valid
        assert result.min_ratio == pytest.approx(1 / 8)

    def test_verify_rejects_stray_witness(self):
        members = (SparseMember(interval=GridInterval(start=0, length=4, n=16), witness=[0, 9]),)
        result = DyadicService.verify_sparse(SparseFamily(members=members, eta=0.5, n=16), 0.25)
        assert not result.valid
        assert "inside" in result.reason

    def test_sparse_form(self, random_signal):
        f = random_signal(64)
        g_abs = random_signal(64).abs()
        family = DyadicService.build_sparse(f, g_abs)
        form = DyadicService.sparse_form(family, f, g_abs)
        assert form > 0
        assert DyadicService.sparse_form(family, f, g_abs, q=1) <= form * (1 + 1e-12)
        empty = SparseFamily(members=(), eta=0.5, n=64)
        assert DyadicService.sparse_form(empty, f, g_abs) == 0.0

    def test_sparse_form_grid_mismatch(self, random_signal):
        f = random_signal(32)
        family = DyadicService.build_sparse(f, f.abs())
        with pytest.raises(GridMismatchException):
            DyadicService.sparse_form(family, random_signal(64), random_signal(64).abs())

    def test_pairing_dominated_by_sparse_form(self, random_signal, lacunary64):
        f = random_signal(64)
        g = SquareFunctionService.aligned_dual(f, lacunary64)
        g_abs = SquareFunctionService.vector_norm(g)
        family = DyadicService.build_sparse(f, g_abs)
        pairing = abs(SquareFunctionService.dual_pairing(f, g))
        assert 0 < pairing <= DyadicService.sparse_form(family, f, g_abs) * (1 + 1e-9)
