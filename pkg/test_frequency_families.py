"""Tests for interval families, overlap constants, generators and Whitney pieces"""

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st
from pydantic import ValidationError

from rlplab.core import ValidationException
from rlplab.schemas import FrequencyInterval, IntervalFamily
from rlplab.services import FrequencyFamilyService
from rlplab.utils import coverage_counts


def _pairs(family):
    return [(w.a, w.b) for w in family.intervals]


class TestGenerators:
    def test_lacunary(self):
        family = FrequencyFamilyService.make_lacunary(2, 64)
        assert _pairs(family) == [(1, 2), (2, 4), (4, 8), (8, 16), (16, 32)]
        assert family.overlap_B == 1
        assert family.max_length == 16

    def test_lacunary_ratio_three(self):
        family = FrequencyFamilyService.make_lacunary(3, 64)
        assert _pairs(family) == [(1, 3), (3, 9), (9, 27), (27, 32)]

    def test_lacunary_rejects_ratio_one(self):
        with pytest.raises(ValidationException):
            FrequencyFamilyService.make_lacunary(1, 64)

    def test_partition_covers_once(self):
        family = FrequencyFamilyService.make_partition(128)
        counts = coverage_counts(_pairs(family), 128)
        assert np.all(counts == 1)

    def test_unit(self):
        family = FrequencyFamilyService.make_unit(32)
        assert len(family) == 32
        assert all(w.length == 1 for w in family.intervals)

    def test_congruent_halving(self):
        base = FrequencyFamilyService.make_lacunary(2, 64)
        pieces = FrequencyFamilyService.halving_pieces(base)
        assert pieces == [1, 2, 2, 2, 2]
        family = FrequencyFamilyService.make_congruent(base, pieces)
        assert _pairs(family)[:3] == [(1, 2), (2, 3), (3, 4)]
        assert len(family) == 9

    def test_congruent_errors(self):
        base = FrequencyFamilyService.make_lacunary(2, 64)
        with pytest.raises(ValidationException):
            FrequencyFamilyService.make_congruent(base, [1, 2])
        with pytest.raises(ValidationException):
            FrequencyFamilyService.make_congruent(base, [1, 2, 3, 2, 2])

    def test_shift(self):
        family = FrequencyFamilyService.make_lacunary(2, 64)
        shifted = FrequencyFamilyService.shift_family(family, 3)
        assert _pairs(shifted)[0] == (4, 5)
        with pytest.raises(ValidationException):
            FrequencyFamilyService.shift_family(family, 40)


class TestOverlap:
    def test_exact_multiplicity(self):
        intervals = [FrequencyInterval(a=0, b=4), FrequencyInterval(a=2, b=6), FrequencyInterval(a=3, b=5)]
        assert FrequencyFamilyService.overlap_constant(intervals) == 3
        assert FrequencyFamilyService.build(intervals, 16).overlap_B == 3

    def test_empty(self):
        with pytest.raises(ValidationException):
            FrequencyFamilyService.overlap_constant([])

    def test_declared_constant_too_small(self):
        with pytest.raises(ValidationError):
            IntervalFamily(
                intervals=(FrequencyInterval(a=0, b=4), FrequencyInterval(a=2, b=6)), n=16, overlap_B=1
            )

    def test_interval_outside_grid(self):
        with pytest.raises(ValidationError):
            IntervalFamily(intervals=(FrequencyInterval(a=10, b=20),), n=16, overlap_B=1)

    def test_empty_interval(self):
        with pytest.raises(ValidationError):
            FrequencyInterval(a=5, b=5)


class TestWhitney:
    def test_reference_pieces(self):
        pieces = FrequencyFamilyService.whitney(FrequencyInterval(a=0, b=16))
        assert [(w.a, w.b) for w in pieces] == [(1, 2), (2, 4), (4, 8), (8, 12), (12, 14), (14, 15)]

    def test_short_interval_unchanged(self):
        omega = FrequencyInterval(a=5, b=8)
        assert FrequencyFamilyService.whitney(omega) == [omega]

    def test_tiling_blocks_are_dyadic(self):
        blocks = FrequencyFamilyService.tiling_blocks(FrequencyInterval(a=5, b=8))
        assert [(w.a, w.b) for w in blocks] == [(5, 7), (7, 8)]

    @hsettings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=500), st.integers(min_value=4, max_value=300))
    def test_pieces_cover_all_but_the_endpoints(self, a, width):
        omega = FrequencyInterval(a=a, b=a + width)
        pieces = FrequencyFamilyService.whitney(omega)
        covered = np.zeros(width, dtype=int)
        for piece in pieces:
            size = piece.length
            offset = piece.a - a
            assert size & (size - 1) == 0
            assert offset % size == 0
            assert offset >= size and width - (offset + size) >= size
            covered[offset:offset + size] += 1
        assert covered[0] == 0 and covered[-1] == 0
        assert np.all(covered[1:-1] == 1)

    @hsettings(max_examples=40, deadline=None)
    @given(st.integers(min_value=4, max_value=300))
    def test_pieces_are_maximal(self, width):
        pieces = FrequencyFamilyService.whitney(FrequencyInterval(a=0, b=width))
        for piece in pieces:
            parent_size = 2 * piece.length
            parent = (piece.a // parent_size) * parent_size
            admissible = parent >= parent_size and width - (parent + parent_size) >= parent_size
            assert not admissible


class TestParse:
    def test_known_specs(self):
        assert len(FrequencyFamilyService.parse_family("lacunary:2", 64)) == 5
        assert len(FrequencyFamilyService.parse_family("unit", 16)) == 16
        assert len(FrequencyFamilyService.parse_family("partition", 16)) == 5
        assert len(FrequencyFamilyService.parse_family("full", 16)) == 1
        assert len(FrequencyFamilyService.parse_family("congruent:2", 64)) == 9
        assert len(FrequencyFamilyService.parse_family("congruent:2:1,1,1,1,1", 64)) == 5

    def test_file_spec(self, tmp_path):
        path = tmp_path / "family.txt"
        path.write_text("# two overlapping bands\n0 4\n2 6\n")
        family = FrequencyFamilyService.parse_family(f"file:{path}", 16)
        assert _pairs(family) == [(0, 4), (2, 6)]
        assert family.overlap_B == 2

    @pytest.mark.parametrize("spec", ["lacunary:x", "dyadic", "congruent:2:a"])
    def test_bad_specs(self, spec):
        with pytest.raises(ValidationException):
            FrequencyFamilyService.parse_family(spec, 64)

    def test_bad_grid(self):
        with pytest.raises(ValidationException):
            FrequencyFamilyService.parse_family("unit", 48)
