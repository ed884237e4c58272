"""
Frequency Family Service
Interval families, their overlap constant, standard generators and Whitney pieces
"""

import logging
from typing import List, Sequence

from ..core import ValidationException
from ..schemas import FrequencyInterval, IntervalFamily
from ..utils import coverage_counts, dyadic_blocks, is_power_of_two
from ..utils.codecs import read_family_intervals

logger = logging.getLogger(__name__)


class FrequencyFamilyService:
    """Construction and queries on frequency interval families"""

    @staticmethod
    def overlap_constant(intervals: Sequence[FrequencyInterval]) -> int:
        """
        Exact maximum covering multiplicity over bins

        Raises:
            ValidationException: If the list is empty
        """
        if not intervals:
            raise ValidationException("overlap_constant needs a nonempty interval list")
        top = max(w.b for w in intervals)
        counts = coverage_counts(((w.a, w.b) for w in intervals), top)
        return int(counts.max())

    @staticmethod
    def build(intervals: Sequence[FrequencyInterval], n: int) -> IntervalFamily:
        """Family with its exact overlap constant"""
        intervals = tuple(intervals)
        return IntervalFamily(
            intervals=intervals,
            n=n,
            overlap_B=FrequencyFamilyService.overlap_constant(intervals),
        )

    @staticmethod
    def whitney(omega: FrequencyInterval) -> List[FrequencyInterval]:
        """
        Maximal dyadic pieces J of [a, b) with dist(J, a) >= |J| and dist(J, b) >= |J|

        Pieces are dyadic relative to a. Intervals shorter than 4 bins are
        returned unchanged.
        """
        a, b = omega.a, omega.b
        width = b - a
        if width < 4:
            return [omega]

        taken = [False] * width
        pieces = []
        top = width.bit_length() - 1
        for scale in range(top, -1, -1):
            size = 1 << scale
            for offset in range(0, width - size + 1, size):
                if offset < size or width - (offset + size) < size:
                    continue
                if any(taken[offset:offset + size]):
                    continue
                for i in range(offset, offset + size):
                    taken[i] = True
                pieces.append(FrequencyInterval(a=a + offset, b=a + offset + size))
        pieces.sort(key=lambda w: w.a)
        return pieces

    @staticmethod
    def tiling_blocks(omega: FrequencyInterval) -> List[FrequencyInterval]:
        """Whitney pieces, with short non-dyadic intervals split into dyadic blocks"""
        pieces = []
        for piece in FrequencyFamilyService.whitney(omega):
            start = piece.a
            for size in dyadic_blocks(piece.length):
                pieces.append(FrequencyInterval(a=start, b=start + size))
                start += size
        return pieces

    @staticmethod
    def make_lacunary(lambda_num: int, n: int) -> IntervalFamily:
        """
        {[lam^k, lam^(k+1)) intersected with [1, N/2)}

        Raises:
            ValidationException: If lambda_num < 2
        """
        if lambda_num < 2:
            raise ValidationException(f"Lacunary ratio must be >= 2, got {lambda_num}")
        half = n // 2
        intervals = []
        low = 1
        while low < half:
            high = min(low * lambda_num, half)
            intervals.append(FrequencyInterval(a=low, b=high))
            low *= lambda_num
        return IntervalFamily(intervals=tuple(intervals), n=n, overlap_B=1)

    @staticmethod
    def make_unit(n: int) -> IntervalFamily:
        """All unit intervals [k, k+1)"""
        return IntervalFamily(
            intervals=tuple(FrequencyInterval(a=k, b=k + 1) for k in range(n)),
            n=n,
            overlap_B=1,
        )

    @staticmethod
    def make_partition(n: int) -> IntervalFamily:
        """{[0,1)} and the dyadic blocks [2^k, 2^(k+1)), a partition of [0, N)"""
        intervals = [FrequencyInterval(a=0, b=1)]
        low = 1
        while low < n:
            intervals.append(FrequencyInterval(a=low, b=2 * low))
            low *= 2
        return IntervalFamily(intervals=tuple(intervals), n=n, overlap_B=1)

    @staticmethod
    def make_full(n: int) -> IntervalFamily:
        return IntervalFamily(intervals=(FrequencyInterval(a=0, b=n),), n=n, overlap_B=1)

    @staticmethod
    def make_congruent(base: IntervalFamily, pieces_per_block: Sequence[int]) -> IntervalFamily:
        """
        Split each w_k into pieces_per_block[k] equal sub-intervals

        Raises:
            ValidationException: If a piece count is missing or does not divide |w_k|
        """
        if len(pieces_per_block) != len(base.intervals):
            raise ValidationException(
                f"{len(pieces_per_block)} piece counts for {len(base.intervals)} intervals"
            )
        intervals = []
        for omega, count in zip(base.intervals, pieces_per_block):
            count = int(count)
            if count < 1 or omega.length % count != 0:
                raise ValidationException(
                    f"{count} pieces do not divide [{omega.a}, {omega.b}) of length {omega.length}"
                )
            step = omega.length // count
            for i in range(count):
                intervals.append(FrequencyInterval(a=omega.a + i * step, b=omega.a + (i + 1) * step))
        return IntervalFamily(intervals=tuple(intervals), n=base.n, overlap_B=base.overlap_B)

    @staticmethod
    def halving_pieces(base: IntervalFamily) -> List[int]:
        """Two pieces for every even-length interval, one otherwise"""
        return [2 if w.length % 2 == 0 else 1 for w in base.intervals]

    @staticmethod
    def shift_family(family: IntervalFamily, offset: int) -> IntervalFamily:
        """
        Translate every interval by a common bin offset

        Raises:
            ValidationException: If a shifted interval leaves [0, N)
        """
        shifted = []
        for omega in family.intervals:
            if omega.a + offset < 0 or omega.b + offset > family.n:
                raise ValidationException(
                    f"Shift {offset} moves [{omega.a}, {omega.b}) outside [0, {family.n})"
                )
            shifted.append(omega.shifted(offset))
        return IntervalFamily(intervals=tuple(shifted), n=family.n, overlap_B=family.overlap_B)

    @staticmethod
    def parse_family(spec: str, n: int) -> IntervalFamily:
        """
        Parse a --family value

        Grammar: lacunary:<lam> | unit | partition | full |
        congruent:<lam>[:<p1,p2,...>] | file:<path>

        Raises:
            ValidationException: On an unknown or malformed spec
        """
        if not is_power_of_two(n):
            raise ValidationException(f"Grid size must be a power of two, got {n}")
        kind, _, rest = spec.strip().partition(":")
        try:
            if kind == "lacunary":
                return FrequencyFamilyService.make_lacunary(int(rest or 2), n)
            if kind == "unit":
                return FrequencyFamilyService.make_unit(n)
            if kind == "partition":
                return FrequencyFamilyService.make_partition(n)
            if kind == "full":
                return FrequencyFamilyService.make_full(n)
            if kind == "congruent":
                ratio, _, pieces_text = rest.partition(":")
                base = FrequencyFamilyService.make_lacunary(int(ratio or 2), n)
                if pieces_text:
                    pieces = [int(p) for p in pieces_text.split(",") if p.strip()]
                else:
                    pieces = FrequencyFamilyService.halving_pieces(base)
                return FrequencyFamilyService.make_congruent(base, pieces)
            if kind == "file":
                return FrequencyFamilyService.build(read_family_intervals(rest), n)
        except ValidationException:
            raise
        except ValueError as e:
            logger.error(f"Malformed family spec {spec!r}: {str(e)}")
            raise ValidationException(f"Malformed family spec {spec!r}: {str(e)}")
        raise ValidationException(f"Unknown family spec {spec!r}")
