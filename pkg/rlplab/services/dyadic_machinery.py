"""
Dyadic Machinery Service
Shifted grids, maximal functions, stopping intervals and sparse families
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.ndimage import maximum_filter1d

from ..core import (
    ComputationException,
    GridMismatchException,
    ValidationException,
    init_grids,
    parallel_map,
    settings,
)
from ..schemas import (
    DyadicInterval,
    GridInterval,
    Signal,
    SparseConstruction,
    SparseFamily,
    SparseMember,
    SparseVerification,
    StoppingNode,
)
from ..utils import grid_shift, log2_exact
from .signal_core import SignalService

logger = logging.getLogger(__name__)

# Packing allowed for the stopping intervals of a single function
SINGLE_PACKING = Fraction(1, 6)
MERGED_PACKING = Fraction(1, 2)


def _periodic_maximal(values: np.ndarray) -> np.ndarray:
    """sup of periodic averages of values over all intervals containing x"""
    n = values.shape[0]
    out = np.array(values, dtype=float)
    doubled = np.concatenate(([0.0], np.cumsum(np.concatenate((values, values)))))
    starts = np.arange(n)
    for length in range(2, n + 1):
        averages = (doubled[starts + length] - doubled[starts]) / length
        window = maximum_filter1d(averages, size=length, origin=(length - 1) // 2, mode="wrap")
        np.maximum(out, window, out=out)
    return out


def _line_maximal(values: np.ndarray) -> np.ndarray:
    """sup of averages over intervals inside [0, len) containing x"""
    n = values.shape[0]
    out = np.array(values, dtype=float)
    prefix = np.concatenate(([0.0], np.cumsum(values)))
    for length in range(2, n + 1):
        averages = np.full(n, -np.inf)
        averages[: n - length + 1] = (prefix[length:] - prefix[: n - length + 1]) / length
        window = maximum_filter1d(
            averages, size=length, origin=(length - 1) // 2, mode="constant", cval=-np.inf
        )
        np.maximum(out, window, out=out)
    return out


def _dyadic_maximal(values: np.ndarray) -> np.ndarray:
    """sup of averages over the three shifted grids, periodic"""
    n = values.shape[0]
    out = np.array(values, dtype=float)
    for scale in range(1, log2_exact(n) + 1):
        size = 1 << scale
        for grid_id in range(3):
            shift = grid_shift(grid_id, scale)
            rolled = np.roll(values, -shift)
            means = rolled.reshape(-1, size).mean(axis=1)
            np.maximum(out, np.roll(np.repeat(means, size), shift), out=out)
    return out


def _padded_dyadic(values: np.ndarray) -> np.ndarray:
    """Three-grid maximal function of a window extended by zeros"""
    length = values.shape[0]
    size = 1 << (2 * length - 1).bit_length()
    padded = np.zeros(size)
    padded[:length] = values
    return _dyadic_maximal(padded)[:length]


def _maximal_blocks(inside: np.ndarray) -> List[Tuple[int, int]]:
    """Maximal dyadic blocks (offset, scale) of [0, len) contained in a mask"""
    length = inside.shape[0]
    covered = np.zeros(length, dtype=bool)
    blocks = []
    for scale in range(log2_exact(length), -1, -1):
        size = 1 << scale
        full = inside.reshape(-1, size).all(axis=1)
        free = ~covered.reshape(-1, size).any(axis=1)
        for b in np.flatnonzero(full & free):
            offset = int(b) * size
            blocks.append((offset, scale))
            covered[offset:offset + size] = True
    return blocks


def _maximal_union(blocks: Sequence[Tuple[int, int]], length: int) -> List[Tuple[int, int]]:
    """Maximal elements of a union of dyadic blocks"""
    covered = np.zeros(length, dtype=bool)
    kept = []
    for offset, scale in sorted(set(blocks), key=lambda b: (-b[1], b[0])):
        if covered[offset]:
            continue
        covered[offset:offset + (1 << scale)] = True
        kept.append((offset, scale))
    return sorted(kept)


class _Window:
    """Samples of 3Q with the position of Q inside it"""

    def __init__(self, values: np.ndarray, q: GridInterval):
        n = values.shape[0]
        self.length = q.length
        self.periodic = 3 * q.length >= n
        if q.is_full:
            self.start = q.start
            self.q_offset = 0
        else:
            self.start = (q.start - q.length) % n
            self.q_offset = q.length
        if self.periodic:
            self.samples = np.roll(values, -self.start)
        else:
            self.samples = values[(self.start + np.arange(3 * q.length)) % n]

    def average(self) -> float:
        return float(self.samples.mean())

    def maximal(self) -> np.ndarray:
        size = self.samples.shape[0]
        if size > settings.EXACT_MAXIMAL_LIMIT:
            logger.warning(f"Window of {size} samples above the exact limit, using three-grid maximal function")
            return _dyadic_maximal(self.samples) if self.periodic else _padded_dyadic(self.samples)
        return _periodic_maximal(self.samples) if self.periodic else _line_maximal(self.samples)

    def on_q(self, array: np.ndarray) -> np.ndarray:
        return array[self.q_offset:self.q_offset + self.length]

    def tripled_min(self, array: np.ndarray, offset: int, scale: int) -> float:
        """min over 3I of a window array, I = block (offset, scale) of Q"""
        size = 1 << scale
        base = self.q_offset + offset - size
        positions = (base + np.arange(3 * size)) % array.shape[0]
        return float(array[positions].min())


def _choose_constant(maximal_q: np.ndarray, average: float, length: int):
    """Smallest power of two C >= 2 whose stopping blocks pack to <= |Q|/6"""
    if average <= 0:
        return None, []
    top = float(maximal_q.max())
    constant = 2.0
    while True:
        blocks = _maximal_blocks(maximal_q >= constant * average)
        covered = sum(1 << s for _, s in blocks)
        if Fraction(covered, length) <= SINGLE_PACKING:
            return constant, blocks
        if constant * average > top:
            raise ComputationException("Stopping constant search did not terminate")
        constant *= 2.0


class DyadicService:
    """Stopping-time constructions on the periodic grid"""

    @staticmethod
    def enclosing_shifted(interval: GridInterval) -> DyadicInterval:
        """
        Shifted-grid interval containing 3I with length <= 6|3I|

        The returned grid_id is the type of I.

        Raises:
            ValidationException: If 3I does not fit in the period
        """
        n = interval.n
        tripled = 3 * interval.length
        if tripled > n:
            raise ValidationException(f"3I of length {tripled} does not fit in the period {n}")
        left = (interval.start - interval.length) % n
        for scale in range(max(0, math.ceil(math.log2(tripled))), log2_exact(n) + 1):
            size = 1 << scale
            for grid_id in range(3):
                shift = grid_shift(grid_id, scale)
                position = (left - shift) // size
                cell = position * size + shift
                if (left - cell) % n + tripled <= size:
                    return DyadicInterval(
                        grid_id=grid_id,
                        scale=scale,
                        position=position % (n // size),
                        n=n,
                        domain_length=interval.domain_length,
                    )
        raise ComputationException(f"No shifted grid interval encloses 3I for {interval.key()}")

    @staticmethod
    def maximal_fn(f: Signal, p: float, exact: Optional[bool] = None) -> Signal:
        """
        M_p f(x) = sup over intervals I containing x of <f>_{p,I}

        Exact over all intervals up to settings.EXACT_MAXIMAL_LIMIT samples;
        above that the three-grid dyadic restriction is used, which is
        comparable within a factor 18^(1/p).

        Raises:
            ValidationException: If p < 1
        """
        if p < 1:
            raise ValidationException(f"maximal_fn needs p >= 1, got {p}")
        values = f.modulus ** p
        if exact is None:
            exact = f.n <= settings.EXACT_MAXIMAL_LIMIT
            if not exact:
                logger.warning(f"N={f.n} above the exact limit, using three-grid maximal function")
        result = _periodic_maximal(values) if exact else _dyadic_maximal(values)
        return f.with_samples(result ** (1.0 / p))

    @staticmethod
    def dyadic_maximal_fn(f: Signal, p: float) -> Signal:
        """Three-grid dyadic maximal function, M_p^d <= M_p <= 18^(1/p) M_p^d"""
        if p < 1:
            raise ValidationException(f"dyadic_maximal_fn needs p >= 1, got {p}")
        return f.with_samples(_dyadic_maximal(f.modulus ** p) ** (1.0 / p))

    @staticmethod
    def local_maximal(f: Signal, p: float, q: GridInterval) -> np.ndarray:
        """M_p(f 1_{3Q}) sampled on Q"""
        window = _Window(f.modulus ** p, q)
        return window.on_q(window.maximal()) ** (1.0 / p)

    @staticmethod
    def stopping_intervals(f: Signal, p: float, Q: DyadicInterval, C: float) -> List[DyadicInterval]:
        """
        Maximal dyadic I inside Q with I in {M_p(f 1_{3Q}) >= C <f>_{p,3Q}}

        Returns an empty list when f vanishes on 3Q.

        Raises:
            ValidationException: If C <= 1
        """
        if C <= 1:
            raise ValidationException(f"Stopping constant must exceed 1, got {C}")
        window = _Window(f.modulus ** p, Q.interval)
        average = window.average()
        if average <= 0:
            return []
        inside = window.on_q(window.maximal()) >= C ** p * average
        return [Q.child(scale, offset >> scale) for offset, scale in _maximal_blocks(inside)]

    @staticmethod
    def _split(f_values: np.ndarray, g_values: np.ndarray, q: GridInterval):
        """Adaptive stopping children of one node with their measured constants"""
        window_f = _Window(f_values, q)
        window_g = _Window(g_values, q)
        maximal_f = window_f.maximal()
        maximal_g = window_g.maximal()
        average_f = window_f.average()
        average_g = window_g.average()

        constant_f, blocks_f = _choose_constant(window_f.on_q(maximal_f), average_f, q.length)
        constant_g, blocks_g = _choose_constant(window_g.on_q(maximal_g), average_g, q.length)
        merged = _maximal_union(blocks_f + blocks_g, q.length)

        covered = sum(1 << s for _, s in merged)
        if Fraction(covered, q.length) > MERGED_PACKING:
            logger.error(f"Packing {covered}/{q.length} exceeds one half at {q.key()}")
            raise ComputationException(f"Stopping intervals of {q.key()} pack beyond |Q|/2")

        inf_f = None
        inf_g = None
        if merged and average_f > 0:
            inf_f = max(window_f.tripled_min(maximal_f, o, s) for o, s in merged) / average_f
            inf_f = float(inf_f ** 0.5)
        if merged and average_g > 0:
            inf_g = max(window_g.tripled_min(maximal_g, o, s) for o, s in merged) / average_g
        return {
            "blocks": merged,
            "constant_f": None if constant_f is None else float(constant_f ** 0.5),
            "constant_g": None if constant_g is None else float(constant_g),
            "packing": covered / q.length,
            "inf_f": inf_f,
            "inf_g": inf_g,
        }

    @staticmethod
    def merge_stopping(
        f: Signal,
        g_abs: Signal,
        Q: DyadicInterval,
        p: Tuple[float, float] = (2.0, 1.0),
    ) -> List[DyadicInterval]:
        """
        Maximal elements of the stopping intervals of f (exponent 2) and |g| (exponent 1)

        Each constant is the smallest power of two >= 2 keeping the single-function
        packing at |Q|/6, so the merged packing is at most |Q|/2.
        """
        SignalService.require_same_grid(f, g_abs)
        f_values = f.modulus ** p[0]
        g_values = g_abs.modulus ** p[1]
        split = DyadicService._split(f_values, g_values, Q.interval)
        return [Q.child(scale, offset >> scale) for offset, scale in split["blocks"]]

    @staticmethod
    def build_sparse_tree(f: Signal, g_abs: Signal, grid_id: int = 0) -> SparseConstruction:
        """
        Iterated stopping construction from the full period

        The root is the full period of grid grid_id; descendants are dyadic
        relative to the root start. Witnesses are E_Q = Q minus its children.
        """
        SignalService.require_same_grid(f, g_abs)
        if grid_id not in (0, 1, 2):
            raise ValidationException(f"grid_id must be 0, 1 or 2, got {grid_id}")
        n = f.n
        init_grids(n)
        f_values = f.modulus ** 2
        g_values = g_abs.modulus
        root = DyadicInterval.root(n, grid_id, f.domain_length)

        intervals: List[GridInterval] = [root.interval]
        levels: List[int] = [0]
        parents: List[Optional[int]] = [None]
        splits = []
        frontier = [0]
        while frontier:
            def process(index):
                q = intervals[index]
                if q.length == 1:
                    return {"blocks": [], "constant_f": None, "constant_g": None,
                            "packing": 0.0, "inf_f": None, "inf_g": None}
                return DyadicService._split(f_values, g_values, q)

            results = parallel_map(process, frontier)
            next_frontier = []
            for index, split in zip(frontier, results):
                splits.append((index, split))
                q = intervals[index]
                for offset, scale in split["blocks"]:
                    intervals.append(
                        GridInterval(
                            start=(q.start + offset) % n,
                            length=1 << scale,
                            n=n,
                            domain_length=f.domain_length,
                        )
                    )
                    levels.append(levels[index] + 1)
                    parents.append(index)
                    next_frontier.append(len(intervals) - 1)
            logger.debug(f"Sparse level {levels[frontier[0]]}: {len(frontier)} nodes, {len(next_frontier)} children")
            frontier = next_frontier

        by_index = dict(splits)
        children: List[List[int]] = [[] for _ in intervals]
        for index, parent in enumerate(parents):
            if parent is not None:
                children[parent].append(index)

        nodes = []
        grid_members = []
        members = []
        types = []
        for index, q in enumerate(intervals):
            split = by_index[index]
            witness_mask = q.mask()
            for child in children[index]:
                witness_mask[intervals[child].indices()] = False
            witness = np.flatnonzero(witness_mask)
            grid_members.append(SparseMember(interval=q, witness=witness))
            members.append(SparseMember(interval=q.tripled(), witness=witness))
            types.append(
                DyadicService.enclosing_shifted(q).grid_id if 3 * q.length <= n else grid_id
            )
            nodes.append(
                StoppingNode(
                    interval=q,
                    level=levels[index],
                    parent=parents[index],
                    constant_f=split["constant_f"],
                    constant_g=split["constant_g"],
                    packing=split["packing"],
                    children=len(children[index]),
                    inf_bound_f=split["inf_f"],
                    inf_bound_g=split["inf_g"],
                )
            )

        def largest(values):
            present = [v for v in values if v is not None]
            return float(max(present)) if present else 0.0

        constants = {
            "max_constant_f": largest(n_.constant_f for n_ in nodes),
            "max_constant_g": largest(n_.constant_g for n_ in nodes),
            "max_packing": largest(n_.packing for n_ in nodes),
            "max_inf_bound_f": largest(n_.inf_bound_f for n_ in nodes),
            "max_inf_bound_g": largest(n_.inf_bound_g for n_ in nodes),
            "nodes": float(len(nodes)),
        }
        logger.debug(f"Sparse construction: {len(nodes)} nodes, constants {constants}")
        return SparseConstruction(
            family=SparseFamily(
                members=tuple(members), eta=settings.SPARSE_ETA, n=n, domain_length=f.domain_length
            ),
            grid_family=SparseFamily(
                members=tuple(grid_members), eta=0.5, n=n, domain_length=f.domain_length
            ),
            nodes=tuple(nodes),
            interval_types=tuple(types),
            constants=constants,
            grid_id=grid_id,
        )

    @staticmethod
    def build_sparse(f: Signal, g_abs: Signal, grid_id: int = 0) -> SparseFamily:
        """Enlarged 1/6-sparse family {3I} of the stopping construction"""
        return DyadicService.build_sparse_tree(f, g_abs, grid_id).family

    @staticmethod
    def verify_sparse(family: SparseFamily, eta: float) -> SparseVerification:
        """
        Exact check of |E_I| >= eta |I|, E_I inside I, and disjoint witnesses

        eta is compared as the nearest fraction with denominator <= 1000.
        """
        ratio = Fraction(eta).limit_denominator(1000)
        min_ratio = math.inf
        for index, member in enumerate(family.members):
            inside = member.interval.mask()
            if member.witness.size and (member.witness.min() < 0 or member.witness.max() >= family.n):
                return SparseVerification(
                    valid=False, eta=eta, checked=index, reason="witness index outside the grid",
                    offending=(index,),
                )
            if not inside[member.witness].all():
                return SparseVerification(
                    valid=False, eta=eta, checked=index, reason="witness not inside its interval",
                    offending=(index,),
                )
            count = int(member.witness.shape[0])
            min_ratio = min(min_ratio, count / member.interval.length)
            if count * ratio.denominator < ratio.numerator * member.interval.length:
                return SparseVerification(
                    valid=False, eta=eta, checked=index,
                    reason=f"witness measure {count}/{member.interval.length} below eta",
                    offending=(index,), min_ratio=count / member.interval.length,
                )

        owner = np.full(family.n, -1, dtype=np.int64)
        for index, member in enumerate(family.members):
            taken = owner[member.witness]
            clash = np.flatnonzero(taken >= 0)
            if clash.size:
                other = int(taken[clash[0]])
                return SparseVerification(
                    valid=False, eta=eta, checked=len(family.members),
                    reason=f"witnesses overlap at sample {int(member.witness[clash[0]])}",
                    offending=(other, index),
                )
            owner[member.witness] = index
        return SparseVerification(
            valid=True,
            eta=eta,
            checked=len(family.members),
            min_ratio=None if math.isinf(min_ratio) else min_ratio,
        )

    @staticmethod
    def sparse_form(family: SparseFamily, f: Signal, g_abs: Signal, q: float = 2.0) -> float:
        """
        sum over I of |I| <f>_{q,I} <|g|>_{1,I}

        Raises:
            GridMismatchException: If f, g or the family live on different grids
        """
        SignalService.require_same_grid(f, g_abs)
        if family.n != f.n:
            raise GridMismatchException(f"Sparse family on N={family.n}, signals on N={f.n}")
        if q < 1:
            raise ValidationException(f"sparse_form needs q >= 1, got {q}")
        if not family.members:
            return 0.0
        f_prefix = np.concatenate(([0.0], np.cumsum(np.tile(f.modulus ** q, 2))))
        g_prefix = np.concatenate(([0.0], np.cumsum(np.tile(g_abs.modulus, 2))))
        starts = np.array([m.interval.start for m in family.members])
        lengths = np.array([m.interval.length for m in family.members])
        f_avg = np.maximum((f_prefix[starts + lengths] - f_prefix[starts]) / lengths, 0.0) ** (1.0 / q)
        g_avg = np.maximum((g_prefix[starts + lengths] - g_prefix[starts]) / lengths, 0.0)
        return float(np.sum(lengths * f.dx * f_avg * g_avg))
