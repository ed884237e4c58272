"""
Tile Estimate Service
Measured constants of the single-tree, good-tile, out-part and model-sparse bounds
"""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core import ValidationException
from ..schemas import (
    DyadicInterval,
    GridInterval,
    Signal,
    TileCollection,
    VectorialTree,
    VectorSignal,
    WavePacketParams,
)
from .dyadic_machinery import DyadicService
from .signal_core import SignalService
from .square_function import SquareFunctionService
from .tile_sizes import SizeService
from .tiles import SPLIT_KEYS, TileService

logger = logging.getLogger(__name__)


def _ratio(numerator: float, denominator: float) -> float:
    return 0.0 if denominator <= 0 else float(numerator / denominator)


def _grid(interval: Union[GridInterval, DyadicInterval]) -> GridInterval:
    return interval.interval if isinstance(interval, DyadicInterval) else interval


class EstimateService:
    """Ratios of model forms against their size and maximal-function bounds"""

    @staticmethod
    def tree_collection(collection: TileCollection, tree: VectorialTree) -> TileCollection:
        mask = np.zeros(collection.size, dtype=bool)
        mask[tree.member_indices] = True
        return collection.subset(mask)

    @staticmethod
    def random_tree_rows(collection: TileCollection, count: int, rng: np.random.Generator) -> List[int]:
        """Candidate tree rows holding at least one active tile"""
        table = SizeService.candidate_trees(collection)
        present = np.zeros(collection.ref.size)
        np.add.at(present, collection.ref_index[collection.mask], 1.0)
        occupied = np.flatnonzero(table.matrix @ present > 0)
        if occupied.size == 0:
            return []
        return [int(r) for r in rng.choice(occupied, size=min(count, occupied.size), replace=False)]

    @staticmethod
    def tree_estimate_check(
        collection: TileCollection,
        tree: VectorialTree,
        f: Signal,
        g: VectorSignal,
        params: Optional[WavePacketParams] = None,
    ) -> float:
        """
        Lambda_T(f, g) / (dual size * vectorial size * |I_T|) over the tree tiles

        Returns 0 when either size vanishes.
        """
        params = params or WavePacketParams()
        tiles = EstimateService.tree_collection(collection, tree)
        form = TileService.model_form(tiles, f, g, params)
        g_abs = SquareFunctionService.vector_norm(g)
        dual = SizeService.dual_size(tiles, g_abs, params.decay_exponent)
        size = SizeService.vectorial_size(tiles, f, params)
        return _ratio(form, dual * size * tree.base.top_measure)

    @staticmethod
    def size_domination_check(
        collection: TileCollection,
        f: Signal,
        params: Optional[WavePacketParams] = None,
    ) -> float:
        """vectorial size / sup over active P of ((1/|I_P|) integral |f|^2 chi~_{I_P})^(1/2)"""
        params = params or WavePacketParams()
        if collection.count == 0:
            return 0.0
        size = SizeService.vectorial_size(collection, f, params)
        local = SizeService.tile_local_energy(collection, f, params.decay_exponent)
        return _ratio(size, float(local[collection.mask].max()))

    @staticmethod
    def good_tile_checks(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        Q: Union[GridInterval, DyadicInterval],
        stops: Sequence[Union[GridInterval, DyadicInterval]],
        params: Optional[WavePacketParams] = None,
    ) -> Dict[str, float]:
        """
        Size and form bounds over the good tiles of P_<=(Q)

        vectorial_size / <f>_{2,3Q}, dual_size / <|g|>_{1,3Q}, and
        Lambda / (|Q| <f>_{2,3Q} <|g|>_{1,3Q}).
        """
        params = params or WavePacketParams()
        q = _grid(Q)
        good = TileService.good_tiles(TileService.restrict(collection, q), stops, q)
        tripled = q.tripled()
        g_abs = SquareFunctionService.vector_norm(g)
        avg_f = SignalService.local_average(f, 2, tripled)
        avg_g = SignalService.local_average(g_abs, 1, tripled)
        size = SizeService.vectorial_size(good, f, params)
        dual = SizeService.dual_size(good, g_abs, params.decay_exponent)
        form = TileService.model_form(good, f, g, params)
        return {
            "good_tiles": float(good.count),
            "size_ratio": _ratio(size, avg_f),
            "dual_ratio": _ratio(dual, avg_g),
            "form_ratio": _ratio(form, q.measure * avg_f * avg_g),
        }

    @staticmethod
    def out_part_check(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        interval: Union[GridInterval, DyadicInterval],
        params: Optional[WavePacketParams] = None,
    ) -> Dict[str, float]:
        """
        Each split of Lambda over P_<=(I) against |I| inf_{3I} M_2 f inf_{3I} M_1|g|

        The 'out' keys are the parts the out-part bound covers.
        """
        params = params or WavePacketParams()
        interval = _grid(interval)
        local = TileService.restrict(collection, interval)
        split = TileService.in_out_split(local, f, g, interval, params)
        g_abs = SquareFunctionService.vector_norm(g)
        cells = interval.tripled().indices()
        inf_f = float(DyadicService.maximal_fn(f, 2).modulus[cells].min())
        inf_g = float(DyadicService.maximal_fn(g_abs, 1).modulus[cells].min())
        bound = interval.measure * inf_f * inf_g
        out = {key: _ratio(split.values[key], bound) for key in SPLIT_KEYS}
        out["max_out"] = max(out[key] for key in SPLIT_KEYS if "out" in key)
        return out

    @staticmethod
    def single_scale_check(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        J: Union[GridInterval, DyadicInterval],
        A: int,
        params: Optional[WavePacketParams] = None,
    ) -> float:
        """
        Lambda over P_=(J) with g cut away from AJ, against
        A^-(M-2) |J| inf_{3J} M_2 f inf_{3J} M_1|g|, M the packet decay order

        Raises:
            ValidationException: If A is not an odd integer >= 3
        """
        params = params or WavePacketParams()
        if A < 3 or A % 2 == 0:
            raise ValidationException(f"Dilation factor must be an odd integer >= 3, got {A}")
        J = _grid(J)
        level = TileService.restrict_equal(collection, J)
        far = ~J.dilated(A).mask()
        g_far = VectorSignal.from_array(g.stacked() * far, g.family, g.domain_length)
        form = TileService.model_form(level, f, g_far, params)
        cells = J.tripled().indices()
        inf_f = float(DyadicService.maximal_fn(f, 2).modulus[cells].min())
        inf_g = float(DyadicService.maximal_fn(SquareFunctionService.vector_norm(g), 1).modulus[cells].min())
        bound = float(A) ** (-(params.packet_decay - 2)) * J.measure * inf_f * inf_g
        return _ratio(form, bound)

    @staticmethod
    def model_sparse_ratio(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        params: Optional[WavePacketParams] = None,
    ) -> Dict[str, float]:
        """Lambda_P(f, g) against the sparse form of the construction for (f, |g|)"""
        params = params or WavePacketParams()
        g_abs = SquareFunctionService.vector_norm(g)
        family = DyadicService.build_sparse(f, g_abs)
        form = TileService.model_form(collection, f, g, params)
        sparse = DyadicService.sparse_form(family, f, g_abs)
        logger.debug(f"Model form {form:.6e} against sparse form {sparse:.6e} over {len(family)} intervals")
        return {"model": form, "sparse": sparse, "ratio": _ratio(form, sparse), "intervals": float(len(family))}
