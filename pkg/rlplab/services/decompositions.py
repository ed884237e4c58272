"""
Decomposition Service
Energy and mass stopping-time decompositions of tile collections
"""

import logging
from typing import List, Optional

import numpy as np

from ..core import PreconditionException, ValidationException, settings
from ..schemas import (
    Decomposition,
    DecompositionLevel,
    Signal,
    TileCollection,
    TreeSelection,
    WavePacketParams,
)
from .signal_core import SignalService
from .tile_sizes import SizeService
from .tiles import TileService

logger = logging.getLogger(__name__)

# Relative size below which the remaining tiles are left undecomposed
VANISHING = 1e-12


def _check_lambda(lam: float, size: float, kind: str) -> None:
    if lam <= 0:
        raise ValidationException(f"lambda must be positive, got {lam}")
    if size > lam * (1 + 1e-12):
        raise PreconditionException(f"{kind} size {size} exceeds lambda {lam}")


class DecompositionService:
    """Greedy level-by-level extraction of trees and intervals"""

    @staticmethod
    def energy_decomposition(
        collection: TileCollection,
        f: Signal,
        lam: float,
        params: Optional[WavePacketParams] = None,
    ) -> Decomposition:
        """
        Split P into levels n whose vectorial size is at most lam 2^-n

        At level n, while the size exceeds lam 2^-(n+1), the qualifying tree
        with the largest |I_T| (then smallest start, then smallest xi) is
        removed. Packing per level is sum |I_T| (lam 2^-n)^2 / ||f||_2^2.

        Raises:
            PreconditionException: If the vectorial size exceeds lam
        """
        coefficients = TileService.coefficients(collection, f, params)
        table = SizeService.candidate_trees(collection)
        top_measure = table.length * (collection.domain_length / collection.n)
        norm = SignalService.lp_norm(f, 2)

        weights = collection.tile_measure() * np.abs(coefficients) ** 2
        active = collection.mask.copy()

        def tree_values():
            energy = np.bincount(
                collection.ref_index, weights=np.where(active, weights, 0.0), minlength=collection.ref.size
            )
            return (table.matrix @ energy) / top_measure

        values = tree_values()
        size = float(np.sqrt(max(values.max(initial=0.0), 0.0)))
        _check_lambda(lam, size, "Vectorial")

        levels: List[DecompositionLevel] = []
        cap = lam
        for level in range(settings.MAX_DECOMPOSITION_LEVELS):
            threshold = (cap / 2.0) ** 2
            trees = []
            removed = []
            start_size = size
            while True:
                qualifying = np.flatnonzero(values > threshold)
                if qualifying.size == 0:
                    break
                order = np.lexsort((table.xi[qualifying], table.start[qualifying], -table.length[qualifying]))
                row = int(qualifying[order[0]])
                members = table.members(row)
                hit = np.flatnonzero(active & np.isin(collection.ref_index, members))
                value = float(np.sqrt(values[row]))
                active[hit] = False
                removed.append(hit)
                values = tree_values()
                trees.append(
                    TreeSelection(
                        top_index=int(table.top[row]),
                        xi=int(table.xi[row]),
                        top_interval=collection.ref.time_interval(int(table.top[row])),
                        value=value,
                        member_count=int(hit.size),
                    )
                )
                logger.debug(f"Level {level}: tree at {int(table.start[row])} of length {int(table.length[row])}, size {value:.3e}")

            indices = np.sort(np.concatenate(removed)) if removed else np.zeros(0, dtype=np.int64)
            total = float(sum(t.top_interval.measure for t in trees))
            levels.append(
                DecompositionLevel(
                    level=level,
                    cap=cap,
                    trees=tuple(trees),
                    tile_indices=indices,
                    sum_top_measure=total,
                    packing_ratio=0.0 if norm == 0 else total * cap ** 2 / norm ** 2,
                    size=start_size,
                )
            )
            size = float(np.sqrt(max(values.max(initial=0.0), 0.0)))
            cap /= 2.0
            if size <= VANISHING * lam or not active.any():
                break

        logger.debug(f"Energy decomposition: {len(levels)} levels, {int(active.sum())} tiles left")
        return Decomposition(
            kind="energy", lam=lam, norm=norm, levels=tuple(levels), remainder=np.flatnonzero(active)
        )

    @staticmethod
    def mass_decomposition(
        collection: TileCollection,
        g_abs: Signal,
        lam: float,
        exponent: Optional[int] = None,
    ) -> Decomposition:
        """
        Split P into levels n whose dual size is at most lam 2^-n

        At level n, while the dual size exceeds lam 2^-(n+1), the witnessing
        interval I' with the largest length (then smallest start) is chosen and
        every tile with I_P inside I' removed. Packing per level is
        sum |I'| lam 2^-n / ||g||_1.

        Raises:
            PreconditionException: If the dual size exceeds lam
        """
        table = SizeService.dual_table(g_abs, exponent)
        norm = SignalService.lp_norm(g_abs, 1)
        current = collection

        size = SizeService.dual_size(current, g_abs, table=table)
        _check_lambda(lam, size, "Dual")

        levels: List[DecompositionLevel] = []
        cap = lam
        for level in range(settings.MAX_DECOMPOSITION_LEVELS):
            threshold = cap / 2.0
            selections = []
            removed = []
            start_size = size
            while True:
                choice = None
                masks = SizeService.dyadic_ancestors(current)
                for scale in sorted(masks, reverse=True):
                    hits = np.flatnonzero(masks[scale] & (table[scale] > threshold))
                    if hits.size:
                        choice = (scale, int(hits[0]))
                        break
                if choice is None:
                    break
                interval = SizeService.interval_of(current, *choice)
                hit = np.flatnonzero(current.mask & TileService.inside_mask(current, interval))
                current = current.with_mask(current.mask & ~TileService.inside_mask(current, interval))
                removed.append(hit)
                selections.append(
                    TreeSelection(
                        top_index=-1,
                        top_interval=interval,
                        value=float(table[choice[0]][choice[1]]),
                        member_count=int(hit.size),
                    )
                )
                logger.debug(f"Level {level}: interval {interval.key()} removes {hit.size} tiles")

            indices = np.sort(np.concatenate(removed)) if removed else np.zeros(0, dtype=np.int64)
            total = float(sum(s.top_interval.measure for s in selections))
            levels.append(
                DecompositionLevel(
                    level=level,
                    cap=cap,
                    trees=tuple(selections),
                    tile_indices=indices,
                    sum_top_measure=total,
                    packing_ratio=0.0 if norm == 0 else total * cap / norm,
                    size=start_size,
                )
            )
            size = SizeService.dual_size(current, g_abs, table=table)
            cap /= 2.0
            if size <= VANISHING * lam or current.count == 0:
                break

        logger.debug(f"Mass decomposition: {len(levels)} levels, {current.count} tiles left")
        return Decomposition(
            kind="mass", lam=lam, norm=norm, levels=tuple(levels), remainder=current.indices()
        )
