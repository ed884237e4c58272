"""
Tile Size Service
Candidate vectorial trees, the vectorial size and the dual size
"""

import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from ..core import GridMismatchException, settings
from ..schemas import (
    DyadicInterval,
    FrequencyInterval,
    GridInterval,
    Signal,
    Tile,
    TileCollection,
    Tree,
    TreeTable,
    VectorialTree,
    WavePacketParams,
)
from ..utils import log2_exact
from .signal_core import SignalService
from .tiles import TileService

logger = logging.getLogger(__name__)

TREE_CACHE_KEY = "candidate_trees"


def _anchors(a: int, m: int) -> np.ndarray:
    """xi values tried for a top with frequency block [a, a + m)"""
    if m <= 4:
        return np.arange(a, a + m)
    return np.array([a, a + m // 2, a + m - 1])


def _build_table(ref: TileCollection) -> TreeTable:
    n = ref.n
    a_all = ref.block_a
    m_all = ref.block_m
    rows = []
    tops = []
    xis = []
    starts = []
    lengths = []
    for top_block in range(a_all.shape[0]):
        a_t = int(a_all[top_block])
        m_t = int(m_all[top_block])
        positions = np.arange(m_t)
        top_tiles = int(ref.block_offset[top_block]) + positions
        for xi in _anchors(a_t, m_t):
            finer = m_all > m_t
            inside = (a_all - m_all <= a_t) & (a_t + m_t <= a_all + 2 * m_all)
            near = (a_all - 3 * m_all <= xi) & (xi < a_all + 4 * m_all)
            member_blocks = np.flatnonzero(finer & inside & near)
            columns = [top_tiles[:, None]]
            for block in member_blocks:
                ratio = int(m_all[block]) // m_t
                columns.append(
                    int(ref.block_offset[block]) + positions[:, None] * ratio + np.arange(ratio)[None, :]
                )
            rows.append(np.concatenate(columns, axis=1))
            tops.append(top_tiles)
            xis.append(np.full(m_t, xi))
            starts.append(positions * (n // m_t))
            lengths.append(np.full(m_t, n // m_t))

    indptr = [0]
    indices = []
    for block in rows:
        width = block.shape[1]
        indptr.extend(indptr[-1] + width * np.arange(1, block.shape[0] + 1))
        indices.append(block.ravel())
    indices = np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64)
    count = len(indptr) - 1
    matrix = sparse.csr_matrix(
        (np.ones(indices.shape[0]), indices, np.array(indptr, dtype=np.int64)),
        shape=(count, ref.size),
    )
    return TreeTable(
        matrix=matrix,
        top=np.concatenate(tops) if tops else np.zeros(0),
        xi=np.concatenate(xis) if xis else np.zeros(0),
        start=np.concatenate(starts) if starts else np.zeros(0),
        length=np.concatenate(lengths) if lengths else np.zeros(0),
    )


def _translated(tile: Tile, nu: int, family_index: int) -> Tile:
    return Tile(
        time=tile.time,
        freq=FrequencyInterval(a=tile.freq.a + nu, b=tile.freq.b + nu),
        family_index=family_index,
    )


class SizeService:
    """Sizes of tile collections"""

    @staticmethod
    def candidate_trees(collection: TileCollection) -> TreeTable:
        """
        Enumerated maximal vectorial trees of the reference collection

        Tops run over every reference tile, anchors over the whole top band for
        bands of at most 4 bins and over its first, middle and last bin
        otherwise. Members are all tiles P <= P_T with xi in 7w_P. The table is
        built once per reference collection.
        """
        ref = collection.ref
        table = ref._cache.get(TREE_CACHE_KEY)
        if table is None:
            table = _build_table(ref)
            ref._cache[TREE_CACHE_KEY] = table
            logger.debug(f"Enumerated {len(table)} candidate trees, {table.matrix.nnz} memberships")
        return table

    @staticmethod
    def vectorial_tree(collection: TileCollection, row: int) -> VectorialTree:
        """Candidate tree row as a base tree with its active frequency translates"""
        ref = collection.ref
        table = SizeService.candidate_trees(collection)
        members = table.members(row)
        top = ref.tile(int(table.top[row]))
        base = Tree(top=top, xi=int(table.xi[row]), members=tuple(ref.tile(int(i)) for i in members))

        in_tree = np.isin(collection.ref_index, members) & collection.mask
        member_indices = np.flatnonzero(in_tree)
        branches = []
        for k, nu in enumerate(collection.nu):
            chosen = member_indices[collection.family_index[member_indices] == k]
            if chosen.size == 0:
                continue
            branches.append(
                Tree(
                    top=_translated(top, nu, k),
                    xi=int(table.xi[row]) + nu,
                    members=tuple(collection.tile(int(i)) for i in chosen),
                )
            )
        return VectorialTree(
            base=base,
            branches=tuple(branches),
            top_index=int(table.top[row]),
            member_indices=member_indices,
        )

    @staticmethod
    def tree_energies(collection: TileCollection, coefficients: np.ndarray) -> np.ndarray:
        """sum over active P in each candidate tree of |I_P| |<f, phi_P>|^2, per tree"""
        table = SizeService.candidate_trees(collection)
        weights = np.where(collection.mask, collection.tile_measure() * np.abs(coefficients) ** 2, 0.0)
        energy = np.bincount(collection.ref_index, weights=weights, minlength=collection.ref.size)
        return table.matrix @ energy

    @staticmethod
    def vectorial_size(
        collection: TileCollection, f: Signal, params: Optional[WavePacketParams] = None
    ) -> float:
        """Exact maximum over the candidate trees of ((1/|I_T|) sum |I_P||<f, phi_P>|^2)^(1/2)"""
        if collection.count == 0:
            return 0.0
        coefficients = TileService.coefficients(collection, f, params)
        return SizeService.size_from_coefficients(collection, coefficients)

    @staticmethod
    def size_from_coefficients(collection: TileCollection, coefficients: np.ndarray) -> float:
        if collection.count == 0:
            return 0.0
        table = SizeService.candidate_trees(collection)
        values = SizeService.tree_energies(collection, coefficients) / (table.length * collection.domain_length / collection.n)
        return float(math.sqrt(max(float(values.max(initial=0.0)), 0.0)))

    @staticmethod
    def dual_table(g_abs: Signal, exponent: Optional[int] = None) -> Dict[int, np.ndarray]:
        """
        (1/|3I'|) sum |g| chi~_{3I'} dx for every grid-0 dyadic I', by scale

        Maps the scale s to an array over the N / 2^s positions.
        """
        exponent = settings.DECAY_EXPONENT if exponent is None else exponent
        n = g_abs.n
        values = g_abs.modulus
        table = {}
        for scale in range(log2_exact(n) + 1):
            length = 1 << scale
            tripled = min(3 * length, n)
            corr = SignalService.chi_correlation(values, tripled, exponent) / tripled
            starts = (np.arange(n // length) * length - (length if tripled < n else 0)) % n
            table[scale] = corr[starts]
        return table

    @staticmethod
    def dyadic_ancestors(collection: TileCollection) -> Dict[int, np.ndarray]:
        """J+: grid-0 dyadic intervals containing some active tile interval, as masks per scale"""
        n = collection.n
        active = collection.indices()
        starts = collection.time_start[active]
        lengths = collection.time_length[active]
        masks = {}
        for scale in range(log2_exact(n) + 1):
            length = 1 << scale
            mask = np.zeros(n // length, dtype=bool)
            fits = lengths <= length
            mask[starts[fits] >> scale] = True
            masks[scale] = mask
        return masks

    @staticmethod
    def dual_size(
        collection: TileCollection,
        g_abs: Signal,
        exponent: Optional[int] = None,
        table: Optional[Dict[int, np.ndarray]] = None,
    ) -> float:
        """
        sup over I' in J+ of (1/|3I'|) integral |g| chi~_{3I'}

        Raises:
            GridMismatchException: If g lives on another grid
        """
        if g_abs.n != collection.n:
            raise GridMismatchException(f"Tiles on N={collection.n}, signal on N={g_abs.n}")
        if collection.count == 0:
            return 0.0
        table = table if table is not None else SizeService.dual_table(g_abs, exponent)
        value, _ = SizeService.dual_witness(collection, table)
        return value

    @staticmethod
    def dual_witness(collection: TileCollection, table: Dict[int, np.ndarray]) -> Tuple[float, Optional[Tuple[int, int]]]:
        """Largest value over J+ with its (scale, position)"""
        best = 0.0
        where = None
        for scale, mask in SizeService.dyadic_ancestors(collection).items():
            if not mask.any():
                continue
            values = np.where(mask, table[scale], -np.inf)
            position = int(np.argmax(values))
            if values[position] > best:
                best = float(values[position])
                where = (scale, position)
        return best, where

    @staticmethod
    def interval_of(collection: TileCollection, scale: int, position: int) -> GridInterval:
        return DyadicInterval(
            scale=scale, position=position, n=collection.n, domain_length=collection.domain_length
        ).interval

    @staticmethod
    def tile_local_energy(collection: TileCollection, f: Signal, exponent: Optional[int] = None) -> np.ndarray:
        """((1/|I_P|) integral |f|^2 chi~_{I_P})^(1/2) for every tile"""
        exponent = settings.DECAY_EXPONENT if exponent is None else exponent
        values = f.modulus ** 2
        out = np.zeros(collection.size)
        for length in np.unique(collection.time_length):
            length = int(length)
            corr = SignalService.chi_correlation(values, length, exponent) / length
            chosen = collection.time_length == length
            out[chosen] = np.sqrt(corr[collection.time_start[chosen]])
        return out
