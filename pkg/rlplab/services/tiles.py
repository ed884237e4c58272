"""
Tile Service
Tile collections, the tile order, wave packets, coefficients and the model form
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..core import GridMismatchException, ValidationException
from ..schemas import (
    DyadicInterval,
    GridInterval,
    InOutSplit,
    IntervalFamily,
    Signal,
    Tile,
    TileCollection,
    VectorSignal,
    WavePacketParams,
)
from ..utils import periodic_distance
from .frequency_families import FrequencyFamilyService
from .signal_core import SignalService

logger = logging.getLogger(__name__)

SPLIT_KEYS = ("in-in", "in-out", "out-in", "out-out")


def _collection(n, domain_length, blocks, nu, L, reference=None) -> TileCollection:
    """Columnar collection from (family, a, m, ref) block rows"""
    rows = np.array(blocks, dtype=np.int64).reshape(-1, 4)
    block_m = rows[:, 2]
    offsets = np.concatenate(([0], np.cumsum(block_m)[:-1])) if len(rows) else np.zeros(0, np.int64)
    tile_block = np.repeat(np.arange(len(rows)), block_m)
    tile_position = np.concatenate([np.arange(m) for m in block_m]) if len(rows) else np.zeros(0, np.int64)
    return TileCollection(
        n=n,
        domain_length=domain_length,
        block_family=rows[:, 0],
        block_a=rows[:, 1],
        block_m=block_m,
        block_offset=offsets,
        block_ref=rows[:, 3],
        tile_block=tile_block,
        tile_position=tile_position,
        mask=np.ones(tile_block.shape[0], dtype=bool),
        nu=tuple(int(v) for v in nu),
        L=int(L),
        reference=reference,
    )


def taper(m: int, width: float) -> np.ndarray:
    """
    Mother profile W((k + 1/2)/m) for k in 0..m-1

    Raised-cosine ramps over [width, 2 width] and [1 - 2 width, 1 - width],
    zero outside [width, 1 - width] and 1 in between. The ramps are C^1, so
    the packets decay like the cube of the distance.
    """
    u = (np.arange(m) + 0.5) / m
    ramp_up = 0.5 * (1.0 - np.cos(np.pi * np.clip((u - width) / width, 0.0, 1.0)))
    ramp_down = 0.5 * (1.0 - np.cos(np.pi * np.clip((1.0 - width - u) / width, 0.0, 1.0)))
    return np.minimum(ramp_up, ramp_down)


def _as_grid(interval: Union[GridInterval, DyadicInterval]) -> GridInterval:
    return interval.interval if isinstance(interval, DyadicInterval) else interval


def _spectra_rows(collection: TileCollection, spectra: np.ndarray) -> np.ndarray:
    if spectra.shape[0] == 1:
        return np.zeros(collection.block_a.shape[0], dtype=np.int64)
    return collection.block_family


class TileService:
    """Tiles, packets and the model bilinear form"""

    @staticmethod
    def tiles_for_family(family: IntervalFamily, domain_length: float = 1.0) -> TileCollection:
        """
        All area-one tiles I x J, J a tiling block of some w_k

        The reference collection holds the blocks J - a_k deduplicated, with
        nu_k = a_k; each family block records its reference block.
        """
        n = family.n
        ref_keys: Dict[tuple, int] = {}
        blocks = []
        for k, omega in enumerate(family.intervals):
            for piece in FrequencyFamilyService.tiling_blocks(omega):
                key = (piece.a - omega.a, piece.length)
                if key not in ref_keys:
                    ref_keys[key] = len(ref_keys)
                blocks.append((k, piece.a, piece.length, ref_keys[key]))

        ref_blocks = [(0, a, m, index) for (a, m), index in sorted(ref_keys.items(), key=lambda kv: kv[1])]
        L = family.max_length
        reference = _collection(n, domain_length, ref_blocks, (), L)
        collection = _collection(
            n, domain_length, blocks, (w.a for w in family.intervals), L, reference=reference
        )
        logger.debug(
            f"Tiles for {len(family)} intervals: {collection.size} tiles, {reference.size} reference tiles"
        )
        return collection

    @staticmethod
    def tile_order(first: Tile, second: Tile) -> str:
        """
        'less' if I_P strictly inside I_P' and w_P' inside 3w_P, 'greater' for
        the reverse, 'equal' for the same tile, else 'incomparable'
        """
        if first == second:
            return "equal"

        def below(p: Tile, q: Tile) -> bool:
            ip, iq = p.time.interval, q.time.interval
            if not iq.contains(ip) or ip.key() == iq.key():
                return False
            lo, hi = p.freq.dilate(3)
            return lo <= q.freq.a and q.freq.b <= hi

        if below(first, second):
            return "less"
        if below(second, first):
            return "greater"
        return "incomparable"

    @staticmethod
    def inside_mask(collection: TileCollection, interval: Union[GridInterval, DyadicInterval]) -> np.ndarray:
        """Tiles (active or not) with I_P inside the interval"""
        interval = _as_grid(interval)
        if interval.is_full:
            return np.ones(collection.size, dtype=bool)
        offset = (collection.time_start - interval.start) % collection.n
        return offset + collection.time_length <= interval.length

    @staticmethod
    def restrict(collection: TileCollection, interval: Union[GridInterval, DyadicInterval]) -> TileCollection:
        """P_<=(I): active tiles with I_P inside I"""
        return collection.subset(TileService.inside_mask(collection, interval))

    @staticmethod
    def restrict_equal(collection: TileCollection, interval: Union[GridInterval, DyadicInterval]) -> TileCollection:
        """P_=(J): active tiles with I_P = J"""
        interval = _as_grid(interval)
        keep = (collection.time_start == interval.start) & (collection.time_length == interval.length)
        return collection.subset(keep)

    @staticmethod
    def good_tiles(
        collection: TileCollection,
        stops: Sequence[Union[GridInterval, DyadicInterval]],
        Q: Optional[Union[GridInterval, DyadicInterval]] = None,
    ) -> TileCollection:
        """
        Remove every tile whose time interval sits inside a stopping interval

        Raises:
            ValidationException: If a stop leaves Q
        """
        bad = np.zeros(collection.size, dtype=bool)
        q = _as_grid(Q) if Q is not None else None
        for stop in stops:
            stop = _as_grid(stop)
            if q is not None and not q.contains(stop):
                raise ValidationException(f"Stopping interval {stop.key()} is not inside {q.key()}")
            bad |= TileService.inside_mask(collection, stop)
        return collection.subset(~bad)

    @staticmethod
    def packet_spectrum(tile: Tile, params: Optional[WavePacketParams] = None) -> np.ndarray:
        """
        DFT of phi_P, supported in w_P

        Raises:
            ValidationException: If w_P leaves [0, N)
        """
        params = params or WavePacketParams()
        n = tile.time.n
        if tile.freq.b > n:
            raise ValidationException(f"Tile frequency [{tile.freq.a}, {tile.freq.b}) exceeds [0, {n})")
        m = tile.freq.length
        if m * tile.time.length != n:
            raise ValidationException(f"Tile {tile.time.key()} x [{tile.freq.a}, {tile.freq.b}) is not area one")
        center = tile.time.start + tile.time.length // 2
        bins = np.arange(tile.freq.a, tile.freq.b)
        values = np.zeros(n, dtype=np.complex128)
        phase = np.exp(-2j * np.pi * ((bins * center) % n) / n)
        values[tile.freq.a:tile.freq.b] = (
            math.sqrt(n) / tile.time.domain_length * taper(m, params.taper_width) * phase
        )
        return values

    @staticmethod
    def wave_packet(tile: Tile, params: Optional[WavePacketParams] = None) -> Signal:
        """L1-normalized packet on P, sup |phi_P| = sum W / L at the centre of I_P, comparable to 1/|I_P|"""
        spectrum = TileService.packet_spectrum(tile, params)
        return SignalService.from_spectrum(spectrum, tile.time.domain_length)

    @staticmethod
    def envelope_constant(tile: Tile, params: Optional[WavePacketParams] = None) -> float:
        """max over x of |phi_P(x)| |I_P| (1 + dist(x, I_P)/|I_P|)^M, M the packet decay order"""
        params = params or WavePacketParams()
        packet = TileService.wave_packet(tile, params)
        interval = tile.time.interval
        dist = periodic_distance(np.arange(interval.n), interval.start, interval.length, interval.n)
        envelope = (1.0 + dist / interval.length) ** params.packet_decay
        return float(np.max(packet.modulus * interval.measure * envelope))

    @staticmethod
    def _block_coefficients(collection: TileCollection, spectra: np.ndarray, width: float) -> np.ndarray:
        n = collection.n
        rows = _spectra_rows(collection, spectra)
        out = np.zeros(collection.size, dtype=np.complex128)
        for m in np.unique(collection.block_m):
            m = int(m)
            blocks = np.flatnonzero(collection.block_m == m)
            k = np.arange(m)
            c = (n // m) // 2
            a = collection.block_a[blocks]
            bins = a[:, None] + k[None, :]
            G = spectra[rows[blocks][:, None], bins] * taper(m, width) * np.exp(2j * np.pi * k * c / n)
            sums = m * np.fft.ifft(G, axis=1)
            centers = k * (n // m) + c
            phase = np.exp(2j * np.pi * ((a[:, None] * centers[None, :]) % n) / n)
            out[collection.block_offset[blocks][:, None] + k[None, :]] = phase * sums / math.sqrt(n)
        return out

    @staticmethod
    def coefficients(collection: TileCollection, f: Signal, params: Optional[WavePacketParams] = None) -> np.ndarray:
        """
        <f, phi_P> for every tile, active or not

        Raises:
            GridMismatchException: If f lives on another grid
        """
        params = params or WavePacketParams()
        if f.n != collection.n or f.domain_length != collection.domain_length:
            raise GridMismatchException(f"Tiles on N={collection.n}, signal on N={f.n}")
        spectra = SignalService.spectrum(f)[None, :]
        return TileService._block_coefficients(collection, spectra, params.taper_width)

    @staticmethod
    def vector_coefficients(
        collection: TileCollection, g: VectorSignal, params: Optional[WavePacketParams] = None
    ) -> np.ndarray:
        """
        <g_k, phi_P> with k the family index of each tile

        Raises:
            GridMismatchException: If g does not match the collection
        """
        params = params or WavePacketParams()
        if g.n != collection.n or g.domain_length != collection.domain_length:
            raise GridMismatchException(f"Tiles on N={collection.n}, vector signal on N={g.n}")
        if len(g.components) != len(collection.nu):
            raise GridMismatchException(
                f"Tiles built for {len(collection.nu)} intervals, vector has {len(g.components)}"
            )
        spectra = np.fft.fft(g.stacked(), norm="ortho", axis=1)
        return TileService._block_coefficients(collection, spectra, params.taper_width)

    @staticmethod
    def reconstruction_residuals(
        collection: TileCollection,
        f: Signal,
        family: IntervalFamily,
        params: Optional[WavePacketParams] = None,
    ) -> List[float]:
        """
        ||1_w f^ - sum_P |I_P| <f, phi_P> phi_P^|| / ||1_w f^|| per interval w_k

        Inactive tiles contribute nothing. Returns 0 where 1_w f^ vanishes.
        """
        params = params or WavePacketParams()
        n = collection.n
        spectrum = SignalService.spectrum(f)
        coeffs = np.where(collection.mask, TileService.coefficients(collection, f, params), 0.0)
        approx = np.zeros((len(collection.nu), n), dtype=np.complex128)
        for b in range(collection.block_a.shape[0]):
            a = int(collection.block_a[b])
            m = int(collection.block_m[b])
            offset = int(collection.block_offset[b])
            k = np.arange(m)
            c = (n // m) // 2
            d = coeffs[offset:offset + m] * np.exp(-2j * np.pi * ((a * k) % m) / m)
            approx[collection.block_family[b], a:a + m] += (
                math.sqrt(n) / m
                * taper(m, params.taper_width)
                * np.exp(-2j * np.pi * (((a + k) * c) % n) / n)
                * np.fft.fft(d)
            )

        residuals = []
        for fam, omega in enumerate(family.intervals):
            target = np.zeros(n, dtype=np.complex128)
            target[omega.a:omega.b] = spectrum[omega.a:omega.b]
            norm = np.linalg.norm(target)
            residuals.append(0.0 if norm == 0 else float(np.linalg.norm(target - approx[fam]) / norm))
        return residuals

    @staticmethod
    def reconstruction_multiplier(
        collection: TileCollection, params: Optional[WavePacketParams] = None
    ) -> np.ndarray:
        """
        Per-bin multiplier of f -> sum_P |I_P| <f, phi_P> phi_P, one row per w_k

        A block with all m tiles active acts as W^2 on its m bins; inactive
        blocks give 0.

        Raises:
            ValidationException: If some block is only partly active
        """
        params = params or WavePacketParams()
        out = np.zeros((len(collection.nu), collection.n))
        for b in range(collection.block_a.shape[0]):
            a = int(collection.block_a[b])
            m = int(collection.block_m[b])
            offset = int(collection.block_offset[b])
            active = collection.mask[offset:offset + m]
            if not active.any():
                continue
            if not active.all():
                raise ValidationException(f"Block [{a}, {a + m}) is partly active, no frequency multiplier")
            out[collection.block_family[b], a:a + m] += taper(m, params.taper_width) ** 2
        return out

    @staticmethod
    def predicted_residuals(
        collection: TileCollection,
        f: Signal,
        family: IntervalFamily,
        params: Optional[WavePacketParams] = None,
    ) -> List[float]:
        """||(1 - M_k) 1_w f^|| / ||1_w f^|| with M_k the reconstruction multiplier"""
        multiplier = TileService.reconstruction_multiplier(collection, params)
        spectrum = SignalService.spectrum(f)
        residuals = []
        for fam, omega in enumerate(family.intervals):
            band = spectrum[omega.a:omega.b]
            norm = np.linalg.norm(band)
            loss = (1.0 - multiplier[fam, omega.a:omega.b]) * band
            residuals.append(0.0 if norm == 0 else float(np.linalg.norm(loss) / norm))
        return residuals

    @staticmethod
    def model_form(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        params: Optional[WavePacketParams] = None,
    ) -> float:
        """sum over active P of |I_P| |<f, phi_P>| |<g_k, phi_P>|"""
        params = params or WavePacketParams()
        cf = TileService.coefficients(collection, f, params)
        cg = TileService.vector_coefficients(collection, g, params)
        terms = collection.tile_measure() * np.abs(cf) * np.abs(cg)
        return float(np.sum(terms[collection.mask]))

    @staticmethod
    def in_out_split(
        collection: TileCollection,
        f: Signal,
        g: VectorSignal,
        interval: Union[GridInterval, DyadicInterval],
        params: Optional[WavePacketParams] = None,
    ) -> InOutSplit:
        """
        The four forms with f and g cut to 3I or its complement

        The collection is taken as given; pass restrict(P, I) for P_<=(I).
        """
        interval = _as_grid(interval)
        inner = interval.tripled().mask()
        parts_f = {"in": f.with_samples(f.samples * inner), "out": f.with_samples(f.samples * ~inner)}
        stacked = g.stacked()
        parts_g = {
            "in": VectorSignal.from_array(stacked * inner, g.family, g.domain_length),
            "out": VectorSignal.from_array(stacked * ~inner, g.family, g.domain_length),
        }
        values = {}
        for key in SPLIT_KEYS:
            t1, t2 = key.split("-")
            values[key] = TileService.model_form(collection, parts_f[t1], parts_g[t2], params)
        return InOutSplit(values=values, full=TileService.model_form(collection, f, g, params))
