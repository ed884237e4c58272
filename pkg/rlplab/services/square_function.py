"""
Square Function Service
Sharp band projections, the square function, vector norms and the dual pairing
"""

import logging
from typing import List, Tuple

import numpy as np

from ..core import GridMismatchException, ValidationException, parallel_map
from ..schemas import FrequencyInterval, IntervalFamily, Signal, VectorSignal
from .signal_core import SignalService

logger = logging.getLogger(__name__)

# Intervals projected per batched inverse FFT
CHUNK = 64


def _chunks(count: int) -> List[Tuple[int, int]]:
    return [(i, min(i + CHUNK, count)) for i in range(0, count, CHUNK)]


def _check_family(f: Signal, family: IntervalFamily) -> None:
    if family.n != f.n:
        raise GridMismatchException(f"Family lives on N={family.n}, signal on N={f.n}")


def _band_stack(spectrum: np.ndarray, intervals) -> np.ndarray:
    """Projections of one spectrum onto a run of intervals, as rows"""
    masked = np.zeros((len(intervals), spectrum.shape[0]), dtype=np.complex128)
    for row, omega in enumerate(intervals):
        masked[row, omega.a:omega.b] = spectrum[omega.a:omega.b]
    return np.fft.ifft(masked, norm="ortho", axis=1)


class SquareFunctionService:
    """The Rubio de Francia square function and its pairing"""

    @staticmethod
    def project(f: Signal, omega: FrequencyInterval) -> Signal:
        """
        Inverse DFT of 1_w f^, a sharp cutoff

        Raises:
            ValidationException: If w leaves [0, N)
        """
        if omega.b > f.n:
            raise ValidationException(f"Interval [{omega.a}, {omega.b}) exceeds [0, {f.n})")
        spectrum = SignalService.spectrum(f)
        masked = np.zeros_like(spectrum)
        masked[omega.a:omega.b] = spectrum[omega.a:omega.b]
        return f.with_samples(np.fft.ifft(masked, norm="ortho"))

    @staticmethod
    def project_all(f: Signal, family: IntervalFamily) -> np.ndarray:
        """All projections stacked as a (K, N) array"""
        _check_family(f, family)
        spectrum = SignalService.spectrum(f)
        intervals = family.intervals
        blocks = parallel_map(
            lambda bounds: _band_stack(spectrum, intervals[bounds[0]:bounds[1]]),
            _chunks(len(intervals)),
        )
        return np.concatenate(blocks, axis=0)

    @staticmethod
    def synthesize(stack: np.ndarray, family: IntervalFamily) -> np.ndarray:
        """
        sum_k (G_k * 1_{w_k}^) for a (K, N) stack, the adjoint of project_all

        Raises:
            GridMismatchException: If the stack shape does not match the family
        """
        if stack.shape != (len(family), family.n):
            raise GridMismatchException(f"Stack of shape {stack.shape} for {len(family)} intervals on N={family.n}")
        spectra = np.fft.fft(stack, norm="ortho", axis=1)
        total = np.zeros(family.n, dtype=np.complex128)
        for row, omega in enumerate(family.intervals):
            total[omega.a:omega.b] += spectra[row, omega.a:omega.b]
        return np.fft.ifft(total, norm="ortho")

    @staticmethod
    def square_values(f: Signal, family: IntervalFamily) -> np.ndarray:
        """Tf samples without building the projection stack"""
        _check_family(f, family)
        spectrum = SignalService.spectrum(f)
        intervals = family.intervals

        def energy(bounds):
            stack = _band_stack(spectrum, intervals[bounds[0]:bounds[1]])
            return np.sum(np.abs(stack) ** 2, axis=0)

        partial = parallel_map(energy, _chunks(len(intervals)))
        total = np.zeros(f.n)
        for block in partial:
            total += block
        return np.sqrt(total)

    @staticmethod
    def square_fn(f: Signal, family: IntervalFamily) -> Signal:
        """Tf = (sum_k |f * 1_{w_k}^|^2)^(1/2)"""
        return f.with_samples(SquareFunctionService.square_values(f, family))

    @staticmethod
    def vector_signal_from_projections(f: Signal, family: IntervalFamily) -> VectorSignal:
        return VectorSignal.from_array(
            SquareFunctionService.project_all(f, family), family, f.domain_length
        )

    @staticmethod
    def vector_norm(g: VectorSignal) -> Signal:
        """|g|(x) = (sum_k |g_k(x)|^2)^(1/2)"""
        total = np.zeros(g.n)
        for component in g.components:
            total += component.modulus ** 2
        return g.components[0].with_samples(np.sqrt(total))

    @staticmethod
    def dual_pairing(f: Signal, g: VectorSignal) -> complex:
        """
        <Tf, g> = sum_k sum_i (f * 1_{w_k}^)(x_i) g_k(x_i) dx, without conjugation

        Raises:
            GridMismatchException: If f and g live on different grids
        """
        if g.n != f.n or g.domain_length != f.domain_length:
            raise GridMismatchException(
                f"Signal grid N={f.n} does not match vector grid N={g.n}"
            )
        spectrum = SignalService.spectrum(f)
        intervals = g.family.intervals
        components = g.stacked()

        def pairing(bounds):
            lo, hi = bounds
            stack = _band_stack(spectrum, intervals[lo:hi])
            return np.sum(stack * components[lo:hi])

        partial = parallel_map(pairing, _chunks(len(intervals)))
        total = 0j
        for value in partial:
            total += value
        return complex(total * f.dx)

    @staticmethod
    def aligned_dual(f: Signal, family: IntervalFamily) -> VectorSignal:
        """g_k = conj(f * 1_{w_k}^) / |Tf|, zero where Tf vanishes"""
        stack = SquareFunctionService.project_all(f, family)
        norm = np.sqrt(np.sum(np.abs(stack) ** 2, axis=0))
        safe = np.where(norm > 0, norm, 1.0)
        dual = np.where(norm > 0, np.conj(stack) / safe, 0.0)
        return VectorSignal.from_array(dual, family, f.domain_length)
