"""
Signal Service
Norms, spectra, local averages and the smoothed cutoff on the periodic grid
"""

import logging
import math

import numpy as np

from ..core import GridMismatchException, ValidationException, settings
from ..schemas import GridInterval, Signal
from ..utils import periodic_distance

logger = logging.getLogger(__name__)


class SignalService:
    """Numeric substrate shared by every other service"""

    @staticmethod
    def lp_norm(f: Signal, p: float) -> float:
        """
        Discrete L^p norm (sum |f|^p dx)^(1/p), max |f| for p = inf

        Raises:
            ValidationException: If p < 1
        """
        if p < 1:
            raise ValidationException(f"lp_norm needs p >= 1, got {p}")
        modulus = f.modulus
        if math.isinf(p):
            return float(modulus.max())
        return float((np.sum(modulus ** p) * f.dx) ** (1.0 / p))

    @staticmethod
    def spectrum(f: Signal) -> np.ndarray:
        """Unitary DFT, bins 0 .. N-1 unshifted"""
        return np.fft.fft(f.samples, norm="ortho")

    @staticmethod
    def from_spectrum(values: np.ndarray, domain_length: float = 1.0) -> Signal:
        return Signal(samples=np.fft.ifft(values, norm="ortho"), domain_length=domain_length)

    @staticmethod
    def spectral_energy(f: Signal) -> float:
        """Frequency side of Parseval: sum |f^|^2 dx"""
        return float(np.sum(np.abs(SignalService.spectrum(f)) ** 2) * f.dx)

    @staticmethod
    def local_average(f: Signal, r: float, interval: GridInterval) -> float:
        """
        <f>_{r,I} = ((1/|I|) sum_I |f|^r dx)^(1/r)

        Raises:
            ValidationException: If r < 1 or the interval lives on another grid
        """
        if r < 1:
            raise ValidationException(f"local_average needs r >= 1, got {r}")
        if interval.n != f.n:
            raise ValidationException(f"Interval grid {interval.n} does not match signal grid {f.n}")
        values = f.modulus[interval.indices()]
        if math.isinf(r):
            return float(values.max())
        return float(np.mean(values ** r) ** (1.0 / r))

    @staticmethod
    def block_averages(values: np.ndarray, length: int) -> np.ndarray:
        """Periodic averages over [s, s + length) for every start s"""
        n = values.shape[0]
        doubled = np.concatenate(([0.0], np.cumsum(np.concatenate((values, values)))))
        starts = np.arange(n)
        return (doubled[starts + length] - doubled[starts]) / length

    @staticmethod
    def chi_kernel(length: int, n: int, exponent: int = None) -> np.ndarray:
        """chi~ of the block [0, length) sampled on Z_N"""
        exponent = settings.CHI_EXPONENT if exponent is None else exponent
        dist = periodic_distance(np.arange(n), 0, length, n)
        return (1.0 + dist / float(length)) ** (-exponent)

    @staticmethod
    def cutoff_chi(interval: GridInterval, x, exponent: int = None):
        """
        (1 + dist(x, I)/|I|)^(-exponent) with periodic distance

        Args:
            interval: The block I
            x: Grid index or array of indices
            exponent: Decay exponent, defaults to settings.CHI_EXPONENT

        Raises:
            ValidationException: If exponent < 1
        """
        exponent = settings.CHI_EXPONENT if exponent is None else exponent
        if exponent < 1:
            raise ValidationException(f"cutoff_chi needs exponent >= 1, got {exponent}")
        dist = periodic_distance(x, interval.start, interval.length, interval.n)
        value = (1.0 + dist / float(interval.length)) ** (-exponent)
        return float(value) if np.ndim(value) == 0 else value

    @staticmethod
    def chi_correlation(values: np.ndarray, length: int, exponent: int) -> np.ndarray:
        """
        sum_x values(x) chi~_{[s, s+length)}(x) for every start s

        Circular cross-correlation against the chi~ kernel of [0, length).
        """
        n = values.shape[0]
        kernel = SignalService.chi_kernel(length, n, exponent)
        corr = np.fft.ifft(np.fft.fft(values) * np.conj(np.fft.fft(kernel)))
        return np.maximum(corr.real, 0.0)

    @staticmethod
    def require_same_grid(*signals: Signal) -> None:
        """Raise unless all signals share N and domain_length"""
        first = signals[0]
        for other in signals[1:]:
            if other.n != first.n or other.domain_length != first.domain_length:
                raise GridMismatchException(
                    f"Grid mismatch: N={first.n}/{other.n}, D={first.domain_length}/{other.domain_length}"
                )
