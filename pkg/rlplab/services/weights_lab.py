"""
Weights Lab Service
Weights, Muckenhoupt characteristics, weighted norms and exponent arithmetic
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core import ValidationException, parallel_map, settings
from ..schemas import Characteristics, CompositionReport, ExponentFit, IntervalFamily, Signal, Weight
from ..utils import conjugate_exponent, grid_shift, log2_exact, make_rng, point_distance, trial_seeds
from ..utils.codecs import read_signal
from .dyadic_machinery import DyadicService
from .frequency_families import FrequencyFamilyService
from .signal_core import SignalService
from .square_function import SquareFunctionService

logger = logging.getLogger(__name__)


def _doubled_prefix(values: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(np.concatenate((values, values)))))


def _dyadic_rows(values: np.ndarray, grid_id: int, scale: int) -> np.ndarray:
    """Blocks of one shifted grid at one scale, one row per block"""
    shift = grid_shift(grid_id, scale)
    return np.roll(values, -shift).reshape(-1, 1 << scale)


class WeightsService:
    """Weight construction and characteristic computations"""

    @staticmethod
    def power_weight(a: float, basepoint: int, n: int, domain_length: float = 1.0) -> Weight:
        """w(x) = max(dist(x, basepoint), dx)^a with periodic distance"""
        dx = domain_length / n
        dist = point_distance(np.arange(n), basepoint % n, n) * dx
        return Weight.from_array(np.maximum(dist, dx) ** a, domain_length)

    @staticmethod
    def step_weight(levels: Sequence[float], n: int, domain_length: float = 1.0) -> Weight:
        """
        Piecewise-constant weight, len(levels) equal steps

        Raises:
            ValidationException: If there are more levels than samples
        """
        levels = [float(v) for v in levels]
        if not levels or len(levels) > n:
            raise ValidationException(f"Step weight needs 1..{n} levels, got {len(levels)}")
        index = (np.arange(n) * len(levels)) // n
        return Weight.from_array(np.asarray(levels)[index], domain_length)

    @staticmethod
    def parse_weight(spec: str, n: int, domain_length: float = 1.0) -> Weight:
        """
        Parse a --weight value

        Grammar: power:<a>[@<basepoint>] | constant:<c> | step:<v1,v2,...> | file:<path>

        Raises:
            ValidationException: On an unknown or malformed spec
        """
        kind, _, rest = spec.strip().partition(":")
        try:
            if kind == "power":
                exponent, _, base = rest.partition("@")
                return WeightsService.power_weight(float(exponent), int(base or 0), n, domain_length)
            if kind == "constant":
                return Weight.from_array(np.full(n, float(rest or 1.0)), domain_length)
            if kind == "step":
                return WeightsService.step_weight([float(v) for v in rest.split(",") if v.strip()], n, domain_length)
            if kind == "file":
                signal = read_signal(rest)
                if signal.n != n:
                    raise ValidationException(f"Weight file holds N={signal.n}, expected {n}")
                return Weight(values=signal)
        except ValidationException:
            raise
        except ValueError as e:
            raise ValidationException(f"Malformed weight spec '{spec}': {str(e)}")
        raise ValidationException(f"Unknown weight spec '{spec}'")

    @staticmethod
    def ap_characteristic(w: Weight, p: float) -> float:
        """
        max over all intervals of <w> <w^(1-p')>^(p-1)

        Exact over all N^2 periodic intervals up to
        settings.EXACT_CHARACTERISTIC_LIMIT, three-grid dyadic above.

        Raises:
            ValidationException: If p <= 1
        """
        if p <= 1:
            raise ValidationException(f"ap_characteristic needs p > 1, got {p}")
        key = f"ap:{p!r}"
        if key in w.cached_ap:
            return w.cached_ap[key]
        values = w.array
        dual = values ** (1.0 - conjugate_exponent(p))
        n = w.n
        best = 1.0
        if n <= settings.EXACT_CHARACTERISTIC_LIMIT:
            for length in range(1, n + 1):
                avg = SignalService.block_averages(values, length)
                avg_dual = SignalService.block_averages(dual, length)
                best = max(best, float(np.max(avg * avg_dual ** (p - 1.0))))
        else:
            logger.warning(f"N={n} above the exact limit, using three-grid dyadic A_p")
            for scale in range(log2_exact(n) + 1):
                for grid_id in range(3):
                    avg = _dyadic_rows(values, grid_id, scale).mean(axis=1)
                    avg_dual = _dyadic_rows(dual, grid_id, scale).mean(axis=1)
                    best = max(best, float(np.max(avg * avg_dual ** (p - 1.0))))
        w.cached_ap[key] = best
        return best

    @staticmethod
    def a1_characteristic(w: Weight) -> float:
        """max over samples of M(w)/w"""
        key = "a1"
        if key not in w.cached_ap:
            maximal = DyadicService.maximal_fn(w.values, 1).modulus
            w.cached_ap[key] = max(1.0, float(np.max(maximal / w.array)))
        return w.cached_ap[key]

    @staticmethod
    def ainfty_characteristic(w: Weight) -> float:
        """
        max over intervals Q of (1/w(Q)) sum_Q M(w 1_Q) dx

        For a proper interval Q, M(w 1_Q) is the maximal function of Q read
        as a segment: only sub-intervals of Q are averaged, so intervals that
        wrap through the complement of Q and meet it in two pieces are left
        out. The full period uses the periodic maximal function. Above
        settings.EXACT_AINFTY_LIMIT the three-grid dyadic restriction is used.
        """
        key = "ainfty"
        if key in w.cached_ap:
            return w.cached_ap[key]
        n = w.n
        if n > settings.EXACT_AINFTY_LIMIT:
            logger.warning(f"N={n} above the exact A_infinity limit, using three-grid dyadic restriction")
            value = WeightsService.dyadic_ainfty_characteristic(w)
        else:
            values = w.array
            prefix = _doubled_prefix(values)
            starts = np.arange(n)
            running = np.zeros((n, n))
            best = 1.0
            for end in range(n - 1):
                u = np.arange(end + 1)
                sums = prefix[starts[:, None] + end + 1] - prefix[starts[:, None] + u[None, :]]
                averages = sums / (end + 1 - u)[None, :]
                np.maximum(running[:, :end + 1], np.maximum.accumulate(averages, axis=1), out=running[:, :end + 1])
                mass = prefix[starts + end + 1] - prefix[starts]
                best = max(best, float(np.max(running[:, :end + 1].sum(axis=1) / mass)))
            full = DyadicService.maximal_fn(w.values, 1).modulus
            value = max(best, float(full.sum() / values.sum()))
        w.cached_ap[key] = value
        return value

    @staticmethod
    def dyadic_ainfty_characteristic(w: Weight) -> float:
        """A_infinity over the three shifted grids, M taken over blocks dyadic relative to Q"""
        values = w.array
        best = 1.0
        for grid_id in range(3):
            for scale in range(log2_exact(w.n) + 1):
                rows = _dyadic_rows(values, grid_id, scale)
                width = rows.shape[1]
                running = np.zeros_like(rows)
                for inner in range(scale + 1):
                    size = 1 << inner
                    means = rows.reshape(rows.shape[0], width // size, size).mean(axis=2)
                    np.maximum(running, np.repeat(means, size, axis=1), out=running)
                best = max(best, float(np.max(running.sum(axis=1) / rows.sum(axis=1))))
        return best

    @staticmethod
    def characteristics(w: Weight, p_values: Sequence[float] = (2.0,)) -> Characteristics:
        return Characteristics(
            a1=WeightsService.a1_characteristic(w),
            ap={repr(float(p)): WeightsService.ap_characteristic(w, float(p)) for p in p_values},
            ainfty=WeightsService.ainfty_characteristic(w),
            exact=w.n <= min(settings.EXACT_AINFTY_LIMIT, settings.EXACT_CHARACTERISTIC_LIMIT),
        )

    @staticmethod
    def brute_force_characteristics(w: Weight, p_values: Sequence[float] = (2.0,)) -> Characteristics:
        """
        Interval-by-interval evaluation of all three characteristics

        Independent of the vectorized routines; only meant for small N. A_inf
        follows the segment convention of ainfty_characteristic: sub-intervals
        of each proper Q only, periodic averages on the full period.
        """
        values = w.array
        n = w.n
        prefix = _doubled_prefix(values)

        maximal = np.array(values, dtype=float)
        for start in range(n):
            for length in range(1, n + 1):
                avg = (prefix[start + length] - prefix[start]) / length
                cells = (start + np.arange(length)) % n
                maximal[cells] = np.maximum(maximal[cells], avg)
        a1 = max(1.0, float(np.max(maximal / values)))

        ap = {}
        for p in p_values:
            p = float(p)
            dual = values ** (1.0 - conjugate_exponent(p))
            best = 1.0
            for start in range(n):
                for length in range(1, n + 1):
                    cells = (start + np.arange(length)) % n
                    best = max(best, float(values[cells].mean() * dual[cells].mean() ** (p - 1.0)))
            ap[repr(p)] = best

        ainfty = max(1.0, float(maximal.sum() / values.sum()))
        for start in range(n):
            for length in range(1, n):
                local = values[(start + np.arange(length)) % n]
                local_prefix = np.concatenate(([0.0], np.cumsum(local)))
                u = np.arange(length)[:, None]
                v = np.arange(length)[None, :]
                averages = np.where(
                    v >= u, (local_prefix[v + 1] - local_prefix[u]) / np.maximum(v - u + 1, 1), -np.inf
                )
                suffix = np.maximum.accumulate(averages[:, ::-1], axis=1)[:, ::-1]
                inner = np.diagonal(np.maximum.accumulate(suffix, axis=0))
                ainfty = max(ainfty, float(inner.sum() / local.sum()))
        return Characteristics(a1=a1, ap=ap, ainfty=ainfty, exact=True)

    @staticmethod
    def weighted_lp_norm(f: Signal, w: Weight, p: float) -> float:
        """
        (sum |f|^p w dx)^(1/p)

        Raises:
            ValidationException: If p < 1
        """
        if p < 1:
            raise ValidationException(f"weighted_lp_norm needs p >= 1, got {p}")
        if math.isinf(p):
            return float(f.modulus.max())
        return float(np.sum(f.modulus ** p * w.array) * f.dx) ** (1.0 / p)

    @staticmethod
    def weak_norm(f: Signal, w: Weight, p: float) -> float:
        """
        max over sample values v of v w({|f| >= v})^(1/p)

        Raises:
            ValidationException: If p < 1
        """
        if p < 1:
            raise ValidationException(f"weak_norm needs p >= 1, got {p}")
        modulus = f.modulus
        order = np.argsort(-modulus, kind="stable")
        levels = modulus[order]
        mass = np.cumsum(w.array[order]) * f.dx
        # ties share the mass of every sample at that level
        last = np.r_[levels[1:] != levels[:-1], True]
        return float(np.max(levels[last] * mass[last] ** (1.0 / p), initial=0.0))

    @staticmethod
    def exponent_formula(p: float, p0: float = 2.0, q0: float = math.inf) -> Tuple[float, float]:
        """
        phi(p) = (q0/p)'(p/p0 - 1) + 1 and the weight exponent
        max(1/(p - p0), (q0 - 1)/(q0 - p)) / (q0/p)'

        Raises:
            ValidationException: Unless p0 < p < q0
        """
        if not p0 < p < q0:
            raise ValidationException(f"exponent_formula needs {p0} < p < {q0}, got {p}")
        if math.isinf(q0):
            conj = 1.0
            ratio = 1.0
        else:
            conj = conjugate_exponent(q0 / p)
            ratio = (q0 - 1.0) / (q0 - p)
        phi = conj * (p / p0 - 1.0) + 1.0
        return phi, max(1.0 / (p - p0), ratio) / conj

    @staticmethod
    def weak_bound_formula(p0: float, a1: float, ainfty: float) -> float:
        """[w]_A1^(1/p0) [w]_Ainf^(1/p0') log(e + [w]_Ainf)^(2/p0)"""
        return (
            a1 ** (1.0 / p0)
            * ainfty ** (1.0 / conjugate_exponent(p0))
            * math.log(math.e + ainfty) ** (2.0 / p0)
        )

    @staticmethod
    def conjectured_weak_bound(a1: float) -> float:
        return a1 * math.log(math.e + a1)

    @staticmethod
    def exponent_lower_bound(s: float, p0: float, q0: float, alpha: float, gamma: float) -> float:
        """max(p0/(s - p0) alpha, (q0/s)' gamma)"""
        if not p0 < s < q0:
            raise ValidationException(f"exponent_lower_bound needs {p0} < s < {q0}, got {s}")
        conj = 1.0 if math.isinf(q0) else conjugate_exponent(q0 / s)
        return max(p0 / (s - p0) * alpha, conj * gamma)

    @staticmethod
    def extrapolated_exponent(p: float, p0: float, lam: float) -> float:
        """max(1, (p0 - lam)/(p - lam))"""
        if p <= lam:
            raise ValidationException(f"extrapolated_exponent needs p > lambda, got p={p}, lambda={lam}")
        return max(1.0, (p0 - lam) / (p - lam))

    @staticmethod
    def lacunary_exponent_bounds(p: float) -> Tuple[float, float]:
        """(max(1, 3/(2(p-1))), 1/(2(p-1)) + max(1, 1/(p-1)))"""
        if p <= 1:
            raise ValidationException(f"lacunary_exponent_bounds needs p > 1, got {p}")
        return max(1.0, 3.0 / (2.0 * (p - 1.0))), 1.0 / (2.0 * (p - 1.0)) + max(1.0, 1.0 / (p - 1.0))

    @staticmethod
    def fit_exponent(samples: Sequence[Tuple[float, float]]) -> ExponentFit:
        """
        Least-squares slope of log(norm) against log(characteristic)

        width is the half-width of the 95% slope interval.

        Raises:
            ValidationException: With fewer than 4 samples or equal characteristics
        """
        pairs = [(float(x), float(y)) for x, y in samples if x > 0 and y > 0]
        if len(pairs) < 4:
            raise ValidationException(f"fit_exponent needs at least 4 positive samples, got {len(pairs)}")
        x = np.log([pair[0] for pair in pairs])
        y = np.log([pair[1] for pair in pairs])
        if np.ptp(x) == 0:
            raise ValidationException("fit_exponent needs distinct characteristics")
        result = stats.linregress(x, y)
        width = float(stats.t.ppf(0.975, len(pairs) - 2) * result.stderr)
        return ExponentFit(
            slope=float(result.slope),
            intercept=float(result.intercept),
            width=width,
            stderr=float(result.stderr),
            samples=len(pairs),
            rvalue=float(result.rvalue) if np.isfinite(result.rvalue) else 0.0,
        )

    @staticmethod
    def congruent_composition_check(
        lacunary: IntervalFamily,
        pieces: Sequence[int],
        w: Weight,
        trials: int = 10,
        seed: Optional[int] = None,
    ) -> CompositionReport:
        """
        ||T_cong f||^2_{L2(w)} against [w]_A1^5 ||f||^2_{L2(w)} on random f

        Also measures the factorization T_{k,n} f = T_{k,n}(T_k f).
        """
        seed = settings.DEFAULT_SEED if seed is None else seed
        if trials < 1:
            raise ValidationException(f"trials must be >= 1, got {trials}")
        congruent = FrequencyFamilyService.make_congruent(lacunary, pieces)
        a1 = WeightsService.a1_characteristic(w)
        n = lacunary.n

        def trial(trial_seed: int):
            rng = make_rng(trial_seed)
            f = Signal(samples=rng.standard_normal(n) + 1j * rng.standard_normal(n), domain_length=w.values.domain_length)
            scale = max(SignalService.lp_norm(f, 2), 1e-300)
            error = 0.0
            outer = SquareFunctionService.project_all(f, lacunary)
            spectra = np.fft.fft(outer, norm="ortho", axis=1)
            for index, omega in enumerate(congruent.intervals):
                parent = next(k for k, big in enumerate(lacunary.intervals) if omega.inside(big))
                twice = np.zeros(n, dtype=np.complex128)
                twice[omega.a:omega.b] = spectra[parent, omega.a:omega.b]
                direct = SquareFunctionService.project(f, omega).samples
                error = max(error, float(np.linalg.norm(np.fft.ifft(twice, norm="ortho") - direct) / scale))
            tf = SquareFunctionService.square_fn(f, congruent)
            lhs = WeightsService.weighted_lp_norm(tf, w, 2) ** 2
            rhs = a1 ** 5 * WeightsService.weighted_lp_norm(f, w, 2) ** 2
            return error, lhs / rhs

        results = parallel_map(trial, trial_seeds(seed, trials))
        ratios = [r for _, r in results]
        return CompositionReport(
            factorization_error=max(e for e, _ in results),
            max_ratio=max(ratios),
            ratios=ratios,
            a1=a1,
            trials=trials,
            pieces=[int(v) for v in pieces],
        )
