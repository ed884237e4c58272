"""
Operator Norm Service
Lower-bound search for the square function norm on weighted spaces
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..core import ValidationException, parallel_map, settings
from ..schemas import IntervalFamily, OpNormEstimate, Signal, Weight
from ..utils import make_rng, trial_seeds
from .square_function import SquareFunctionService
from .weights_lab import WeightsService

logger = logging.getLogger(__name__)

CANDIDATE_KINDS = ("fourier", "spikes", "bump", "indicator")
MODES = ("strong", "weak")


def _candidate(kind: str, family: IntervalFamily, rng: np.random.Generator, domain_length: float) -> Signal:
    n = family.n
    if kind == "fourier":
        spectrum = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        samples = np.fft.ifft(spectrum, norm="ortho")
    elif kind == "spikes":
        samples = np.zeros(n, dtype=np.complex128)
        count = int(rng.integers(1, 9))
        samples[rng.choice(n, size=count, replace=False)] = rng.choice([-1.0, 1.0], size=count) * rng.uniform(0.5, 1.0, size=count)
    elif kind == "bump":
        omega = family.intervals[int(rng.integers(len(family.intervals)))]
        spectrum = np.zeros(n, dtype=np.complex128)
        spectrum[omega.a:omega.b] = np.exp(2j * np.pi * omega.bins() * int(rng.integers(n)) / n)
        samples = np.fft.ifft(spectrum, norm="ortho")
    elif kind == "indicator":
        length = n >> int(rng.integers(1, max(2, n.bit_length() - 2)))
        start = int(rng.integers(n))
        omega = family.intervals[int(rng.integers(len(family.intervals)))]
        cells = (start + np.arange(length)) % n
        samples = np.zeros(n, dtype=np.complex128)
        samples[cells] = np.exp(2j * np.pi * omega.a * cells / n)
    else:
        raise ValidationException(f"Unknown candidate kind '{kind}'")
    if not np.any(samples):
        samples[0] = 1.0
    return Signal(samples=samples, domain_length=domain_length)


def _spike(n: int, domain_length: float) -> Signal:
    samples = np.zeros(n, dtype=np.complex128)
    samples[0] = n / domain_length
    return Signal(samples=samples, domain_length=domain_length)


def _dual_spikes(family: IntervalFamily, p: float, domain_length: float) -> List[Signal]:
    """
    |h|^(p'-2) h with h = (delta * 1_w^), one per distinct interval length

    ||Tf||_p / ||f||_p >= ||h||_p' / ||delta||_p' for these f.
    """
    if not 1 < p < math.inf:
        return []
    dual = p / (p - 1.0)
    n = family.n
    lengths = set()
    out = []
    for omega in family.intervals:
        if omega.length in lengths:
            continue
        lengths.add(omega.length)
        spectrum = np.zeros(n, dtype=np.complex128)
        spectrum[omega.a:omega.b] = 1.0
        h = np.fft.ifft(spectrum, norm="ortho")
        out.append(Signal(samples=_dual_map(h, dual), domain_length=domain_length))
    return out


def _dual_map(h: np.ndarray, exponent: float) -> np.ndarray:
    """|h|^(exponent - 2) h scaled to sup 1, zero where h vanishes"""
    size = np.abs(h)
    out = np.zeros_like(h)
    positive = size > 0
    out[positive] = size[positive] ** (exponent - 2.0) * h[positive]
    peak = np.abs(out).max(initial=0.0)
    if peak == 0:
        out[0] = 1.0
        return out
    return out / peak


class OpNormService:
    """Structured and random lower bounds for ||T||"""

    @staticmethod
    def ratio(f: Signal, family: IntervalFamily, w: Weight, p: float, mode: str) -> float:
        """||Tf|| / ||f|| in L^p(w), weak or strong on the left"""
        tf = SquareFunctionService.square_fn(f, family)
        denominator = WeightsService.weighted_lp_norm(f, w, p)
        if denominator == 0:
            return 0.0
        if mode == "weak":
            return WeightsService.weak_norm(tf, w, p) / denominator
        return WeightsService.weighted_lp_norm(tf, w, p) / denominator

    @staticmethod
    def power_iteration(
        f: Signal, family: IntervalFamily, w: Weight, p: float, steps: Optional[int] = None
    ) -> Tuple[float, Signal]:
        """
        Nonlinear power method for the strong L^p(w) ratio, started at f

        Each step maps f to |h|^(p'-2) h with
        h = w^-1 sum_k P_k(w |Vf|^(p-2) P_k f), Vf = (P_k f)_k. Returns the
        best ratio met and its signal; f itself when 1 < p < inf fails.
        """
        steps = settings.POWER_STEPS if steps is None else steps
        best_value = OpNormService.ratio(f, family, w, p, "strong")
        best = f
        if not 1 < p < math.inf:
            return best_value, best
        dual = p / (p - 1.0)
        weights = w.array
        safe = np.where(weights > 0, weights, 1.0)
        current = f
        for _ in range(steps):
            stack = SquareFunctionService.project_all(current, family)
            modulus = np.sqrt(np.sum(np.abs(stack) ** 2, axis=0))
            scale = np.zeros_like(modulus)
            positive = modulus > 0
            scale[positive] = modulus[positive] ** (p - 2.0)
            h = SquareFunctionService.synthesize(stack * (scale * weights)[None, :], family) / safe
            if not np.any(np.abs(h) > 0):
                break
            current = f.with_samples(_dual_map(h, dual))
            value = OpNormService.ratio(current, family, w, p, "strong")
            if value > best_value:
                best_value, best = value, current
        return float(best_value), best

    @staticmethod
    def estimate_opnorm(
        family: IntervalFamily,
        w: Weight,
        p: float,
        mode: str = "strong",
        budget: int = 50,
        seed: Optional[int] = None,
    ) -> OpNormEstimate:
        """
        Largest ratio over structured and budget seeded candidates

        The structured candidates are the unit spike and, for 1 < p < inf,
        one dual spike per interval length. Candidate i cycles through random
        Fourier signals, sparse spikes, band-limited bumps on one w_k and
        modulated indicators, drawn with seed + i. In strong mode the best
        few candidates are then refined by the power method. Never more
        than a lower bound.

        Raises:
            ValidationException: On a bad mode, p or budget
        """
        if mode not in MODES:
            raise ValidationException(f"Mode must be one of {MODES}, got '{mode}'")
        if p < 1:
            raise ValidationException(f"estimate_opnorm needs p >= 1, got {p}")
        if budget < 1:
            raise ValidationException(f"budget must be >= 1, got {budget}")
        if w.n != family.n:
            raise ValidationException(f"Weight on N={w.n}, family on N={family.n}")
        seed = settings.DEFAULT_SEED if seed is None else seed
        domain_length = w.values.domain_length

        def evaluate(item: Tuple[int, int]) -> Tuple[float, str, Signal]:
            index, trial_seed = item
            kind = CANDIDATE_KINDS[index % len(CANDIDATE_KINDS)]
            f = _candidate(kind, family, make_rng(trial_seed), domain_length)
            return OpNormService.ratio(f, family, w, p, mode), kind, f

        spike = _spike(family.n, domain_length)
        results = [(OpNormService.ratio(spike, family, w, p, mode), "spike", spike)]
        results += [
            (OpNormService.ratio(f, family, w, p, mode), "dual-spike", f)
            for f in _dual_spikes(family, p, domain_length)
        ]
        results += parallel_map(evaluate, list(enumerate(trial_seeds(seed, budget))))

        if mode == "strong" and 1 < p < math.inf:
            ranked = sorted(range(len(results)), key=lambda i: (-results[i][0], i))
            starts = [results[i][2] for i in ranked[:settings.REFINED_CANDIDATES]]
            refined = parallel_map(lambda f: OpNormService.power_iteration(f, family, w, p), starts)
            results += [(value, "power", f) for value, f in refined]

        best = max(range(len(results)), key=lambda i: (results[i][0], -i))
        value, kind, witness = results[best]
        logger.debug(f"Operator norm lower bound {value:.6f} from a {kind} candidate over {len(results)} trials")
        return OpNormEstimate(
            lower_bound=float(value),
            witness=witness,
            witness_kind=kind,
            mode=mode,
            p=p,
            trials=len(results),
            ratios=tuple(float(r[0]) for r in results),
        )
