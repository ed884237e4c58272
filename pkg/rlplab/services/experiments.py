"""
Experiment Service
Registry, runners and report emission for the desk-scale experiments
"""

import logging
import math
import os
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core import (
    UnknownExperimentException,
    ValidationException,
    init_output_dir,
    parallel_map,
    settings,
    write_csv,
    write_json,
    write_plot,
)
from ..schemas import (
    DyadicInterval,
    ExperimentConfig,
    ExperimentFiles,
    ExperimentInfo,
    ExperimentReport,
    ExperimentResult,
    IntervalFamily,
    Signal,
    VectorSignal,
)
from ..utils import log2_exact, make_rng, sweep_sizes, trial_seeds
from .decompositions import DecompositionService
from .dyadic_machinery import DyadicService
from .frequency_families import FrequencyFamilyService
from .opnorm import OpNormService
from .signal_core import SignalService
from .square_function import SquareFunctionService
from .tile_estimates import EstimateService
from .tile_sizes import SizeService
from .tiles import TileService
from .weights_lab import WeightsService

logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentConfig, Dict[str, float]], ExperimentResult]

# name -> (runner, info)
_REGISTRY: Dict[str, Tuple[Runner, ExperimentInfo]] = {}


def register(name: str, anchor: str, description: str, **defaults):
    """Add an experiment runner to the registry"""

    def wrap(fn: Runner) -> Runner:
        _REGISTRY[name] = (fn, ExperimentInfo(name=name, anchor=anchor, defaults=defaults, description=description))
        return fn

    return wrap


def _random_signal(n: int, rng: np.random.Generator, domain_length: float = 1.0) -> Signal:
    return Signal(samples=rng.standard_normal(n) + 1j * rng.standard_normal(n), domain_length=domain_length)


def _random_vector(family: IntervalFamily, rng: np.random.Generator, domain_length: float = 1.0) -> VectorSignal:
    values = rng.standard_normal((len(family), family.n)) + 1j * rng.standard_normal((len(family), family.n))
    return VectorSignal.from_array(values, family, domain_length)


def _report(cfg: ExperimentConfig, thresholds, metrics, constants, failed) -> ExperimentReport:
    return ExperimentReport(
        experiment=cfg.name,
        n=cfg.n,
        seed=cfg.seed,
        passed=not failed,
        metrics=metrics,
        constants_measured=constants,
        thresholds=dict(thresholds),
        failed_assertions=failed,
    )


def _growth(values: Sequence[float]) -> float:
    return float(values[-1] / values[0]) if values and values[0] > 0 else math.inf


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    result = stats.linregress(np.log(xs), np.log(ys))
    return float(result.slope)


def _flat_signal(n: int, rng: np.random.Generator) -> Signal:
    """Unit-modulus spectrum with random phases"""
    return SignalService.from_spectrum(np.exp(2j * np.pi * rng.uniform(size=n)))


def _plateau_signal(multiplier: np.ndarray, family: IntervalFamily, rng: np.random.Generator) -> Signal:
    """Random phases on the bins of each w_k where the reconstruction multiplier is 1"""
    spectrum = np.zeros(family.n, dtype=np.complex128)
    for k, omega in enumerate(family.intervals):
        flat = np.abs(multiplier[k, omega.a:omega.b] - 1.0) <= 1e-12
        phases = np.exp(2j * np.pi * rng.uniform(size=omega.length))
        spectrum[omega.a:omega.b] = np.where(flat, phases, 0.0)
    return SignalService.from_spectrum(spectrum)


@register(
    "plancherel",
    "Plancherel: ||Tf||_2 = ||f||_2 for a partition family",
    "Random signals against a partition family",
    n=1024,
    family_spec="partition",
    budget=100,
    thresholds={"max_deviation": 1e-10},
)
def _plancherel(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    family = FrequencyFamilyService.parse_family(cfg.family_spec, cfg.n)

    def trial(seed):
        f = _random_signal(cfg.n, make_rng(seed))
        tf = SquareFunctionService.square_fn(f, family)
        return SignalService.lp_norm(tf, 2) / SignalService.lp_norm(f, 2)

    ratios = parallel_map(trial, trial_seeds(cfg.seed, cfg.budget))
    deviation = max(abs(r - 1.0) for r in ratios)
    failed = [] if deviation <= thresholds["max_deviation"] else [f"max_deviation {deviation!r} > {thresholds['max_deviation']!r}"]
    return ExperimentResult(
        report=_report(cfg, thresholds, {"max_deviation": deviation, "trials": cfg.budget}, {}, failed),
        columns=["trial", "ratio", "deviation"],
        rows=[(i, r, abs(r - 1.0)) for i, r in enumerate(ratios)],
        plot_columns=["trial", "ratio"],
        plot=[(i, r) for i, r in enumerate(ratios)],
    )


@register(
    "p-growth",
    "Norm growth of T as p grows",
    "Operator norm lower bounds at large p on a lacunary family",
    n=2048,
    family_spec="lacunary:2",
    p_values=[4.0, 8.0, 16.0],
    budget=200,
    thresholds={"slope_min": 0.5, "slope_max": 1.5},
)
def _p_growth(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    family = FrequencyFamilyService.parse_family(cfg.family_spec, cfg.n)
    w = WeightsService.parse_weight(cfg.weight_spec, cfg.n)
    bounds = []
    for p in cfg.p_values:
        estimate = OpNormService.estimate_opnorm(family, w, p, "strong", cfg.budget, cfg.seed)
        bounds.append((p, estimate.lower_bound, estimate.witness_kind))
        logger.info(f"p-growth: p={p} lower bound {estimate.lower_bound:.6f} ({estimate.witness_kind})")
    slope = _slope([b[0] for b in bounds], [b[1] for b in bounds]) if len(bounds) > 1 else 0.0
    failed = []
    if slope < thresholds["slope_min"]:
        failed.append(f"slope {slope!r} < {thresholds['slope_min']!r}")
    if slope > thresholds["slope_max"]:
        failed.append(f"slope {slope!r} > {thresholds['slope_max']!r}")
    return ExperimentResult(
        report=_report(cfg, thresholds, {"slope": slope, "witnesses": [b[2] for b in bounds]}, {}, failed),
        columns=["p", "lower_bound", "witness"],
        rows=bounds,
        plot_columns=["p", "lower_bound"],
        plot=[(b[0], b[1]) for b in bounds],
    )


@register(
    "sub2-failure",
    "Unboundedness of T on L^p for p < 2",
    "Lower bounds for the unit-interval family across N doublings down to the smallest grid",
    n=2048,
    family_spec="unit",
    p_values=[1.5],
    budget=20,
    thresholds={"growth_min": 1.5, "exactness_max": 1e-9},
)
def _sub2_failure(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    p = cfg.p_values[0]
    rows = []
    count = log2_exact(cfg.n) - log2_exact(settings.EXPERIMENT_MIN_N) + 1
    for n in sweep_sizes(cfg.n, count=max(count, 1), minimum=settings.EXPERIMENT_MIN_N):
        family = FrequencyFamilyService.parse_family(cfg.family_spec, n)
        w = WeightsService.parse_weight(cfg.weight_spec, n)
        estimate = OpNormService.estimate_opnorm(family, w, p, "strong", cfg.budget, cfg.seed)
        rows.append((n, estimate.lower_bound, estimate.witness_kind))
        logger.info(f"sub2-failure: N={n} lower bound {estimate.lower_bound:.6f}")
    bounds = [r[1] for r in rows]
    growth = _growth(bounds)
    failed = []
    if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
        failed.append("lower bounds not strictly increasing in N")
    if growth < thresholds["growth_min"]:
        failed.append(f"growth {growth!r} < {thresholds['growth_min']!r}")
    metrics: Dict[str, Any] = {"growth": growth, "p": p}
    if cfg.family_spec == "unit" and cfg.weight_spec.startswith("constant") and p <= 2:
        # Tf is the constant ||f||_2 here, so the spike attains N^(1/p - 1/2)
        gap = max(abs(r[1] / r[0] ** (1.0 / p - 0.5) - 1.0) for r in rows)
        metrics["closed_form_gap"] = gap
        if gap > thresholds["exactness_max"]:
            failed.append(f"closed form gap {gap!r} > {thresholds['exactness_max']!r}")
    return ExperimentResult(
        report=_report(cfg, thresholds, metrics, {}, failed),
        columns=["n", "lower_bound", "witness"],
        rows=rows,
        plot_columns=["n", "lower_bound"],
        plot=[(r[0], r[1]) for r in rows],
    )


@register(
    "sparse-domination",
    "Sparse bound for <Tf, g> and the model form",
    "Pairing and model form against the sparse form across N",
    n=2048,
    family_spec="lacunary:2",
    budget=50,
    thresholds={"growth_max": 2.0},
)
def _sparse_domination(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    rows = []
    for n in sweep_sizes(cfg.n, minimum=settings.EXPERIMENT_MIN_N):
        family = FrequencyFamilyService.parse_family(cfg.family_spec, n)
        tiles = TileService.tiles_for_family(family)

        def trial(item):
            index, seed = item
            rng = make_rng(seed)
            f = _random_signal(n, rng)
            g = SquareFunctionService.aligned_dual(f, family) if index % 2 == 0 else _random_vector(family, rng)
            g_abs = SquareFunctionService.vector_norm(g)
            sparse = DyadicService.sparse_form(DyadicService.build_sparse(f, g_abs), f, g_abs)
            pairing = abs(SquareFunctionService.dual_pairing(f, g))
            model = TileService.model_form(tiles, f, g)
            return pairing / sparse, model / sparse

        results = parallel_map(trial, list(enumerate(trial_seeds(cfg.seed, cfg.budget))))
        rows.append((n, max(r[0] for r in results), max(r[1] for r in results)))
        logger.info(f"sparse-domination: N={n} K={rows[-1][1]:.4f} model K={rows[-1][2]:.4f}")
    growth_pairing = _growth([r[1] for r in rows])
    growth_model = _growth([r[2] for r in rows])
    failed = []
    if growth_pairing > thresholds["growth_max"]:
        failed.append(f"pairing K growth {growth_pairing!r} > {thresholds['growth_max']!r}")
    if growth_model > thresholds["growth_max"]:
        failed.append(f"model K growth {growth_model!r} > {thresholds['growth_max']!r}")
    return ExperimentResult(
        report=_report(
            cfg,
            thresholds,
            {"growth_pairing": growth_pairing, "growth_model": growth_model},
            {"K_pairing": max(r[1] for r in rows), "K_model": max(r[2] for r in rows)},
            failed,
        ),
        columns=["n", "max_K_pairing", "max_K_model"],
        rows=rows,
        plot_columns=["n", "max_K_pairing"],
        plot=[(r[0], r[1]) for r in rows],
    )


@register(
    "model-sparse",
    "Sparse bound for the model form",
    "Model form over the full tile collection against the sparse form",
    n=2048,
    family_spec="lacunary:2",
    budget=20,
    thresholds={"growth_max": 2.0},
)
def _model_sparse(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    rows = []
    for n in sweep_sizes(cfg.n, minimum=settings.EXPERIMENT_MIN_N):
        family = FrequencyFamilyService.parse_family(cfg.family_spec, n)
        tiles = TileService.tiles_for_family(family)

        def trial(seed):
            rng = make_rng(seed)
            f = _random_signal(n, rng)
            return EstimateService.model_sparse_ratio(tiles, f, _random_vector(family, rng))["ratio"]

        ratios = parallel_map(trial, trial_seeds(cfg.seed, cfg.budget))
        rows.append((n, max(ratios), float(np.median(ratios))))
    growth = _growth([r[1] for r in rows])
    failed = [] if growth <= thresholds["growth_max"] else [f"growth {growth!r} > {thresholds['growth_max']!r}"]
    return ExperimentResult(
        report=_report(cfg, thresholds, {"growth": growth}, {"K_model": max(r[1] for r in rows)}, failed),
        columns=["n", "max_ratio", "median_ratio"],
        rows=rows,
        plot_columns=["n", "max_ratio"],
        plot=[(r[0], r[1]) for r in rows],
    )


def _consistency(ratios: Sequence[float], spread_max: float) -> Tuple[float, float, List[str]]:
    """Smallest C with bound_i <= C formula_i, and its spread against the median ratio"""
    constant = max(ratios)
    median = float(np.median(ratios))
    failed = [] if constant <= spread_max * median else [f"constant {constant!r} > {spread_max!r} x median {median!r}"]
    return constant, median, failed


@register(
    "weighted-exponent",
    "Weighted bound with exponent max(1/(p-2), 1) on [w]_A(p/2)",
    "Power-weight sweep against the weighted upper bound",
    n=1024,
    family_spec="lacunary:2",
    p_values=[2.5, 3.0, 4.0],
    budget=20,
    thresholds={"spread_max": 10.0, "slope_min": 0.0, "slope_max": 1.15},
)
def _weighted_exponent(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    family = FrequencyFamilyService.parse_family(cfg.family_spec, cfg.n)
    rows = []
    slopes = {}
    for p in cfg.p_values:
        _, exponent = WeightsService.exponent_formula(p)
        samples = []
        for a in np.linspace(0.1, max(0.1, 0.8 * (p / 2.0 - 1.0)), 4):
            w = WeightsService.power_weight(float(a), 0, cfg.n)
            characteristic = WeightsService.ap_characteristic(w, p / 2.0)
            bound = OpNormService.estimate_opnorm(family, w, p, "strong", cfg.budget, cfg.seed).lower_bound
            rows.append((p, float(a), characteristic, bound, bound / characteristic ** exponent))
            samples.append((characteristic, bound))
        try:
            slopes[repr(p)] = WeightsService.fit_exponent(samples).slope
        except ValidationException as e:
            logger.warning(f"weighted-exponent: no slope at p={p}: {str(e)}")
    constant, median, failed = _consistency([r[4] for r in rows], thresholds["spread_max"])
    if 3.0 in cfg.p_values:
        # exponent 1 at p = 3, with room for the fit
        slope = slopes.get(repr(3.0))
        if slope is None:
            failed.append("no fitted slope at p=3.0")
        elif not thresholds["slope_min"] <= slope <= thresholds["slope_max"]:
            failed.append(
                f"slope at p=3.0 {slope!r} outside [{thresholds['slope_min']!r}, {thresholds['slope_max']!r}]"
            )
    return ExperimentResult(
        report=_report(cfg, thresholds, {"median_ratio": median, "slopes": slopes}, {"C": constant}, failed),
        columns=["p", "a", "ap_char", "norm_lb", "ratio"],
        rows=rows,
        plot_columns=["ap_char", "norm_lb"],
        plot=[(r[2], r[3]) for r in rows],
    )


@register(
    "weak-endpoint",
    "Weak-type L2(w) bound [w]_A1^(1/2) [w]_Ainf^(1/2) log(e + [w]_Ainf)",
    "Weak-norm lower bounds against the endpoint bound",
    n=1024,
    family_spec="lacunary:2",
    p_values=[2.0],
    budget=20,
    thresholds={"spread_max": 10.0},
)
def _weak_endpoint(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    family = FrequencyFamilyService.parse_family(cfg.family_spec, cfg.n)
    rows = []
    for a in np.linspace(-0.1, -0.7, 4):
        w = WeightsService.power_weight(float(a), 0, cfg.n)
        a1 = WeightsService.a1_characteristic(w)
        ainfty = WeightsService.ainfty_characteristic(w)
        bound = WeightsService.weak_bound_formula(2.0, a1, ainfty)
        lower = OpNormService.estimate_opnorm(family, w, 2.0, "weak", cfg.budget, cfg.seed).lower_bound
        conjectured = WeightsService.conjectured_weak_bound(a1)
        rows.append((float(a), a1, ainfty, lower, bound, lower / bound, lower / conjectured))
    constant, median, failed = _consistency([r[5] for r in rows], thresholds["spread_max"])
    return ExperimentResult(
        report=_report(
            cfg,
            thresholds,
            {"median_ratio": median, "max_conjectured_ratio": max(r[6] for r in rows)},
            {"C": constant},
            failed,
        ),
        columns=["a", "a1", "ainfty", "weak_lb", "bound", "ratio", "conjectured_ratio"],
        rows=rows,
        plot_columns=["a1", "weak_lb"],
        plot=[(r[1], r[3]) for r in rows],
    )


@register(
    "congruent-composition",
    "Congruent refinement through composition of projections",
    "Factorization identity and the [w]_A1^5 ratio over a power-weight sweep",
    n=1024,
    family_spec="lacunary:2",
    budget=10,
    thresholds={"factorization_max": 1e-12, "ratio_max": 1.0},
)
def _congruent_composition(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    base = FrequencyFamilyService.parse_family(cfg.family_spec, cfg.n)
    pieces = FrequencyFamilyService.halving_pieces(base)
    rows = []
    for a in (-0.5, -0.3, 0.0, 0.3):
        w = WeightsService.power_weight(a, 0, cfg.n)
        report = WeightsService.congruent_composition_check(base, pieces, w, cfg.budget, cfg.seed)
        rows.append((a, report.a1, report.factorization_error, report.max_ratio))
    error = max(r[2] for r in rows)
    ratio = max(r[3] for r in rows)
    failed = []
    if error > thresholds["factorization_max"]:
        failed.append(f"factorization error {error!r} > {thresholds['factorization_max']!r}")
    if ratio > thresholds["ratio_max"]:
        failed.append(f"ratio {ratio!r} > {thresholds['ratio_max']!r}")
    return ExperimentResult(
        report=_report(cfg, thresholds, {"factorization_error": error, "max_ratio": ratio}, {"ratio": ratio}, failed),
        columns=["a", "a1", "factorization_error", "max_ratio"],
        rows=rows,
        plot_columns=["a1", "max_ratio"],
        plot=[(r[1], r[3]) for r in rows],
    )


@register(
    "sparse-sharpness",
    "L2 averages in the sparse form cannot be lowered to L1",
    "Sparse constants with q = 2 and q = 1 for a spike on the unit family",
    n=2048,
    family_spec="unit",
    thresholds={"growth_min": 2.0},
)
def _sparse_sharpness(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    rows = []
    for n in sweep_sizes(cfg.n, minimum=settings.EXPERIMENT_MIN_N):
        family = FrequencyFamilyService.parse_family(cfg.family_spec, n)
        samples = np.zeros(n, dtype=np.complex128)
        samples[n // 3] = n
        f = Signal(samples=samples)
        g = SquareFunctionService.aligned_dual(f, family)
        g_abs = SquareFunctionService.vector_norm(g)
        sparse = DyadicService.build_sparse(f, g_abs)
        pairing = abs(SquareFunctionService.dual_pairing(f, g))
        k2 = pairing / DyadicService.sparse_form(sparse, f, g_abs, q=2)
        k1 = pairing / DyadicService.sparse_form(sparse, f, g_abs, q=1)
        rows.append((n, k2, k1, len(sparse)))
    growth_l1 = _growth([r[2] for r in rows])
    growth_l2 = _growth([r[1] for r in rows])
    failed = [] if growth_l1 >= thresholds["growth_min"] else [f"L1 growth {growth_l1!r} < {thresholds['growth_min']!r}"]
    return ExperimentResult(
        report=_report(cfg, thresholds, {"growth_l1": growth_l1, "growth_l2": growth_l2}, {}, failed),
        columns=["n", "K_q2", "K_q1", "intervals"],
        rows=rows,
        plot_columns=["n", "K_q1"],
        plot=[(r[0], r[2]) for r in rows],
    )


@register(
    "exponent-table",
    "Exponent arithmetic of the weighted bounds",
    "phi(p), weight exponents, extrapolation and lacunary bounds",
    n=64,
    p_values=[2.25, 2.5, 3.0, 4.0, 6.0, 8.0],
    thresholds={"tolerance": 0.0},
)
def _exponent_table(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    rows = []
    for p in cfg.p_values:
        phi, exponent = WeightsService.exponent_formula(p)
        low, high = WeightsService.lacunary_exponent_bounds(p)
        rows.append((p, phi, exponent, WeightsService.extrapolated_exponent(p, 2.0, 1.0), low, high))
    checks = {
        "exponent_at_3": WeightsService.exponent_formula(3.0)[1],
        "exponent_at_2.5": WeightsService.exponent_formula(2.5)[1],
        "phi_at_4": WeightsService.exponent_formula(4.0)[0],
    }
    expected = {"exponent_at_3": 1.0, "exponent_at_2.5": 2.0, "phi_at_4": 2.0}
    failed = [
        f"{key} = {checks[key]!r}, expected {expected[key]!r}"
        for key in expected
        if abs(checks[key] - expected[key]) > thresholds["tolerance"]
    ]
    return ExperimentResult(
        report=_report(cfg, thresholds, checks, {}, failed),
        columns=["p", "phi", "exponent", "extrapolated", "lacunary_low", "lacunary_high"],
        rows=rows,
        plot_columns=["p", "exponent"],
        plot=[(r[0], r[2]) for r in rows],
    )


def _order_matrix(tiles) -> np.ndarray:
    """less[i, j] for P_i < P_j over the active tiles"""
    idx = tiles.indices()
    start = tiles.time_start[idx]
    length = tiles.time_length[idx]
    a = tiles.freq_a[idx]
    m = tiles.freq_m[idx]
    inside = (start[:, None] >= start[None, :]) & (
        start[:, None] + length[:, None] <= start[None, :] + length[None, :]
    )
    strict = inside & (length[:, None] < length[None, :])
    freq = (a[None, :] >= a[:, None] - m[:, None]) & (a[None, :] + m[None, :] <= a[:, None] + 2 * m[:, None])
    return strict & freq


def _tile_ratios(cfg: ExperimentConfig, size: int) -> Dict[str, float]:
    """Tree, good-tile, out-part and single-scale ratios at one grid size"""
    family = FrequencyFamilyService.parse_family(cfg.family_spec, size)
    tiles = TileService.tiles_for_family(family)
    rng = make_rng(cfg.seed + size)
    f = _random_signal(size, rng)
    g = _random_vector(family, rng)
    rows = EstimateService.random_tree_rows(tiles, cfg.budget, rng)
    tree = [
        EstimateService.tree_estimate_check(tiles, SizeService.vectorial_tree(tiles, row), f, g) for row in rows
    ]
    # second quarter of the domain, the same geometry at every size
    quarter = DyadicInterval(scale=log2_exact(size) - 2, position=1, n=size)

    def trial(seed):
        local = make_rng(seed)
        f = _random_signal(size, local)
        g = _random_vector(family, local)
        construction = DyadicService.build_sparse_tree(f, SquareFunctionService.vector_norm(g))
        root = construction.nodes[0].interval
        stops = [node.interval for node in construction.nodes if node.parent == 0]
        good = EstimateService.good_tile_checks(tiles, f, g, root, stops)
        return (
            good["size_ratio"],
            good["dual_ratio"],
            good["form_ratio"],
            EstimateService.out_part_check(tiles, f, g, quarter)["max_out"],
            EstimateService.single_scale_check(tiles, f, g, quarter, 3),
        )

    results = np.array(parallel_map(trial, trial_seeds(cfg.seed + size, cfg.budget)), dtype=float)
    means = results.mean(axis=0)
    return {
        "tree": float(np.median(tree)) if tree else 0.0,
        "tree_max": max(tree, default=0.0),
        "good_size": float(means[0]),
        "good_dual": float(means[1]),
        "good_form": float(means[2]),
        "out_part": float(means[3]),
        "single_scale": float(means[4]),
    }


def _stability(values: Sequence[float]) -> float:
    return _growth(sorted(values)) if min(values) > 0 else math.inf


@register(
    "machinery",
    "Tile, tree, size and decomposition invariants",
    "Area one, order axioms, packet support and decay, decompositions, reconstruction and measured constants",
    n=1024,
    family_spec="lacunary:2",
    budget=20,
    thresholds={
        "support_max": 1e-12,
        "envelope_max": 20.0,
        "residual_max": 0.1,
        "generic_residual_max": 0.75,
        "prediction_max": 1e-9,
        "tree_stability_max": 1.5,
        "ratio_stability_max": 1.5,
    },
)
def _machinery(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    n = cfg.n
    rng = make_rng(cfg.seed)
    family = FrequencyFamilyService.parse_family(cfg.family_spec, n)
    tiles = TileService.tiles_for_family(family)
    metrics: Dict[str, Any] = {}
    constants: Dict[str, Any] = {}
    failed: List[str] = []

    area_ok = all(Fraction(int(tiles.time_length[i] * tiles.freq_m[i]), n) == 1 for i in range(tiles.size))
    metrics["area_one"] = area_ok
    if not area_ok:
        failed.append("tile with area other than one")

    order_tiles = TileService.tiles_for_family(FrequencyFamilyService.parse_family(cfg.family_spec, min(n, 256)))
    less = _order_matrix(order_tiles)
    strict = not np.any(np.diag(less)) and not np.any(less & less.T)
    composed = (less.astype(np.int64) @ less.astype(np.int64)) > 0
    metrics["order_strict"] = bool(strict)
    metrics["transitivity_violations"] = int(np.count_nonzero(composed & ~less))
    if not strict:
        failed.append("tile order is not irreflexive and antisymmetric")

    support = 0.0
    envelope = 0.0
    for i in rng.choice(tiles.size, size=min(cfg.budget, tiles.size), replace=False):
        tile = tiles.tile(int(i))
        spectrum = SignalService.spectrum(TileService.wave_packet(tile))
        outside = np.ones(n, dtype=bool)
        outside[tile.freq.a:tile.freq.b] = False
        support = max(support, float(np.abs(spectrum[outside]).max(initial=0.0) / np.abs(spectrum).max()))
        envelope = max(envelope, TileService.envelope_constant(tile))
    metrics["packet_support"] = support
    constants["envelope"] = envelope
    if support > thresholds["support_max"]:
        failed.append(f"packet spectrum leaks {support!r} outside its band")
    if envelope > thresholds["envelope_max"]:
        failed.append(f"packet envelope constant {envelope!r} > {thresholds['envelope_max']!r}")

    f = _random_signal(n, rng)
    g = _random_vector(family, rng)
    g_abs = SquareFunctionService.vector_norm(g)
    lam = max(SizeService.vectorial_size(tiles, f), 1e-300)
    energy = DecompositionService.energy_decomposition(tiles, f, lam)
    dual_lam = max(SizeService.dual_size(tiles, g_abs), 1e-300)
    mass = DecompositionService.mass_decomposition(tiles, g_abs, dual_lam)
    for decomposition in (energy, mass):
        parts = [lvl.tile_indices for lvl in decomposition.levels] + [decomposition.remainder]
        joined = np.sort(np.concatenate(parts))
        if not np.array_equal(joined, tiles.indices()):
            failed.append(f"{decomposition.kind} levels do not partition the tiles")
        if any(lvl.size > lvl.cap * (1 + 1e-12) for lvl in decomposition.levels):
            failed.append(f"{decomposition.kind} size cap violated")
        constants[f"{decomposition.kind}_packing"] = max(lvl.packing_ratio for lvl in decomposition.levels)

    multiplier = TileService.reconstruction_multiplier(tiles)
    residuals = TileService.reconstruction_residuals(tiles, _plateau_signal(multiplier, family, rng), family)
    flat = _flat_signal(n, rng)
    generic = TileService.reconstruction_residuals(tiles, flat, family)
    gap = max(
        max(abs(x - y) for x, y in zip(generic, TileService.predicted_residuals(tiles, flat, family))),
        max(
            abs(x - y)
            for x, y in zip(
                TileService.reconstruction_residuals(tiles, f, family),
                TileService.predicted_residuals(tiles, f, family),
            )
        ),
    )
    metrics["max_residual"] = max(residuals)
    metrics["generic_residual"] = max(generic)
    metrics["prediction_gap"] = gap
    if max(residuals) > thresholds["residual_max"]:
        failed.append(f"reconstruction residual {max(residuals)!r} > {thresholds['residual_max']!r}")
    if max(generic) > thresholds["generic_residual_max"]:
        failed.append(f"generic reconstruction residual {max(generic)!r} > {thresholds['generic_residual_max']!r}")
    if gap > thresholds["prediction_max"]:
        failed.append(f"reconstruction differs from its multiplier by {gap!r}")

    measured = [_tile_ratios(cfg, size) for size in (n // 2, n)]
    for key in measured[0]:
        constants[key] = [m[key] for m in measured]
    keys = ("tree", "good_size", "good_dual", "good_form", "out_part", "single_scale")
    stability = {key: _stability(constants[key]) for key in keys}
    metrics.update({f"{key}_stability": value for key, value in stability.items()})
    if stability["tree"] > thresholds["tree_stability_max"]:
        failed.append(f"tree ratio stability {stability['tree']!r} > {thresholds['tree_stability_max']!r}")
    for key, value in stability.items():
        if key != "tree" and value > thresholds["ratio_stability_max"]:
            failed.append(f"{key} ratio stability {value!r} > {thresholds['ratio_stability_max']!r}")

    constants["size_domination"] = EstimateService.size_domination_check(tiles, f)
    construction = DyadicService.build_sparse_tree(f, g_abs)
    constants.update({f"sparse_{k}": v for k, v in construction.constants.items()})

    return ExperimentResult(
        report=_report(cfg, thresholds, metrics, constants, failed),
        columns=["family", "residual", "generic_residual"],
        rows=[(k, r, q) for k, (r, q) in enumerate(zip(residuals, generic))],
        plot_columns=["family", "generic_residual"],
        plot=[(k, q) for k, q in enumerate(generic)],
    )


@register(
    "characteristics-oracle",
    "Exact A_1, A_p and A_infinity characteristics",
    "Vectorized characteristics against a brute-force oracle on random step weights",
    n=64,
    p_values=[1.5, 2.0, 3.0],
    budget=20,
    thresholds={"relative_tolerance": 1e-12},
)
def _characteristics_oracle(cfg: ExperimentConfig, thresholds) -> ExperimentResult:
    def trial(seed):
        rng = make_rng(seed)
        levels = rng.uniform(1.0, 10.0, size=int(rng.integers(2, 9)))
        w = WeightsService.step_weight(levels, cfg.n)
        fast = WeightsService.characteristics(w, cfg.p_values)
        slow = WeightsService.brute_force_characteristics(
            WeightsService.step_weight(levels, cfg.n), cfg.p_values
        )
        pairs = [(fast.a1, slow.a1), (fast.ainfty, slow.ainfty)]
        pairs += [(fast.ap[k], slow.ap[k]) for k in fast.ap]
        error = max(abs(x - y) / abs(y) for x, y in pairs)
        return fast.a1, fast.ainfty, error

    results = parallel_map(trial, trial_seeds(cfg.seed, cfg.budget))
    worst = max(r[2] for r in results)
    failed = [] if worst <= thresholds["relative_tolerance"] else [f"relative error {worst!r} > {thresholds['relative_tolerance']!r}"]
    return ExperimentResult(
        report=_report(cfg, thresholds, {"max_relative_error": worst}, {}, failed),
        columns=["trial", "a1", "ainfty", "relative_error"],
        rows=[(i, *r) for i, r in enumerate(results)],
        plot_columns=["a1", "ainfty"],
        plot=[(r[0], r[1]) for r in results],
    )


class ExperimentService:
    """Experiment registry access and report emission"""

    @staticmethod
    def list_experiments() -> List[ExperimentInfo]:
        return [info for _, info in sorted(_REGISTRY.values(), key=lambda item: item[1].name)]

    @staticmethod
    def get(name: str) -> Tuple[Runner, ExperimentInfo]:
        """
        Raises:
            UnknownExperimentException: If no experiment has that name
        """
        if name not in _REGISTRY:
            raise UnknownExperimentException(f"Unknown experiment '{name}'")
        return _REGISTRY[name]

    @staticmethod
    def build_config(name: str, **overrides) -> ExperimentConfig:
        """Registry defaults with every non-None override applied"""
        _, info = ExperimentService.get(name)
        values = {k: v for k, v in info.defaults.items() if k != "thresholds"}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig(name=name, **values)

    @staticmethod
    def run_experiment(cfg: ExperimentConfig) -> ExperimentFiles:
        """Run one experiment and write report.json, data.csv and plot.dat"""
        runner, info = ExperimentService.get(cfg.name)
        thresholds = {**info.defaults.get("thresholds", {}), **cfg.thresholds}
        logger.info(f"Running {cfg.name} at N={cfg.n}, seed {cfg.seed}")
        result = runner(cfg, thresholds)
        files = ExperimentService.emit_report(result, cfg.output_dir)
        if files.passed:
            logger.info(f"{cfg.name} passed, reports in {os.path.dirname(files.report_json)}")
        else:
            logger.info(f"{cfg.name} failed: {'; '.join(files.failed_assertions)}")
        return files

    @staticmethod
    def emit_report(result: ExperimentResult, output_dir: Optional[str] = None) -> ExperimentFiles:
        """Deterministic report files under <output_dir>/<experiment>/"""
        base = init_output_dir(output_dir)
        target = init_output_dir(os.path.join(base, result.report.experiment))
        report_json = write_json(os.path.join(target, "report.json"), result.report.model_dump())
        data_csv = write_csv(os.path.join(target, "data.csv"), result.columns, result.rows)
        plot_dat = write_plot(os.path.join(target, "plot.dat"), result.plot_columns, result.plot)
        return ExperimentFiles(
            report_json=report_json,
            data_csv=data_csv,
            plot_dat=plot_dat,
            passed=result.report.passed,
            failed_assertions=list(result.report.failed_assertions),
        )
