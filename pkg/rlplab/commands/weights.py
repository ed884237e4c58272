"""
Weight commands
Characteristic tables, operator-norm search and exponent fitting
"""

import logging

import numpy as np

from ..core import ValidationException
from ..services import FrequencyFamilyService, OpNormService, WeightsService
from ..services.opnorm import MODES
from ..utils import parse_number_list
from .common import add_grid_arguments, emit_csv

logger = logging.getLogger(__name__)


def run_weights(args) -> int:
    w = WeightsService.parse_weight(args.weight, args.n)
    table = WeightsService.characteristics(w, args.p)
    rows = [("a1", "", table.a1), ("ainfty", "", table.ainfty)]
    rows += [("ap", key, value) for key, value in sorted(table.ap.items(), key=lambda item: float(item[0]))]
    if args.report:
        emit_csv(["characteristic", "p", "value"], rows)
    else:
        for name, p, value in rows:
            print(f"{name}{'(' + p + ')' if p else ''} = {value!r}")
    return 0


def run_opnorm(args) -> int:
    family = FrequencyFamilyService.parse_family(args.family, args.n)
    w = WeightsService.parse_weight(args.weight, args.n)
    estimate = OpNormService.estimate_opnorm(family, w, args.p, args.mode, args.budget, args.seed)
    emit_csv(
        ["mode", "p", "lower_bound", "witness", "trials"],
        [(estimate.mode, estimate.p, estimate.lower_bound, estimate.witness_kind, estimate.trials)],
    )
    return 0


def run_exponent_fit(args) -> int:
    if args.p <= 2:
        raise ValidationException(f"exponent-fit needs p > 2, got {args.p}")
    if args.a_grid:
        grid = parse_number_list(args.a_grid)
    else:
        grid = list(np.linspace(0.1, max(0.1, 0.8 * (args.p / 2.0 - 1.0)), 4))
    family = FrequencyFamilyService.parse_family(args.family, args.n)
    rows = []
    for a in grid:
        w = WeightsService.power_weight(float(a), 0, args.n)
        characteristic = WeightsService.ap_characteristic(w, args.p / 2.0)
        lower = OpNormService.estimate_opnorm(family, w, args.p, "strong", args.budget, args.seed).lower_bound
        rows.append((float(a), characteristic, lower))
    emit_csv(["a", "ap_char", "norm_lb"], rows)
    fit = WeightsService.fit_exponent([(r[1], r[2]) for r in rows])
    print(f"# slope {fit.slope!r} +/- {fit.width!r}, proven exponent {WeightsService.exponent_formula(args.p)[1]!r}")
    return 0


def register(subparsers) -> None:
    weights = subparsers.add_parser("weights", help="A_1, A_p and A_infinity characteristics of a weight")
    add_grid_arguments(weights, family=False)
    weights.add_argument("--weight", default="power:0.5", help="power:<a>[@<x0>] | constant:<c> | step:<v,...> | file:<path>")
    weights.add_argument("--p", type=float, nargs="+", default=[2.0])
    weights.add_argument("--report", action="store_true", help="Print the table as CSV")
    weights.set_defaults(handler=run_weights)

    opnorm = subparsers.add_parser("opnorm", help="Lower bound for the weighted operator norm")
    add_grid_arguments(opnorm)
    opnorm.add_argument("--weight", default="constant:1")
    opnorm.add_argument("--p", type=float, default=2.0)
    opnorm.add_argument("--mode", choices=MODES, default="strong")
    opnorm.add_argument("--budget", type=int, default=50)
    opnorm.set_defaults(handler=run_opnorm)

    fit = subparsers.add_parser("exponent-fit", help="Fit the norm growth against [w]_A(p/2)")
    add_grid_arguments(fit)
    fit.add_argument("--p", type=float, default=3.0)
    fit.add_argument("--weight-family", choices=("power",), default="power")
    fit.add_argument("--a-grid", help="Comma-separated power exponents")
    fit.add_argument("--budget", type=int, default=20)
    fit.set_defaults(handler=run_exponent_fit)
