"""
Experiment commands
One sub-command per registered experiment
"""

import logging

from ..core import ExperimentAssertionException
from ..services import ExperimentService

logger = logging.getLogger(__name__)


def run_experiment(args) -> int:
    cfg = ExperimentService.build_config(
        args.experiment,
        n=args.n,
        seed=args.seed,
        family_spec=args.family,
        weight_spec=args.weight,
        p_values=args.p,
        budget=args.budget,
        output_dir=args.out,
    )
    files = ExperimentService.run_experiment(cfg)
    for path in files.paths:
        print(path)
    if not files.passed:
        raise ExperimentAssertionException(f"{cfg.name}: {'; '.join(files.failed_assertions)}")
    return 0


def list_experiments() -> None:
    for info in ExperimentService.list_experiments():
        print(f"{info.name:24s} {info.anchor}")


def register(subparsers) -> None:
    for info in ExperimentService.list_experiments():
        parser = subparsers.add_parser(info.name, help=info.description)
        parser.add_argument("--n", type=int, help=f"Grid size (default {info.defaults.get('n', 1024)})")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--family", help="Frequency family spec")
        parser.add_argument("--weight", help="Weight spec")
        parser.add_argument("--p", type=float, nargs="+", help="Exponent values")
        parser.add_argument("--budget", type=int, help="Trials or candidates per point")
        parser.add_argument("--out", help="Report directory")
        parser.set_defaults(handler=run_experiment, experiment=info.name)
