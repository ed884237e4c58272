"""
Square function command
Evaluates Tf for a signal file on a chosen interval family
"""

import logging

from ..services import FrequencyFamilyService, SignalService, SquareFunctionService
from ..utils.codecs import write_signal
from .common import add_grid_arguments, load_signal

logger = logging.getLogger(__name__)


def run_sqfn(args) -> int:
    family = FrequencyFamilyService.parse_family(args.family, args.n)
    f = load_signal(args.input, args.n, args.seed)
    tf = SquareFunctionService.square_fn(f, family)
    if args.output:
        write_signal(args.output, tf)
        logger.info(f"Wrote Tf to {args.output}")
    print(f"norm_f_2,{SignalService.lp_norm(f, 2)!r}")
    print(f"norm_Tf_2,{SignalService.lp_norm(tf, 2)!r}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("sqfn", help="Evaluate the square function Tf")
    add_grid_arguments(parser)
    parser.add_argument("--input", help="Signal file (random signal when omitted)")
    parser.add_argument("--output", help="Where to write Tf")
    parser.set_defaults(handler=run_sqfn)
