"""
Sparse commands
Stopping-time sparse construction and exact sparsity verification
"""

import logging

from ..core import ExperimentAssertionException, settings
from ..services import DyadicService
from ..utils.codecs import read_sparse, write_sparse
from .common import add_grid_arguments, load_signal

logger = logging.getLogger(__name__)


def run_sparse_build(args) -> int:
    f = load_signal(args.input_f, args.n, args.seed)
    g_abs = load_signal(args.input_g, args.n, args.seed + 1, modulus=True)
    construction = DyadicService.build_sparse_tree(f, g_abs, args.grid)
    write_sparse(args.output, construction.family)
    logger.info(f"Wrote {len(construction.family)} intervals to {args.output}")
    for key in sorted(construction.constants):
        print(f"{key},{construction.constants[key]!r}")
    return 0


def run_sparse_verify(args) -> int:
    family = read_sparse(args.path)
    verification = DyadicService.verify_sparse(family, args.eta)
    print(f"valid,{str(verification.valid).lower()}")
    print(f"checked,{verification.checked}")
    if verification.min_ratio is not None:
        print(f"min_ratio,{verification.min_ratio!r}")
    if not verification.valid:
        raise ExperimentAssertionException(f"{args.path} is not {args.eta}-sparse: {verification.reason}")
    return 0


def register(subparsers) -> None:
    build = subparsers.add_parser("sparse-build", help="Build the sparse family for (f, |g|)")
    add_grid_arguments(build, family=False)
    build.add_argument("--input-f", help="Signal file for f")
    build.add_argument("--input-g", help="Signal file whose modulus is |g|")
    build.add_argument("--grid", type=int, default=0, choices=(0, 1, 2), help="Shifted grid of the root")
    build.add_argument("--output", required=True, help="Sparse file to write")
    build.set_defaults(handler=run_sparse_build)

    verify = subparsers.add_parser("sparse-verify", help="Check the sparsity of a sparse file")
    verify.add_argument("--eta", type=float, default=settings.SPARSE_ETA)
    verify.add_argument("path", help="Sparse file")
    verify.set_defaults(handler=run_sparse_verify)
