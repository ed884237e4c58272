"""
Shared command helpers
Argument groups and input loading used by several sub-commands
"""

import logging
import sys
from typing import Iterable, Optional, Sequence

from ..core import GridMismatchException, settings
from ..core.storage import format_value
from ..schemas import Signal
from ..utils import make_rng
from ..utils.codecs import read_signal

logger = logging.getLogger(__name__)


def add_grid_arguments(parser, family: bool = True) -> None:
    parser.add_argument("--n", type=int, default=1024, help="Grid size N (power of two)")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Seed for generated inputs")
    if family:
        parser.add_argument("--family", default="lacunary:2", help="lacunary:<l> | unit | partition | congruent:<spec> | file:<path>")


def load_signal(path: Optional[str], n: int, seed: int, modulus: bool = False) -> Signal:
    """
    Read a signal file, or draw a complex Gaussian signal when no path is given

    Raises:
        GridMismatchException: If the file holds a different N
    """
    if path is None:
        rng = make_rng(seed)
        f = Signal(samples=rng.standard_normal(n) + 1j * rng.standard_normal(n))
        logger.debug(f"Generated a random signal with N={n}, seed {seed}")
    else:
        f = read_signal(path)
        if f.n != n:
            raise GridMismatchException(f"{path} holds N={f.n}, expected N={n}")
    return f.abs() if modulus else f


def emit_csv(header: Sequence[str], rows: Iterable[Sequence], stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(format_value(v) for v in row) + "\n")

