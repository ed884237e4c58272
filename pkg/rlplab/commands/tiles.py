"""
Tile commands
Tile dumps and the model form with its energy decomposition
"""

import logging

from ..services import (
    DecompositionService,
    FrequencyFamilyService,
    SizeService,
    SquareFunctionService,
    TileService,
)
from ..utils.codecs import write_rows
from .common import add_grid_arguments, emit_csv, load_signal

logger = logging.getLogger(__name__)


def run_tiles(args) -> int:
    family = FrequencyFamilyService.parse_family(args.family, args.n)
    collection = TileService.tiles_for_family(family)
    lines = [
        f"{collection.family_index[i]} {collection.scale[i]} {collection.tile_position[i]} "
        f"{collection.freq_a[i]} {collection.freq_a[i] + collection.freq_m[i]}"
        for i in collection.indices()
    ]
    if args.dump:
        write_rows(args.dump, lines)
        logger.info(f"Wrote {len(lines)} tiles to {args.dump}")
    print(f"tiles,{len(lines)}")
    return 0


def run_model_form(args) -> int:
    family = FrequencyFamilyService.parse_family(args.family, args.n)
    collection = TileService.tiles_for_family(family)
    f = load_signal(args.input_f, args.n, args.seed)
    if args.input_g:
        g = SquareFunctionService.vector_signal_from_projections(load_signal(args.input_g, args.n, args.seed), family)
    else:
        g = SquareFunctionService.aligned_dual(f, family)
    print(f"model_form,{TileService.model_form(collection, f, g)!r}")
    lam = SizeService.vectorial_size(collection, f)
    if lam <= 0:
        logger.info("Vectorial size vanishes, no decomposition to report")
        return 0
    decomposition = DecompositionService.energy_decomposition(collection, f, lam)
    emit_csv(["level", "tree_count", "sum_IT", "size_cap"], decomposition.summary_rows())
    return 0


def register(subparsers) -> None:
    tiles = subparsers.add_parser("tiles", help="Generate the tile collection of a family")
    add_grid_arguments(tiles)
    tiles.add_argument("--dump", help="File receiving one 'k scale pos freq_a freq_b' line per tile")
    tiles.set_defaults(handler=run_tiles)

    model = subparsers.add_parser("model-form", help="Model form and energy decomposition summary")
    add_grid_arguments(model)
    model.add_argument("--input-f", help="Signal file for f")
    model.add_argument("--input-g", help="Signal whose band projections form g (aligned dual when omitted)")
    model.set_defaults(handler=run_model_form)
