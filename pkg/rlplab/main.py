"""
rlplab Command Line Application
Main entry point with logging setup, sub-command dispatch and error handling
"""

import argparse
import logging
import sys
from typing import List, Optional

from .commands import register_all
from .commands.experiments import list_experiments
from .core import close_pool, init_pool, settings, to_exit_code

# Configure logging
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format=settings.LOG_FORMAT
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    parser.add_argument("--list", action="store_true", help="List the experiments with their anchors")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", metavar="<command>")
    register_all(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one sub-command and map failures to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if args.list:
        list_experiments()
        return 0
    if getattr(args, "handler", None) is None:
        parser.print_help()
        return 0

    logger.debug(f"{settings.APP_NAME} {settings.APP_VERSION}: {args.command} with {settings.THREADS} threads")
    init_pool()
    try:
        return args.handler(args)
    except Exception as e:
        code = to_exit_code(e)
        logger.error(f"{args.command} failed ({type(e).__name__}, exit {code}): {str(e)}")
        return code
    finally:
        close_pool()


if __name__ == "__main__":
    sys.exit(main())
