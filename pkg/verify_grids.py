#!/usr/bin/env python
"""
Shifted grid verification script
Exhaustively checks that the three shifted grids enclose every tripled interval
"""

import argparse
import logging
import os
import sys

from dotenv import load_dotenv

sys.path.insert(0, os.getcwd())
load_dotenv()

from rlplab.core import RLPLabException, check_shifted_grids, settings, to_exit_code  # noqa: E402

logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)
logger = logging.getLogger(__name__)


def main():
    parser = argparse.ArgumentParser(description="Verify the three shifted dyadic grids")
    parser.add_argument("--n", type=int, nargs="+", default=[16, 64, 256, 1024], help="Grid sizes to check")
    args = parser.parse_args()

    try:
        for n in args.n:
            checked = check_shifted_grids(n)
            print(f"n={n}: {checked} tripled intervals enclosed within 6x their length")
    except RLPLabException as e:
        logger.error(f"Grid verification failed: {str(e)}")
        sys.exit(to_exit_code(e))


if __name__ == "__main__":
    main()
