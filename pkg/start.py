#!/usr/bin/env python
"""
rlplab Launcher Script
Runs the command line application from a source checkout
"""

import logging
import os
import sys

from dotenv import load_dotenv

# Ensure the current directory is in the path
sys.path.insert(0, os.getcwd())

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

if __name__ == "__main__":
    from rlplab.main import main

    try:
        sys.exit(main(sys.argv[1:]))
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        sys.exit(130)
