"""Run the CLI with python -m rlplab"""

import sys

from .main import main

sys.exit(main())
