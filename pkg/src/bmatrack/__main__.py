"""Allow ``python -m bmatrack``."""

import sys

from .cli import main

sys.exit(main())
