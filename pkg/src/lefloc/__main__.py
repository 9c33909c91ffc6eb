"""Allow ``python3 -m lefloc``."""
import sys

from .cli import main

sys.exit(main())
