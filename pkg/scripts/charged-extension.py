#!/usr/bin/env python3
"""
Run the charged-extension command from a source checkout.

Equivalent to the installed ``charged-extension`` entry point; see
``charged-extension --help`` for the subcommands.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from bartnik.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
