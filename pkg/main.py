#!/usr/bin/env python3
"""Entry point for running the ou-kernels command line from a source checkout."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from ou_kernels.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
