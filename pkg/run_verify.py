#!/usr/bin/env python3
"""Command-line entry point: ``python run_verify.py verify-all --json``."""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from app.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
