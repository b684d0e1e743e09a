#!/usr/bin/env python3
"""
Main entry point for telapa-lab.
Run this script with a subcommand, e.g. ``run --config configs/desk.json``.
"""

import sys
import os

# Add the repository root to the path so ``src`` imports resolve
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.interface.cli import main


if __name__ == "__main__":
    sys.exit(main())
