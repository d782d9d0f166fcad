#!/usr/bin/env python3
"""Command launcher: `python nipreg.py decompose --group Z2^4 --set ... --eps 1/2`."""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
