#!/usr/bin/env python3
"""Run the acceptance suite and show one PASS/FAIL line per criterion.

Equivalent to ``pytest tests/test_acceptance.py -v -s`` from the repo root.
"""

import pathlib
import sys

import pytest

if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parents[1]
    sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"),
                          "-v", "-s", *sys.argv[1:]]))
