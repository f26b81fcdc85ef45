"""
Grid Tally Entry Point
This file runs the command-line interface
"""
import sys

from gridtally.api.cli import main

# ==================== RUN ====================

if __name__ == "__main__":
    sys.exit(main())
