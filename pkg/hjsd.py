"""Command-line entry point for the stratified HJB solver."""

import sys

from core.cli import main

if __name__ == "__main__":
    sys.exit(main())
