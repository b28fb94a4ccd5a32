# CLI entry point for running a ptlab job from a source checkout
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ptlab.cli import main

if __name__ == "__main__":
    sys.exit(main())
