#!/usr/bin/env python
"""
Entry point for the nexus-recon command line.

Usage:
    python scripts/nexus_recon.py traj gen --kind radial --spokes 40 --samples 128 --out traj.csv
    python scripts/nexus_recon.py dcomp --traj traj.csv --grid 64x64 --out d.ncwt
    python scripts/nexus_recon.py selftest
"""

import sys
from pathlib import Path

# Add project root to python path
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

from dotenv import load_dotenv  # noqa: E402

load_dotenv(project_root / ".env")

from src.pipeline.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
