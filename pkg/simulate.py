#!/usr/bin/env python3
"""
simulate.py – Energy-aware VM allocation experiments:
  • convert   – SWF trace -> VM request CSV
  • run       – run the configured algorithms, print per-algorithm summaries
  • compare   – emit the comparison report (csv / json / table)
  • verify    – check energy vs busy-time equivalence on random instances

Overrides come from .env in the working directory (BUSYTIME_* variables).
"""
import os, sys, signal, logging

import dotenv

from busytime.cli import main

# ── setup ─────────────────────────────────────────────────────────────────────
dotenv.load_dotenv()

logging.basicConfig(
    level=os.getenv("BUSYTIME_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s | %(levelname)-7s | %(message)s",
    stream=sys.stderr,
)

# graceful Ctrl-C
signal.signal(signal.SIGINT, lambda *_: sys.exit("\n✖  interrupted"))

if __name__ == "__main__":
    sys.exit(main())
