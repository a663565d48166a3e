"""Noise budgets, Monte-Carlo verification and sweeps for squeezed dual-comb
spectroscopy. The numerical work happens in the compiled ``qcomb._core``
extension; this package re-exports it."""

import os
from pathlib import Path

_bundled = Path(__file__).resolve().parent / "data"
if "QCOMB_DATA_DIR" not in os.environ and (_bundled / "water_absorption.csv").is_file():
    os.environ["QCOMB_DATA_DIR"] = str(_bundled)

from ._core import *  # noqa: E402,F401,F403
from ._core import __version__  # noqa: E402,F401
