from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.random import PCG64, Generator

from expr import parse

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"
BUNDLED = ("minkowski-cartesian", "minkowski-spherical", "schwarzschild", "conformally-flat")

CARTESIAN = ("t", "x", "y", "z")
SPHERICAL = ("t", "r", "theta", "phi")


def expressions(rows, names=CARTESIAN) -> np.ndarray:
    rows = np.asarray(rows, dtype=object)
    out = np.empty(rows.shape, dtype=object)
    for index in np.ndindex(rows.shape):
        out[index] = parse(str(rows[index]), names)
    return out


def diagonal(entries, names=CARTESIAN) -> np.ndarray:
    rows = [["0"] * 4 for _ in range(4)]
    for k, entry in enumerate(entries):
        rows[k][k] = entry
    return expressions(rows, names)


def box_points(box, count: int = 16, seed: int = 0) -> np.ndarray:
    low, high = np.array(box, dtype=float).T
    return Generator(PCG64(seed)).uniform(low, high, size=(count, 4))
