"""Bundled observation datasets (CSV, one value per row)."""
from __future__ import annotations

import csv
from importlib import resources

import numpy as np

_BUNDLED = {"galaxies", "mixture_sim"}


def load_csv(path) -> np.ndarray:
    """Read a one-column CSV of observations; blank lines and a non-numeric
    header row are skipped."""
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                continue
    if not values:
        raise ValueError(f"no numeric observations found in {path}")
    return np.asarray(values, dtype=float)


def load_dataset(name: str) -> np.ndarray:
    """Load a bundled dataset by name ('galaxies' or 'mixture_sim')."""
    if name not in _BUNDLED:
        raise KeyError(f"unknown bundled dataset {name!r}; have {sorted(_BUNDLED)}")
    ref = resources.files("pathtemper") / "data" / f"{name}.csv"
    with resources.as_file(ref) as path:
        return load_csv(path)
