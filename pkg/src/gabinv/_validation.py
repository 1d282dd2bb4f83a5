"""Input checks shared by the estimator layer and the CLI.

scikit-learn's ``check_array`` refuses complex input, so complex signals are
validated here.
"""

from __future__ import annotations

import numpy as np

from .lattice import RationalLattice, parse_lattice


def check_complex_array(X, n_features: int | None = None, name: str = "X") -> np.ndarray:
    """2-D finite complex array; a single 1-D signal becomes one row."""
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValueError(f"{name} must be numeric")
    arr = arr.astype(complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got {arr.ndim} dimensions")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} has no samples")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinity")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"{name} has {arr.shape[1]} features, expected {n_features}")
    return arr


def check_lattice(value, name: str = "lattice") -> RationalLattice:
    if isinstance(value, RationalLattice):
        return value
    if isinstance(value, str):
        return parse_lattice(value)
    raise TypeError(f"{name} must be a lattice string or RationalLattice, got {type(value).__name__}")


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_tolerance(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return v
