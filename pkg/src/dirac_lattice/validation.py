"""Input checks shared by the estimator and the command line."""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from .theory import TheorySpec, builtin_theory, load_theory

#: largest spatial extent accepted by the front ends
MAX_N = 6


class InputError(ValueError):
    pass


def check_extent(value, name: str = "n", ceiling: int | None = MAX_N) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InputError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise InputError(f"{name} must be >= 1, got {value}")
    if ceiling is not None and value > ceiling:
        raise InputError(f"{name} = {value} exceeds the supported ceiling {ceiling}")
    return value


def check_theory(theory) -> TheorySpec:
    """Accept a spec, a built-in name or a path to a theory document."""
    if isinstance(theory, TheorySpec):
        return theory
    if isinstance(theory, Path) or (isinstance(theory, str) and theory.endswith(".theory")):
        path = Path(theory)
        if not path.exists():
            raise InputError(f"theory file {path} does not exist")
        return load_theory(path)
    if isinstance(theory, str):
        try:
            return builtin_theory(theory)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    raise InputError(f"cannot interpret {theory!r} as a theory")


def check_rational_array(Z, ncols: int) -> np.ndarray:
    """2D object array of Fractions; floats are refused because they are inexact."""
    arr = np.asarray(Z, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputError(f"expected a 2D array of phase points, got {arr.ndim} dimensions")
    if arr.shape[1] != ncols:
        raise InputError(f"expected {ncols} coordinates per point, got {arr.shape[1]}")
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, (float, np.floating)):
            raise InputError("floating-point input is not exact; pass integers, Fractions or 'p/q' strings")
        try:
            out[idx] = Fraction(v)
        except (TypeError, ValueError):
            raise InputError(f"cannot read {v!r} as a rational") from None
    return out
