"""Max-plus integral on finite spaces.

Values live in the extended reals: ordinary floats plus ``NEG_INF``
(``float("-inf")``), which absorbs finite summands and is neutral for max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import Capacity, Density, FiniteSpace
from .errors import SpaceMismatch

NEG_INF = float("-inf")


@dataclass(frozen=True, eq=False)
class RealFunction:
    """Finite real values, one per point of ``space``."""

    space: FiniteSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.space.size,):
            raise ValueError(f"expected {self.space.size} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __add__(self, c: float) -> RealFunction:
        return RealFunction(self.space, self.values + c)


def log0(x):
    """Natural log with ``log0(0) = NEG_INF``; only an exact 0.0 maps to it."""
    with np.errstate(divide="ignore"):
        return np.log(x)


def threshold_set(phi: RealFunction, t: float) -> int:
    """Mask of the points where ``phi >= t``."""
    return sum(1 << k for k in np.flatnonzero(phi.values >= t))


def integrate_array(phi: np.ndarray, cap_values: np.ndarray) -> float:
    """Integral of raw values ``phi`` against a raw subset-indexed capacity array.

    Walks the distinct values of ``phi`` from the top down, growing the
    upper level set one tie group at a time.
    """
    order = np.argsort(-phi, kind="stable")
    best = NEG_INF
    mask = 0
    i = 0
    n = len(phi)
    while i < n:
        t = phi[order[i]]
        while i < n and phi[order[i]] == t:
            mask |= 1 << int(order[i])
            i += 1
        best = max(best, float(log0(cap_values[mask])) + float(t))
    return best


def integrate_density_array(phi: np.ndarray, weights: np.ndarray) -> float:
    """Closed form for possibility capacities: ``max_x ln d(x) + phi(x)``."""
    return float(np.max(log0(weights) + phi))


def maxplus_integral(phi: RealFunction, nu: Capacity) -> float:
    """``max_t ln(nu({phi >= t})) + t``, maximized over the values of ``phi``.

    Between consecutive values of ``phi`` the level set is constant and the
    ``+ t`` term is increasing, so the right endpoints are the only
    candidates.
    """
    if phi.space != nu.space:
        raise SpaceMismatch("function and capacity live on different spaces")
    return integrate_array(phi.values, nu.values)


def maxplus_integral_possibility(phi: RealFunction, d: Density) -> float:
    if phi.space != d.space:
        raise SpaceMismatch("function and density live on different spaces")
    return integrate_density_array(phi.values, d.weights)
