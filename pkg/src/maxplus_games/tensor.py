"""Tensor products of capacities on lexicographic product spaces."""

from __future__ import annotations

from collections.abc import Sequence
from functools import reduce

import numpy as np

from .capacity import Capacity, Density, FiniteSpace, product_space
from .config import MAX_LATTICE_BITS
from .errors import SpaceMismatch


def section(b: int, x: int, n2: int) -> int:
    """``{y : (x, y) in B}`` for a mask ``B`` over ``X1 x X2`` with ``|X2| = n2``."""
    return (b >> (x * n2)) & ((1 << n2) - 1)


def tensor2(mu1: Capacity, mu2: Capacity) -> Capacity:
    """Two-factor tensor product.

    For every subset ``B`` of the product,
    ``value(B) = max_t min(mu1({x : mu2(section(B, x)) >= t}), t)`` over
    ``t`` in ``[0, 1]``. The inner set only changes at section values and the
    envelope ``min(., t)`` crosses the step function at one of mu1's values,
    so maximizing over ``{0, 1}`` plus all values of both factors is exact.
    Any extra candidate only supplies a lower bound, so one shared candidate
    set serves every ``B``.
    """
    n1, n2 = mu1.space.size, mu2.space.size
    n = n1 * n2
    if n > MAX_LATTICE_BITS:
        raise ValueError(
            f"product of {n} points exceeds the {MAX_LATTICE_BITS}-point lattice limit"
        )
    space = product_space(mu1.space, mu2.space)
    masks = np.arange(1 << n, dtype=np.int64)
    sections = np.stack([(masks >> (x * n2)) & ((1 << n2) - 1) for x in range(n1)], axis=1)
    sec_vals = mu2.values[sections]  # (2^n, n1)
    weights = (1 << np.arange(n1, dtype=np.int64))
    candidates = np.unique(np.concatenate([mu1.values, mu2.values, [0.0, 1.0]]))

    out = np.zeros(1 << n)
    for t in candidates:
        level = (sec_vals >= t).astype(np.int64) @ weights
        np.maximum(out, np.minimum(mu1.values[level], t), out=out)
    return Capacity(space, out)


def tensor_n(capacities: Sequence[Capacity]) -> Capacity:
    """Left-associated fold ``((mu1 x mu2) x mu3) x ...``.

    Associativity is not assumed for general capacities; the bracketing is
    fixed.
    """
    if not capacities:
        raise ValueError("need at least one factor")
    return reduce(tensor2, capacities)


def tensor_density(densities: Sequence[Density]) -> Density:
    """Pointwise minimum of the factor densities on the product space."""
    if not densities:
        raise ValueError("need at least one factor")
    for d in densities:
        if not isinstance(d, Density):
            raise SpaceMismatch(f"expected a Density, got {type(d).__name__}")
    space = product_space(*(d.space for d in densities))
    w = reduce(np.minimum.outer, [d.weights for d in densities]).ravel()
    return Density(space, w)
