"""Random instances for property checks and experiments."""

from __future__ import annotations

import numpy as np

from .capacity import Capacity, Density, FiniteSpace
from .games import Game


def labels_space(n: int, prefix: str = "x") -> FiniteSpace:
    return FiniteSpace(tuple(f"{prefix}{k}" for k in range(n)))


def monotone_hull(raw: np.ndarray) -> np.ndarray:
    """Smallest monotone set function above ``raw`` (max over submasks)."""
    v = np.array(raw, dtype=float)
    n = int(np.log2(len(v)))
    masks = np.arange(len(v))
    for b in range(n):
        bit = 1 << b
        hi = masks[(masks & bit) != 0]
        v[hi] = np.maximum(v[hi], v[hi ^ bit])
    return v


def random_capacity(rng: np.random.Generator, space: FiniteSpace) -> Capacity:
    v = monotone_hull(rng.random(1 << space.size))
    v[0] = 0.0
    v[-1] = 1.0
    return Capacity(space, v)


def random_density(rng: np.random.Generator, space: FiniteSpace,
                   zero_prob: float = 0.2) -> Density:
    """Random weights with one point at 1 and a few exact zeros."""
    w = rng.random(space.size)
    w[rng.random(space.size) < zero_prob] = 0.0
    w[rng.integers(space.size)] = 1.0
    return Density(space, w)


def random_dominating(rng: np.random.Generator, nu: Capacity) -> Capacity:
    """A capacity ``mu`` with ``nu <= mu``."""
    other = random_capacity(rng, nu.space)
    return Capacity(nu.space, np.maximum(nu.values, other.values))


def random_null_complement(rng: np.random.Generator, space: FiniteSpace, support: int) -> Capacity:
    """Random capacity whose value is 0 on every subset of ``X \\ support``."""
    v = random_capacity(rng, space).values.copy()
    outside = space.full_mask & ~support
    masks = np.arange(1 << space.size)
    v[(masks & ~outside) == 0] = 0.0
    return Capacity(space, v)


def random_game(rng: np.random.Generator, shape: tuple[int, ...],
                low: float = -5.0, high: float = 5.0, integer: bool = False) -> Game:
    k = len(shape)
    if integer:
        pay = [rng.integers(int(low), int(high) + 1, size=shape).astype(float) for _ in range(k)]
    else:
        pay = [rng.uniform(low, high, size=shape) for _ in range(k)]
    return Game.from_arrays(pay)
