"""Randomized invariant checks behind ``maxplus-games selftest``."""

from __future__ import annotations

import numpy as np

from .capacity import (
    classify,
    dual,
    from_density,
    leq,
    to_density,
)
from .integral import RealFunction, maxplus_integral, maxplus_integral_possibility
from .sampling import labels_space, random_capacity, random_density, random_dominating
from .tensor import tensor2, tensor_density


def run_selftest(seed: int, cases: int) -> dict[str, dict]:
    rng = np.random.default_rng(seed)
    failures = {k: 0 for k in ("involution", "density_round_trip", "duality_exchange",
                               "integral_fast_path", "integral_monotone", "tensor_density",
                               "tensor_monotone")}
    for _ in range(cases):
        sp = labels_space(int(rng.integers(1, 5)), "a")
        sq = labels_space(int(rng.integers(1, 4)), "b")
        nu = random_capacity(rng, sp)
        mu = random_dominating(rng, nu)
        d = random_density(rng, sp)
        e = random_density(rng, sq)
        phi = RealFunction(sp, rng.uniform(-3, 3, sp.size))

        failures["involution"] += not np.array_equal(dual(dual(nu)).values, nu.values)
        failures["density_round_trip"] += to_density(from_density(d)) != d
        failures["duality_exchange"] += classify(nu).possibility != classify(dual(nu)).necessity
        fast = maxplus_integral_possibility(phi, d)
        failures["integral_fast_path"] += abs(fast - maxplus_integral(phi, from_density(d))) > 1e-12
        failures["integral_monotone"] += maxplus_integral(phi, nu) > maxplus_integral(phi, mu) + 1e-12
        general = tensor2(from_density(d), from_density(e))
        failures["tensor_density"] += not np.allclose(
            general.values, from_density(tensor_density([d, e])).values, rtol=0, atol=1e-12)
        other = random_capacity(rng, sq)
        failures["tensor_monotone"] += not leq(tensor2(nu, other), tensor2(mu, other))
    return {k: {"cases": cases, "failures": int(v)} for k, v in failures.items()}
