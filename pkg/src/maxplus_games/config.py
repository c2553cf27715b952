"""Numerical tolerances and combinatorial guards."""

from __future__ import annotations

from dataclasses import dataclass

# Absolute tolerance for capacity comparisons, argmax ties and equilibrium
# inequalities.
TOL = 1e-9

# Largest space on which a general capacity is stored as a dense 2^n array.
MAX_LATTICE_BITS = 16


@dataclass(frozen=True)
class SearchLimits:
    """Size guards for the equilibrium searchers."""

    max_grid_strategies: int = 4
    max_grid_m: int = 25
    # Number of joint grid profiles evaluated by the min-equilibrium search.
    max_grid_profiles: int = 2_000_000
    max_crisp_total: int = 16


DEFAULT_LIMITS = SearchLimits()

# Deviation grid used by Nash checks when the caller supplies none.
DEFAULT_DEVIATION_GRID = 10
