"""Games with max-plus payoffs over capacities on finite strategy spaces."""

from .capacity import (
    Capacity,
    CapacityClass,
    Classification,
    Density,
    FiniteSpace,
    bconvex_combine,
    bconvex_combine_density,
    classify,
    dirac,
    dual,
    from_density,
    greatest,
    leq,
    product_space,
    smallest,
    to_density,
    validate,
)
from .errors import (
    EmptyDeviationSet,
    GuardExceeded,
    InvalidCapacity,
    InvalidDensity,
    NoFixedPoint,
    NotPossibility,
    SpaceMismatch,
)
from .games import (
    EquilibriumReport,
    Game,
    Mode,
    SearchMode,
    belief_payoff,
    best_response,
    check_nash,
    check_uncertainty_equilibrium,
    expected_payoff,
    search_min_equilibrium,
    search_uncertainty_equilibrium,
    uncertainty_implies_nash_probe,
)
from .integral import NEG_INF, RealFunction, maxplus_integral, maxplus_integral_possibility, threshold_set
from .tensor import section, tensor2, tensor_density, tensor_n

__version__ = "0.1.0"
