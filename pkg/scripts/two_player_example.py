"""Two players on {a, b}; player 1 always prefers a, player 2 is indifferent.

Prints belief payoffs and best responses under the greatest capacity, the
Nash max-check of the all-greatest profile, the uncertainty check that
fails for it, and every crisp equilibrium under uncertainty.
"""

import json

import numpy as np

from maxplus_games import (
    Density,
    Game,
    Mode,
    best_response,
    belief_payoff,
    check_nash,
    check_uncertainty_equilibrium,
    search_uncertainty_equilibrium,
)


def main():
    g = Game.from_arrays([np.array([[1.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2))],
                         labels=[["a", "b"], ["a", "b"]])
    top = [Density.ones(s) for s in g.strategies]
    out = {
        "P1(a, greatest)": belief_payoff(g, 0, "a", top[1]),
        "P1(b, greatest)": belief_payoff(g, 0, "b", top[1]),
        "R1(greatest)": [g.strategies[0].labels[k] for k in best_response(g, 0, top[1])],
        "nash max (grid 10)": check_nash(g, top, Mode.MAX, grid_m=10).verdict,
        "uncertainty (greatest beliefs)": check_uncertainty_equilibrium(g, top).verdict,
        "crisp equilibria": search_uncertainty_equilibrium(g).equilibria,
    }
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
