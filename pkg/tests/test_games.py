import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxplus_games import (
    Density,
    EmptyDeviationSet,
    FiniteSpace,
    Game,
    GuardExceeded,
    Mode,
    NoFixedPoint,
    SearchMode,
    SpaceMismatch,
    belief_payoff,
    best_response,
    check_nash,
    check_uncertainty_equilibrium,
    dirac,
    expected_payoff,
    from_density,
    greatest,
    search_min_equilibrium,
    search_uncertainty_equilibrium,
    uncertainty_implies_nash_probe,
)
from maxplus_games.capacity import bconvex_combine_density, grid_densities
from maxplus_games.games import default_deviations
from maxplus_games.integral import integrate_array
from maxplus_games.sampling import random_capacity, random_density, random_game
from maxplus_games.tensor import tensor_n

from . import oracles

AB = FiniteSpace(("a", "b"))


def brute_eu(u, densities):
    """max over cells of ln(min of the densities) + payoff."""
    best = -math.inf
    for cell in itertools.product(*(range(len(d)) for d in densities)):
        w = min(d[c] for d, c in zip(densities, cell))
        if w > 0:
            best = max(best, math.log(w) + u[cell])
    return best


def two_by_two(u1, u2=None):
    u2 = np.zeros((2, 2)) if u2 is None else u2
    return Game(("P1", "P2"), (AB, AB), (np.array(u1, float), np.array(u2, float)))


class TestGame:
    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            Game(("P1",), (AB,), (np.zeros(3),))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Game(("P1",), (AB,), (np.array([0.0, np.inf]),))

    def test_opponent_order(self):
        g = random_game(np.random.default_rng(0), (2, 3, 2))
        assert g.opponent_space(1).labels[:2] == ("s0,s0", "s0,s1")
        assert g.opponent_space(1).factors == (g.strategies[0], g.strategies[2])


class TestExpectedPayoff:
    def test_example_greatest(self, two_player):
        assert expected_payoff(two_player, 0, [greatest(AB), greatest(AB)]) == 1.0

    def test_dirac_profile(self, rng):
        g = random_game(rng, (2, 3, 2))
        for cell in itertools.product(*(range(n) for n in g.shape)):
            prof = [Density.dirac(s, c) for s, c in zip(g.strategies, cell)]
            for i in range(3):
                assert expected_payoff(g, i, prof) == g.payoffs[i][cell]

    def test_dirac_profile_general_route(self, two_player):
        for cell in itertools.product(range(2), range(2)):
            prof = [dirac(AB, c) for c in cell]
            assert expected_payoff(two_player, 0, prof) == two_player.payoffs[0][cell]

    def test_worked_case(self):
        g = two_by_two([[3, 0], [1, 2]])
        prof = [Density(AB, [1.0, 0.5]), Density(AB, [0.5, 1.0])]
        expected = brute_eu(g.payoffs[0], [[1.0, 0.5], [0.5, 1.0]])
        assert expected == pytest.approx(3 - math.log(2), abs=1e-15)
        assert expected_payoff(g, 0, prof) == pytest.approx(expected, abs=1e-12)

    def test_density_and_general_routes_agree(self, rng):
        for _ in range(30):
            g = random_game(rng, (2, 3))
            prof = [random_density(rng, s) for s in g.strategies]
            caps = [random_capacity(rng, s) for s in g.strategies]
            mixed = [from_density(prof[0]), caps[1]]
            for i in range(2):
                # a non-possibility component forces the lattice route
                assert expected_payoff(g, i, mixed) == integrate_array(
                    g.payoffs[i].ravel(), tensor_n(mixed).values)
                assert expected_payoff(g, i, prof) == pytest.approx(
                    brute_eu(g.payoffs[i], [d.weights for d in prof]), abs=1e-12)

    def test_space_mismatch(self, two_player):
        with pytest.raises(SpaceMismatch):
            expected_payoff(two_player, 0, [greatest(AB)])
        with pytest.raises(SpaceMismatch):
            expected_payoff(two_player, 0, [greatest(AB), greatest(FiniteSpace(("x", "y")))])


class TestBeliefPayoff:
    def test_example(self, two_player):
        assert belief_payoff(two_player, "P1", "a", greatest(AB)) == 1.0
        assert belief_payoff(two_player, "P1", "b", greatest(AB)) == 0.0

    def test_dirac_belief(self, rng):
        g = random_game(rng, (3, 2))
        for y in range(2):
            for x in range(3):
                assert belief_payoff(g, 0, x, Density.dirac(g.strategies[1], y)) == g.payoffs[0][x, y]

    def test_constant_slice(self, rng):
        g = Game.from_arrays([np.full((2, 3), 4.5), np.zeros((2, 3))])
        assert belief_payoff(g, 0, 1, random_capacity(rng, g.strategies[1])) == 4.5

    def test_three_players_match_brute(self, rng):
        g = random_game(rng, (2, 2, 3))
        for i in range(3):
            belief = random_density(rng, g.opponent_space(i))
            by_label = dict(zip(belief.space.labels, belief.weights))
            for x in range(g.shape[i]):
                row = {}
                for cell in itertools.product(*(range(n) for n in g.shape)):
                    if cell[i] != x:
                        continue
                    label = ",".join(g.strategies[j].labels[cell[j]] for j in g.opponents(i))
                    row[label] = g.payoffs[i][cell]
                assert belief_payoff(g, i, x, belief) == pytest.approx(
                    oracles.belief_payoff_brute(row, by_label), abs=1e-12)


class TestBestResponse:
    def test_example(self, two_player):
        assert best_response(two_player, 0, greatest(AB)) == (0,)

    def test_constant_payoff(self):
        g = Game.from_arrays([np.ones((3, 2)), np.zeros((3, 2))])
        assert best_response(g, 0, greatest(g.strategies[1])) == (0, 1, 2)

    def test_dirac_column(self):
        g = two_by_two([[3, 0], [1, 2]])
        assert best_response(g, 0, Density.dirac(AB, "b")) == (1,)

    @given(st.integers(0, 2**32 - 1), st.floats(-100, 100))
    @settings(max_examples=50)
    def test_translation_invariance(self, seed, c):
        rng = np.random.default_rng(seed)
        g = random_game(rng, (3, 2), integer=True)
        shifted = Game.from_arrays([g.payoffs[0] + c, g.payoffs[1]])
        belief = random_capacity(rng, g.strategies[1])
        assert best_response(g, 0, belief) == best_response(shifted, 0, belief)

    def test_relabeling_equivariance(self, rng):
        for _ in range(30):
            g = random_game(rng, (3, 3), integer=True)
            perm = rng.permutation(3)
            # permute player 2's strategies in both the payoffs and the belief
            g2 = Game.from_arrays([g.payoffs[0][:, perm], g.payoffs[1][:, perm]])
            d = random_density(rng, g.strategies[1])
            d2 = Density(g2.strategies[1], d.weights[perm])
            assert best_response(g, 0, d) == best_response(g2, 0, d2)
            # permuting player 1's own strategies permutes the response set
            g3 = Game.from_arrays([g.payoffs[0][perm, :], g.payoffs[1][perm, :]])
            inv = np.argsort(perm)
            assert sorted(int(inv[k]) for k in best_response(g, 0, d)) == list(best_response(g3, 0, d))


class TestCheckNash:
    def test_greatest_profile_is_max_equilibrium(self, rng):
        for _ in range(10):
            g = random_game(rng, (2, 3))
            prof = [greatest(s) for s in g.strategies]
            assert check_nash(g, prof, Mode.MAX, grid_m=4).verdict

    def test_example(self, two_player):
        assert check_nash(two_player, [greatest(AB), greatest(AB)], Mode.MAX).verdict

    def test_improving_deviation(self, two_player):
        prof = [dirac(AB, "b"), greatest(AB)]
        devs = [[dirac(AB, "a")], [greatest(AB)]]
        r = check_nash(two_player, prof, Mode.MAX, deviations=devs)
        assert r.verdict is False
        assert r.witnesses[0].delta == 1.0
        assert r.witnesses[0].deviation == dirac(AB, "a")

    def test_min_mode_direction(self, two_player):
        # in min mode moving player 1 from a to b lowers its payoff: a violation
        prof = [Density.dirac(AB, "a"), Density.ones(AB)]
        r = check_nash(two_player, prof, Mode.MIN)
        assert not r.verdict
        assert r.witnesses[0].delta == 1.0

    def test_empty_deviation_set(self, two_player):
        with pytest.raises(EmptyDeviationSet):
            check_nash(two_player, [greatest(AB)] * 2, deviations=[[], [greatest(AB)]])

    def test_default_family_contains_diracs(self):
        fam = default_deviations(FiniteSpace(("a", "b", "c")), 3)
        for k in range(3):
            assert any(d == Density.dirac(d.space, k) for d in fam)

    def test_density_and_general_paths_agree(self, rng):
        for _ in range(15):
            g = random_game(rng, (2, 2))
            prof = [random_density(rng, s) for s in g.strategies]
            fast = check_nash(g, prof, Mode.MAX, grid_m=3)
            slow = check_nash(g, [from_density(d) for d in prof], Mode.MAX,
                              deviations=[[from_density(d) for d in grid_densities(s, 3)]
                                          for s in g.strategies])
            for a, b in zip(fast.witnesses, slow.witnesses):
                assert a.delta == pytest.approx(b.delta, abs=1e-12)


class TestUncertainty:
    def test_example_greatest_fails(self, two_player):
        r = check_uncertainty_equilibrium(two_player, [greatest(AB), greatest(AB)])
        assert r.verdict is False
        assert r.best_responses == [["a"], ["a", "b"]]
        assert r.witnesses[1].subset == "b" and r.witnesses[1].mass == 1.0
        assert r.witnesses[0].mass == 0.0

    def test_pure_nash_diracs(self):
        # (a, a) is a pure max-equilibrium of this coordination game
        g = two_by_two([[2, 0], [0, 1]], [[2, 0], [0, 1]])
        assert check_uncertainty_equilibrium(g, [dirac(AB, "a"), dirac(AB, "a")]).verdict

    def test_example_with_chosen_second_payoff(self):
        p2 = [[0, 2], [1, 0]]
        g = two_by_two([[1, 1], [0, 0]], p2)
        # best response of player 2 to the belief "player 1 plays a"
        r2 = [y for y in range(2) if p2[0][y] == max(p2[0])]
        assert r2 == [1]
        beliefs = [Density.dirac(AB, "b"), Density.dirac(AB, "a")]
        assert check_uncertainty_equilibrium(g, beliefs).verdict
        assert not check_uncertainty_equilibrium(g, [Density.dirac(AB, "a"), Density.dirac(AB, "a")]).verdict

    def test_near_zero_is_not_zero(self):
        g = two_by_two([[1, 1], [0, 0]])
        belief2 = Density(AB, [1.0, 1e-12])
        assert not check_uncertainty_equilibrium(g, [greatest(AB), belief2]).verdict

    def test_belief_space_checked(self, two_player):
        with pytest.raises(SpaceMismatch):
            check_uncertainty_equilibrium(two_player, [greatest(FiniteSpace(("x", "y"))), greatest(AB)])


class TestSearchMin:
    def test_constant_game(self):
        g = Game.from_arrays([np.full((2, 2), 3.0), np.full((2, 2), -1.0)])
        r = search_min_equilibrium(g, 4)
        assert r.regret == 0.0
        first = grid_densities(AB, 4)[0]
        assert all(d.weights.tolist() == first.weights.tolist() for d in r.profile)

    def test_one_player(self):
        g = Game(("P1",), (AB,), (np.array([0.0, 1.0]),))
        r = search_min_equilibrium(g, 1)
        assert r.regret == 0.0
        assert r.profile[0].weights.tolist() == [1.0, 0.0]
        assert r.stats["profiles_examined"] == 3

    def test_example_beats_all_ones(self, two_player):
        r = search_min_equilibrium(two_player, 6)
        ones = [Density.ones(AB)] * 2
        worst = 0.0
        for i in range(2):
            current = expected_payoff(two_player, i, ones)
            lowest = min(expected_payoff(two_player, i, [d, ones[1]] if i == 0 else [ones[0], d])
                         for d in grid_densities(AB, 6))
            worst = max(worst, current - lowest)
        assert r.regret <= worst
        assert worst == 1.0

    def test_regret_matches_direct_evaluation(self, rng):
        g = random_game(rng, (2, 3))
        r = search_min_equilibrium(g, 3)
        worst = 0.0
        for i in range(2):
            current = expected_payoff(g, i, r.profile)
            devs = []
            for d in grid_densities(g.strategies[i], 3):
                trial = list(r.profile)
                trial[i] = d
                devs.append(expected_payoff(g, i, trial))
            worst = max(worst, current - min(devs))
        assert r.regret == pytest.approx(worst, abs=1e-12)

    def test_guards(self):
        g = random_game(np.random.default_rng(1), (5, 2))
        with pytest.raises(GuardExceeded):
            search_min_equilibrium(g, 2)
        with pytest.raises(GuardExceeded):
            search_min_equilibrium(random_game(np.random.default_rng(1), (2, 2)), 26)
        with pytest.raises(GuardExceeded):
            search_min_equilibrium(random_game(np.random.default_rng(1), (4, 4)), 25)


class TestSearchUncertainty:
    def test_example_zero_second_payoff(self, two_player):
        r = search_uncertainty_equilibrium(two_player, SearchMode.CRISP_ENUMERATE)
        assert r.stats["support_profiles_examined"] == 9
        # oracle: player 1 strictly prefers a whatever it believes; player 2 is indifferent
        expected = [[["a"], s2] for s2 in (["a"], ["b"], ["a", "b"])]
        assert r.equilibria == expected

    def test_dominant_profile_iterates_fast(self, rng):
        for _ in range(20):
            g = random_game(rng, (3, 3))
            # make (2, 0) strictly dominant for both players
            u1, u2 = g.payoffs[0].copy(), g.payoffs[1].copy()
            u1[2, :] = u1.max() + 1
            u2[:, 0] = u2.max() + 1
            g = Game.from_arrays([u1, u2])
            r = search_uncertainty_equilibrium(g, SearchMode.ITERATE)
            assert r.equilibria == [[["s2"], ["s0"]]]
            assert r.stats["rounds"] <= 2

    def test_cycle_is_reported(self):
        # from full supports the joint best responses visit (a,a) (a,b) (b,b) (b,a)
        g = two_by_two([[2, 0], [0, 1]], [[0, 1], [2, 0]])
        with pytest.raises(NoFixedPoint) as info:
            search_uncertainty_equilibrium(g, SearchMode.ITERATE)
        assert info.value.cycle == [[["a"], ["a"]], [["a"], ["b"]], [["b"], ["b"]], [["b"], ["a"]]]

    def test_ties_give_immediate_fixed_point(self):
        # matching pennies: every strategy ties against a full-support belief
        g = two_by_two([[1, 0], [0, 1]], [[0, 1], [1, 0]])
        r = search_uncertainty_equilibrium(g, SearchMode.ITERATE)
        assert r.equilibria == [[["a", "b"], ["a", "b"]]] and r.stats["rounds"] == 1

    def test_three_players(self, rng):
        for _ in range(10):
            g = random_game(rng, (2, 2, 2), integer=True, low=0, high=2)
            r = search_uncertainty_equilibrium(g)
            assert r.verdict

    def test_guard(self):
        g = random_game(np.random.default_rng(0), (9, 8))
        with pytest.raises(GuardExceeded):
            search_uncertainty_equilibrium(g)


class TestProbe:
    def test_example_crisp(self, two_player):
        for s2 in (["a"], ["b"], ["a", "b"]):
            marg = [Density.crisp(AB, ["a"]), Density.crisp(AB, s2)]
            r = uncertainty_implies_nash_probe(two_player, marg, 10)
            assert r.verdict is True and r.flags == []

    def test_precondition(self, two_player):
        r = uncertainty_implies_nash_probe(two_player, [Density.ones(AB), Density.ones(AB)], 4)
        assert r.verdict is None
        assert "precondition not met" in r.notes[0]

    def test_two_players_only(self, rng):
        with pytest.raises(ValueError):
            uncertainty_implies_nash_probe(random_game(rng, (2, 2, 2)), [Density.ones(AB)] * 3)


class TestProperties:
    @given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 0.3, 0.7, 1.0]))
    @settings(max_examples=100, deadline=None)
    def test_quasiconvexity(self, seed, c):
        rng = np.random.default_rng(seed)
        g = random_game(rng, (int(rng.integers(1, 4)), int(rng.integers(1, 4))))
        i = int(rng.integers(2))
        nu1, nu2 = (random_density(rng, g.strategies[i]) for _ in range(2))
        other = random_density(rng, g.strategies[1 - i])

        def eu(mine):
            prof = [mine, other] if i == 0 else [other, mine]
            return expected_payoff(g, i, prof)

        mix = bconvex_combine_density(c, nu1, nu2)
        assert eu(mix) <= max(eu(nu1), eu(nu2)) + 1e-9

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_greatest_dominates(self, seed):
        rng = np.random.default_rng(seed)
        g = random_game(rng, (2, 2))
        prof = [random_capacity(rng, s) for s in g.strategies]
        for j in range(2):
            up = list(prof)
            up[j] = greatest(g.strategies[j])
            for i in range(2):
                assert expected_payoff(g, i, up) >= expected_payoff(g, i, prof) - 1e-12
