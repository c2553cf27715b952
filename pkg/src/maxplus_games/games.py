"""Finite games with max-plus expected payoffs and their equilibria.

Two equilibrium notions are handled:

* Nash equilibria of the game in capacities, where each player picks a
  capacity on its own strategies and is paid the max-plus integral of its
  payoff against the tensor product of the profile (``Mode.MAX`` means no
  deviation raises the payoff, ``Mode.MIN`` means none lowers it);
* equilibria under uncertainty, where each player holds a belief capacity on
  the opponents' joint strategies and every belief is null outside the
  product of the opponents' best-response sets.

Opponent spaces always list the opponents in ascending player order.
"""

from __future__ import annotations

import enum
import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .capacity import (
    Capacity,
    Density,
    FiniteSpace,
    as_capacity,
    as_density,
    grid_densities,
    product_space,
)
from .config import DEFAULT_DEVIATION_GRID, DEFAULT_LIMITS, TOL, SearchLimits
from .errors import EmptyDeviationSet, GuardExceeded, NoFixedPoint, SpaceMismatch
from .integral import integrate_array, integrate_density_array, log0
from .tensor import tensor_density, tensor_n

log = logging.getLogger(__name__)

Strategy = Capacity | Density


class Mode(enum.Enum):
    MAX = "max"
    MIN = "min"


class SearchMode(enum.Enum):
    CRISP_ENUMERATE = "crisp"
    ITERATE = "iterate"


@dataclass(frozen=True, eq=False)
class Game:
    """``payoffs[i]`` has one axis per player, in player order."""

    players: tuple[str, ...]
    strategies: tuple[FiniteSpace, ...]
    payoffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        players = tuple(self.players)
        strategies = tuple(self.strategies)
        if not players:
            raise ValueError("a game needs at least one player")
        if len(set(players)) != len(players):
            raise ValueError("duplicate player ids")
        if len(strategies) != len(players) or len(self.payoffs) != len(players):
            raise ValueError("need one strategy space and one payoff tensor per player")
        shape = tuple(s.size for s in strategies)
        payoffs = []
        for p, u in zip(players, self.payoffs):
            arr = np.array(u, dtype=float)
            if arr.shape != shape:
                raise ValueError(f"payoff tensor of {p} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"payoff tensor of {p} has non-finite entries")
            arr.setflags(write=False)
            payoffs.append(arr)
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "strategies", strategies)
        object.__setattr__(self, "payoffs", tuple(payoffs))

    @classmethod
    def from_arrays(cls, payoffs, labels: Sequence[Sequence[str]] | None = None,
                    players: Sequence[str] | None = None) -> Game:
        """Convenience constructor; default labels are ``s0, s1, ...`` and ``P1, P2, ...``."""
        arrs = [np.asarray(u, dtype=float) for u in payoffs]
        shape = arrs[0].shape
        if labels is None:
            labels = [[f"s{k}" for k in range(n)] for n in shape]
        if players is None:
            players = [f"P{i + 1}" for i in range(len(arrs))]
        return cls(tuple(players), tuple(FiniteSpace(tuple(ls)) for ls in labels), tuple(arrs))

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.strategies)

    def index(self, player: str | int) -> int:
        if isinstance(player, (int, np.integer)):
            if not 0 <= player < self.n_players:
                raise KeyError(f"no player {player}")
            return int(player)
        try:
            return self.players.index(player)
        except ValueError:
            raise KeyError(f"unknown player {player!r}") from None

    def opponents(self, i: int) -> list[int]:
        return [j for j in range(self.n_players) if j != i]

    def opponent_space(self, i: int) -> FiniteSpace:
        return product_space(*(self.strategies[j] for j in self.opponents(i)))

    def payoff_slice(self, i: int, xi: int) -> np.ndarray:
        """``y -> u_i(xi, y)`` over the opponent space, flattened lexicographically."""
        return np.take(self.payoffs[i], xi, axis=i).ravel()


@dataclass(frozen=True)
class Witness:
    """Per-player evidence attached to a report.

    For Nash checks ``delta`` is the payoff gain of the worst deviation in the
    mode's direction; for uncertainty checks ``mass`` is the belief's value on
    the offending ``subset``.
    """

    player: str
    delta: float | None = None
    deviation: Strategy | None = None
    subset: str | None = None
    mass: float | None = None


@dataclass
class EquilibriumReport:
    kind: str
    verdict: bool | None
    witnesses: list[Witness] = field(default_factory=list)
    profile: list[Strategy] | None = None
    regret: float | None = None
    equilibria: list[list[list[str]]] = field(default_factory=list)
    best_responses: list[list[str]] | None = None
    stats: dict = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def _check_space(x: Strategy, space: FiniteSpace, what: str) -> None:
    if x.space != space:
        raise SpaceMismatch(f"{what} lives on {list(x.space.labels)}, expected {list(space.labels)}")


def _check_profile(g: Game, profile: Sequence[Strategy]) -> None:
    if len(profile) != g.n_players:
        raise SpaceMismatch(f"profile has {len(profile)} components for {g.n_players} players")
    for j, x in enumerate(profile):
        _check_space(x, g.strategies[j], f"component {j}")


def _integrate(phi: np.ndarray, nu: Strategy) -> float:
    d = as_density(nu)
    if d is not None:
        return integrate_density_array(phi, d.weights)
    return integrate_array(phi, nu.values)


def expected_payoff(g: Game, i: str | int, profile: Sequence[Strategy]) -> float:
    """Integral of ``u_i`` against the tensor product of the profile.

    All-possibility profiles take the density route; anything else builds
    the full product lattice.
    """
    i = g.index(i)
    _check_profile(g, profile)
    dens = [as_density(x) for x in profile]
    u = g.payoffs[i].ravel()
    if all(d is not None for d in dens):
        return integrate_density_array(u, tensor_density(dens).weights)
    nu = tensor_n([as_capacity(x) for x in profile])
    return integrate_array(u, nu.values)


def belief_payoff(g: Game, i: str | int, xi: str | int, nu: Strategy) -> float:
    """Integral of the slice ``u_i(xi, .)`` against a belief on the opponent space."""
    i = g.index(i)
    _check_space(nu, g.opponent_space(i), "belief")
    if not isinstance(xi, (int, np.integer)):
        xi = g.strategies[i].index(xi)
    return _integrate(g.payoff_slice(i, xi), nu)


def belief_payoffs(g: Game, i: int, nu: Strategy) -> np.ndarray:
    _check_space(nu, g.opponent_space(i), "belief")
    d = as_density(nu)
    rows = np.moveaxis(g.payoffs[i], i, 0).reshape(g.shape[i], -1)
    if d is not None:
        return np.max(log0(d.weights)[None, :] + rows, axis=1)
    return np.array([integrate_array(r, nu.values) for r in rows])


def best_response(g: Game, i: str | int, nu: Strategy) -> tuple[int, ...]:
    """Indices of the strategies within ``TOL`` of the best belief payoff."""
    i = g.index(i)
    p = belief_payoffs(g, i, nu)
    return tuple(int(k) for k in np.flatnonzero(p >= p.max() - TOL))


def _mask(indices) -> int:
    return sum(1 << k for k in indices)


# --- Nash checks --------------------------------------------------------------

def default_deviations(space: FiniteSpace, grid_m: int = DEFAULT_DEVIATION_GRID) -> list[Density]:
    """Grid densities of resolution ``grid_m``; every Dirac density is among them."""
    return grid_densities(space, grid_m)


def _density_deviation_payoffs(g: Game, i: int, dens: Sequence[Density],
                               candidates: np.ndarray) -> np.ndarray:
    """Payoffs of player ``i`` for each row of ``candidates`` (densities on X_i),
    the others playing ``dens``."""
    k = g.n_players
    logs = []
    for j in g.opponents(i):
        shape = [1] * k
        shape[j] = g.shape[j]
        logs.append(log0(dens[j].weights).reshape(shape))
    others = reduce(np.minimum, logs, np.zeros([1] * k))
    shape = [1] * (k + 1)
    shape[0] = len(candidates)
    shape[i + 1] = g.shape[i]
    own = log0(candidates).reshape(shape)
    total = np.minimum(own, others[None]) + g.payoffs[i][None]
    return total.reshape(len(candidates), -1).max(axis=1)


def check_nash(g: Game, profile: Sequence[Strategy], mode: Mode = Mode.MAX,
               deviations: Sequence[Sequence[Strategy]] | None = None,
               grid_m: int = DEFAULT_DEVIATION_GRID) -> EquilibriumReport:
    """Check the profile against a finite family of unilateral deviations.

    The verdict is relative to the family: by default the grid densities of
    resolution ``grid_m`` (Diracs included), otherwise ``deviations[i]`` for
    player ``i``.
    """
    _check_profile(g, profile)
    mode = Mode(mode)
    sign = 1.0 if mode is Mode.MAX else -1.0
    if deviations is None:
        deviations = [default_deviations(s, grid_m) for s in g.strategies]
    if len(deviations) != g.n_players:
        raise SpaceMismatch("need one deviation family per player")
    dens = [as_density(x) for x in profile]
    witnesses = []
    examined = 0
    for i in range(g.n_players):
        devs = list(deviations[i])
        if not devs:
            raise EmptyDeviationSet(f"no deviations for player {g.players[i]}")
        for dv in devs:
            _check_space(dv, g.strategies[i], "deviation")
        current = expected_payoff(g, i, profile)
        dev_dens = [as_density(dv) for dv in devs]
        if all(d is not None for d in dens) and all(d is not None for d in dev_dens):
            payoffs = _density_deviation_payoffs(g, i, dens, np.array([d.weights for d in dev_dens]))
        else:
            payoffs = []
            for dv in devs:
                trial = list(profile)
                trial[i] = dv
                payoffs.append(expected_payoff(g, i, trial))
            payoffs = np.array(payoffs)
        examined += len(devs)
        deltas = sign * (payoffs - current)
        worst = int(np.argmax(deltas))
        witnesses.append(Witness(g.players[i], delta=float(deltas[worst]), deviation=devs[worst]))
    verdict = all(w.delta <= TOL for w in witnesses)
    return EquilibriumReport(
        kind=f"nash-{mode.value}",
        verdict=verdict,
        witnesses=witnesses,
        profile=list(profile),
        stats={"deviations_examined": examined},
        notes=["verdict is relative to the supplied deviation family"],
    )


# --- equilibrium under uncertainty -----------------------------------------

def _product_mask(g: Game, i: int, responses: Sequence[Sequence[int]]) -> int:
    """Mask, inside the opponent space of ``i``, of the product of the opponents' sets."""
    opp = g.opponents(i)
    mask = 0
    for pos, cell in enumerate(itertools.product(*(range(g.shape[j]) for j in opp))):
        if all(c in responses[j] for c, j in zip(cell, opp)):
            mask |= 1 << pos
    return mask


def _mass(nu: Strategy, mask: int) -> float:
    if isinstance(nu, Density):
        ws = [nu.weights[k] for k in range(nu.space.size) if mask >> k & 1]
        return float(max(ws, default=0.0))
    return float(nu.values[mask])


def check_uncertainty_equilibrium(g: Game, beliefs: Sequence[Strategy]) -> EquilibriumReport:
    """Every belief must put exactly zero mass off the opponents' best responses.

    Zero is structural: only a stored 0.0 counts.
    """
    if len(beliefs) != g.n_players:
        raise SpaceMismatch(f"{len(beliefs)} beliefs for {g.n_players} players")
    for i, nu in enumerate(beliefs):
        _check_space(nu, g.opponent_space(i), f"belief of {g.players[i]}")
    responses = [best_response(g, j, beliefs[j]) for j in range(g.n_players)]
    witnesses = []
    for i, nu in enumerate(beliefs):
        space = g.opponent_space(i)
        outside = space.full_mask ^ _product_mask(g, i, responses)
        witnesses.append(
            Witness(g.players[i], subset=space.subset_key(outside), mass=_mass(nu, outside))
        )
    return EquilibriumReport(
        kind="uncertainty",
        verdict=all(w.mass == 0.0 for w in witnesses),
        witnesses=witnesses,
        best_responses=[[g.strategies[j].labels[k] for k in r] for j, r in enumerate(responses)],
    )


# --- searches -------------------------------------------------------------------

def search_min_equilibrium(g: Game, grid_m: int,
                           limits: SearchLimits = DEFAULT_LIMITS) -> EquilibriumReport:
    """Grid search for a Nash min-equilibrium over possibility densities.

    For a profile, player ``i``'s regret is its payoff minus the lowest payoff
    it can reach by switching to another grid density; the profile's regret
    is the largest over players. Returns the first profile, in lexicographic
    order of the concatenated density vectors, whose regret is within ``TOL``
    of the minimum.
    """
    if not 1 <= grid_m <= limits.max_grid_m:
        raise GuardExceeded(f"grid resolution {grid_m} outside 1..{limits.max_grid_m}")
    if max(g.shape) > limits.max_grid_strategies:
        raise GuardExceeded(
            f"strategy spaces of size {max(g.shape)} exceed {limits.max_grid_strategies}"
        )
    grids = [grid_densities(s, grid_m) for s in g.strategies]
    sizes = tuple(len(gr) for gr in grids)
    total = int(np.prod(sizes))
    if total > limits.max_grid_profiles:
        raise GuardExceeded(f"{total} grid profiles exceed {limits.max_grid_profiles}")

    k = g.n_players
    logs = []
    for j, gr in enumerate(grids):
        shape = [1] * k
        shape[j] = sizes[j]
        logs.append([log0(np.array([d.weights[x] for d in gr])).reshape(shape)
                     for x in range(g.shape[j])])
    payoffs = [np.full(sizes, -np.inf) for _ in range(k)]
    for cell in itertools.product(*(range(n) for n in g.shape)):
        term = reduce(np.minimum, (logs[j][x] for j, x in enumerate(cell)))
        for i in range(k):
            np.maximum(payoffs[i], term + g.payoffs[i][cell], out=payoffs[i])

    per_player = [payoffs[i] - payoffs[i].min(axis=i, keepdims=True) for i in range(k)]
    regret = reduce(np.maximum, per_player)
    flat = regret.ravel()
    best = int(np.flatnonzero(flat <= flat.min() + TOL)[0])
    idx = np.unravel_index(best, sizes)
    value = float(flat[best])
    return EquilibriumReport(
        kind="min-equilibrium-search",
        verdict=value <= TOL,
        profile=[grids[j][idx[j]] for j in range(k)],
        regret=value,
        witnesses=[Witness(g.players[i], delta=float(per_player[i][idx])) for i in range(k)],
        stats={"grid_m": grid_m, "grid_sizes": list(sizes), "profiles_examined": total},
        notes=["regret is relative to the grid of densities"],
    )


def _crisp_belief(g: Game, i: int, supports: Sequence[int]) -> Density:
    """Player ``i``'s belief: tensor product of the opponents' crisp densities."""
    opp = g.opponents(i)
    if not opp:
        return Density.ones(g.opponent_space(i))
    return tensor_density([Density.crisp(g.strategies[j], supports[j]) for j in opp])


def _responses_to(g: Game, supports: Sequence[int], cache: dict) -> tuple[int, ...]:
    masks = []
    for i in range(g.n_players):
        key = (i,) + tuple(supports[j] for j in g.opponents(i))
        if key not in cache:
            belief = _crisp_belief(g, i, supports)
            cache[key] = _mask(best_response(g, i, belief))
        masks.append(cache[key])
    return tuple(masks)


def _support_labels(g: Game, supports: Sequence[int]) -> list[list[str]]:
    return [[g.strategies[j].labels[k] for k in g.strategies[j].members(m)]
            for j, m in enumerate(supports)]


def _verified(g: Game, supports: Sequence[int]) -> list[Density]:
    beliefs = [_crisp_belief(g, i, supports) for i in range(g.n_players)]
    if not check_uncertainty_equilibrium(g, beliefs).verdict:
        raise AssertionError(f"accepted supports {supports} fail the equilibrium check")
    return beliefs


def search_uncertainty_equilibrium(g: Game, mode: SearchMode = SearchMode.CRISP_ENUMERATE,
                                   limits: SearchLimits = DEFAULT_LIMITS,
                                   max_rounds: int = 10_000) -> EquilibriumReport:
    """Search equilibria under uncertainty whose beliefs are products of crisp marginals.

    ``CRISP_ENUMERATE`` tries every profile of nonempty supports and keeps
    those where each support lies inside the player's best responses to the
    product of the others' supports. ``ITERATE`` starts from full supports
    and replaces every support by the best-response set until it stops
    changing; a revisited state raises :class:`NoFixedPoint`.
    """
    mode = SearchMode(mode)
    cache: dict = {}
    if mode is SearchMode.CRISP_ENUMERATE:
        if sum(g.shape) > limits.max_crisp_total:
            raise GuardExceeded(
                f"{sum(g.shape)} pure strategies in total exceed {limits.max_crisp_total}"
            )
        accepted = []
        examined = 0
        for supports in itertools.product(*(range(1, 1 << n) for n in g.shape)):
            examined += 1
            responses = _responses_to(g, supports, cache)
            if all(s & ~r == 0 for s, r in zip(supports, responses)):
                _verified(g, supports)
                accepted.append(supports)
        return EquilibriumReport(
            kind="uncertainty-search-crisp",
            verdict=bool(accepted),
            equilibria=[_support_labels(g, s) for s in accepted],
            stats={"support_profiles_examined": examined, "accepted": len(accepted)},
        )

    state = tuple((1 << n) - 1 for n in g.shape)
    seen = {state: 0}
    history = [state]
    for rounds in range(1, max_rounds + 1):
        nxt = _responses_to(g, state, cache)
        if nxt == state:
            _verified(g, state)
            return EquilibriumReport(
                kind="uncertainty-search-iterate",
                verdict=True,
                equilibria=[_support_labels(g, state)],
                stats={"rounds": rounds},
            )
        if nxt in seen:
            cycle = [_support_labels(g, s) for s in history[seen[nxt]:]]
            raise NoFixedPoint(f"best-response iteration cycles with period {len(cycle)}", cycle)
        seen[nxt] = len(history)
        history.append(nxt)
        state = nxt
    raise NoFixedPoint(f"no fixed point within {max_rounds} rounds")


def uncertainty_implies_nash_probe(g: Game, marginals: Sequence[Strategy],
                                   grid_m: int = DEFAULT_DEVIATION_GRID) -> EquilibriumReport:
    """Check that an equilibrium under uncertainty is also a Nash max-equilibrium.

    ``marginals[j]`` is a capacity on player ``j``'s strategies; player ``i``
    believes the opponent plays ``marginals[other]``. When the uncertainty
    condition holds but a deviation on the grid raises a payoff, the report
    is flagged ``COUNTEREXAMPLE`` if all marginals are possibility
    capacities and ``OPEN_PROBLEM_EVIDENCE`` otherwise.
    """
    if g.n_players != 2:
        raise ValueError("the probe is defined for two-player games")
    _check_profile(g, marginals)
    beliefs = [marginals[1], marginals[0]]
    unc = check_uncertainty_equilibrium(g, beliefs)
    if not unc.verdict:
        return EquilibriumReport(
            kind="nash-probe",
            verdict=None,
            witnesses=unc.witnesses,
            best_responses=unc.best_responses,
            notes=["precondition not met: beliefs are not an equilibrium under uncertainty"],
        )
    nash = check_nash(g, marginals, Mode.MAX, grid_m=grid_m)
    flags = []
    if not nash.verdict:
        if all(as_density(x) is not None for x in marginals):
            flags.append("COUNTEREXAMPLE")
            log.error("uncertainty equilibrium with possibility beliefs fails the Nash check")
        else:
            flags.append("OPEN_PROBLEM_EVIDENCE")
            log.warning("general-capacity uncertainty equilibrium is not Nash on the grid")
    return EquilibriumReport(
        kind="nash-probe",
        verdict=nash.verdict,
        witnesses=nash.witnesses,
        profile=list(marginals),
        best_responses=unc.best_responses,
        stats=nash.stats,
        flags=flags,
        notes=nash.notes,
    )
