"""JSON documents for capacities, functions, games and reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .capacity import Capacity, Density, FiniteSpace, capacity_violations
from .errors import FormatError, InvalidCapacity, InvalidDensity
from .games import EquilibriumReport, Game, Witness
from .integral import RealFunction

SCHEMA_VERSION = "1"
NEG_INF_TOKEN = "-inf"

_CAPACITY_KEYS = {"space", "kind", "density", "values", "player"}
_FUNCTION_KEYS = {"space", "values"}
_GAME_KEYS = {"players", "strategies", "payoffs"}


def load_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def _require(doc, allowed: set[str], required: set[str], what: str) -> None:
    if not isinstance(doc, dict):
        raise FormatError(f"{what} must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise FormatError(f"{what}: unknown key(s) {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise FormatError(f"{what}: missing key(s) {sorted(missing)}")


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{where}: expected a number, got {x!r}")
    return float(x)


def parse_space(labels) -> FiniteSpace:
    if not isinstance(labels, list):
        raise FormatError("space must be a list of labels")
    try:
        return FiniteSpace(tuple(labels))
    except ValueError as exc:
        raise FormatError(f"space: {exc}") from None


def parse_capacity_raw(doc) -> tuple[FiniteSpace, str, np.ndarray, str | None]:
    """Decode a capacity document without validating the capacity axioms.

    Returns ``(space, kind, array, player)`` where ``array`` holds the density
    weights for kind ``possibility`` and the subset-indexed values for kind
    ``general``.
    """
    _require(doc, _CAPACITY_KEYS, {"space", "kind"}, "capacity")
    space = parse_space(doc["space"])
    kind = doc["kind"]
    player = doc.get("player")
    if player is not None and not isinstance(player, str):
        raise FormatError("player must be a string")
    if kind == "possibility":
        if "values" in doc or "density" not in doc:
            raise FormatError("possibility capacities carry a 'density' and no 'values'")
        dens = doc["density"]
        if not isinstance(dens, dict) or set(dens) != set(space.labels):
            raise FormatError("density must give exactly one weight per point")
        w = np.array([_number(dens[s], f"density[{s}]") for s in space.labels])
        return space, kind, w, player
    if kind == "general":
        if "density" in doc or "values" not in doc:
            raise FormatError("general capacities carry 'values' and no 'density'")
        if space.size > 16:
            raise FormatError("general capacities are limited to 16 points")
        vals = doc["values"]
        if not isinstance(vals, dict):
            raise FormatError("values must be an object keyed by subsets")
        out = np.full(1 << space.size, np.nan)
        for key, x in vals.items():
            try:
                m = space.parse_subset(key)
            except (KeyError, ValueError) as exc:
                raise FormatError(f"bad subset key {key!r}: {exc}") from None
            if not np.isnan(out[m]):
                raise FormatError(f"subset {key!r} given twice")
            out[m] = _number(x, f"values[{key!r}]")
        missing = np.flatnonzero(np.isnan(out))
        if len(missing):
            keys = [space.subset_key(int(m)) for m in missing[:5]]
            raise FormatError(f"{len(missing)} subset(s) missing, e.g. {keys}")
        return space, kind, out, player
    raise FormatError(f"unknown capacity kind {kind!r}")


def parse_capacity(doc) -> tuple[Capacity | Density, str | None]:
    """Decode and validate; possibility documents become :class:`Density`."""
    space, kind, arr, player = parse_capacity_raw(doc)
    if kind == "possibility":
        return Density(space, arr), player
    return Capacity(space, arr), player


def load_capacity(path) -> tuple[Capacity | Density, str | None]:
    return parse_capacity(load_json(path))


def fmt(x: float):
    """12 significant digits; ``-inf`` becomes the string sentinel."""
    if x == -math.inf:
        return NEG_INF_TOKEN
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize {x!r}")
    return float(f"{x:.12g}")


def parse_ext(x) -> float:
    if x == NEG_INF_TOKEN:
        return -math.inf
    return _number(x, "extended real")


def capacity_to_doc(x: Capacity | Density, player: str | None = None) -> dict:
    doc: dict = {"space": list(x.space.labels)}
    if isinstance(x, Density):
        doc["kind"] = "possibility"
        doc["density"] = {s: fmt(w) for s, w in zip(x.space.labels, x.weights)}
    else:
        doc["kind"] = "general"
        doc["values"] = {x.space.subset_key(m): fmt(v) for m, v in enumerate(x.values)}
    if player is not None:
        doc["player"] = player
    return doc


def parse_function(doc) -> RealFunction:
    _require(doc, _FUNCTION_KEYS, _FUNCTION_KEYS, "function")
    space = parse_space(doc["space"])
    vals = doc["values"]
    if not isinstance(vals, dict) or set(vals) != set(space.labels):
        raise FormatError("function values must give exactly one number per point")
    v = [_number(vals[s], f"values[{s}]") for s in space.labels]
    try:
        return RealFunction(space, np.array(v))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def function_to_doc(phi: RealFunction) -> dict:
    return {"space": list(phi.space.labels),
            "values": {s: fmt(v) for s, v in zip(phi.space.labels, phi.values)}}


def parse_game(doc) -> Game:
    """Payoff arrays are nested lists indexed in declared strategy order, first player outermost."""
    _require(doc, _GAME_KEYS, _GAME_KEYS, "game")
    players = doc["players"]
    if not isinstance(players, list) or not all(isinstance(p, str) for p in players):
        raise FormatError("players must be a list of strings")
    strategies, payoffs = doc["strategies"], doc["payoffs"]
    if not isinstance(strategies, dict) or set(strategies) != set(players):
        raise FormatError("strategies must list the strategies of every player")
    if not isinstance(payoffs, dict) or set(payoffs) != set(players):
        raise FormatError("payoffs must give one array per player")
    spaces = tuple(parse_space(strategies[p]) for p in players)
    shape = tuple(s.size for s in spaces)
    arrays = []
    for p in players:
        try:
            arr = np.array(payoffs[p], dtype=float)
        except (TypeError, ValueError):
            raise FormatError(f"payoffs of {p} are not a numeric array") from None
        if arr.shape != shape:
            raise FormatError(f"payoffs of {p} have shape {arr.shape}, expected {shape}")
        arrays.append(arr)
    try:
        return Game(tuple(players), spaces, tuple(arrays))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def game_to_doc(g: Game) -> dict:
    return {
        "players": list(g.players),
        "strategies": {p: list(s.labels) for p, s in zip(g.players, g.strategies)},
        "payoffs": {p: u.tolist() for p, u in zip(g.players, g.payoffs)},
    }


def violations_to_doc(exc: InvalidCapacity | list, space: FiniteSpace) -> list[dict]:
    vs = exc.violations if isinstance(exc, InvalidCapacity) else exc
    out = []
    for v in vs:
        d = {"kind": v.kind, "detail": v.detail}
        if v.subset is not None:
            d["subset"] = space.subset_key(v.subset)
        if v.superset is not None:
            d["superset"] = space.subset_key(v.superset)
        out.append(d)
    return out


def check_raw_capacity(space: FiniteSpace, kind: str, arr: np.ndarray) -> list[dict]:
    """Violation list for a decoded document (densities are checked as densities)."""
    if kind == "possibility":
        try:
            Density(space, arr)
        except InvalidDensity as exc:
            return [{"kind": "DensityViolation", "detail": str(exc)}]
        return []
    return violations_to_doc(capacity_violations(arr, space), space)


def _strategy_doc(x) -> dict | None:
    if x is None:
        return None
    return capacity_to_doc(x)


def witness_to_doc(w: Witness) -> dict:
    d: dict = {"player": w.player}
    if w.delta is not None:
        d["delta"] = fmt(w.delta)
    if w.deviation is not None:
        d["deviation"] = _strategy_doc(w.deviation)
    if w.subset is not None:
        d["subset"] = w.subset
    if w.mass is not None:
        d["mass"] = fmt(w.mass)
    return d


def report_to_doc(r: EquilibriumReport) -> dict:
    doc: dict = {"kind": r.kind, "verdict": r.verdict,
                 "witnesses": [witness_to_doc(w) for w in r.witnesses]}
    if r.profile is not None:
        doc["profile"] = [_strategy_doc(x) for x in r.profile]
    if r.regret is not None:
        doc["regret"] = fmt(r.regret)
    if r.equilibria:
        doc["equilibria"] = r.equilibria
    if r.best_responses is not None:
        doc["best_responses"] = r.best_responses
    if r.stats:
        doc["stats"] = r.stats
    if r.flags:
        doc["flags"] = r.flags
    if r.notes:
        doc["notes"] = r.notes
    return doc


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return fmt(float(x))
    return x


def dumps(doc: dict) -> str:
    """Deterministic rendering: sorted keys, 12 significant digits, ``"-inf"`` sentinel."""
    return json.dumps(_clean(doc), sort_keys=True)
