"""Command-line front end.

Every subcommand reads named JSON files and prints one JSON report on
stdout. Exit codes: 0 for a completed computation (a ``false`` verdict
included), 1 for input or validation errors, 2 for guard violations.
Errors go to stderr as ``{"error": {"kind": ..., "detail": ...}}``.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import capacity as cap
from . import io
from .capacity import Capacity, Density, classify_density
from .config import DEFAULT_DEVIATION_GRID, MAX_LATTICE_BITS
from .errors import FormatError, GuardExceeded, MaxPlusGameError, NoFixedPoint
from .games import (
    Mode,
    SearchMode,
    best_response,
    belief_payoffs,
    check_nash,
    check_uncertainty_equilibrium,
    expected_payoff,
    search_min_equilibrium,
    search_uncertainty_equilibrium,
    uncertainty_implies_nash_probe,
)
from .integral import maxplus_integral, maxplus_integral_possibility
from .tensor import tensor_density, tensor_n


class UsageError(MaxPlusGameError):
    kind = "UsageError"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(doc: dict) -> None:
    doc = dict(doc, schema_version=io.SCHEMA_VERSION)
    sys.stdout.write(io.dumps(doc) + "\n")


def _fail(kind: str, detail, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "detail": detail}}, sort_keys=True) + "\n")
    return code


def _warn(message: str) -> None:
    sys.stderr.write(json.dumps({"warning": message}) + "\n")


def _by_player(g, items: list[tuple[object, str | None]], what: str) -> list:
    """Order per-player files by their ``player`` key, or positionally when none has one."""
    tagged = [p for _, p in items if p is not None]
    if not tagged:
        if len(items) != g.n_players:
            raise FormatError(f"expected {g.n_players} {what} files, got {len(items)}")
        return [x for x, _ in items]
    if len(tagged) != len(items):
        raise FormatError(f"either every {what} file names its player or none does")
    out = [None] * g.n_players
    for x, p in items:
        try:
            i = g.index(p)
        except KeyError:
            raise FormatError(f"{what} file names unknown player {p!r}") from None
        if out[i] is not None:
            raise FormatError(f"two {what} files for player {p!r}")
        out[i] = x
    if any(x is None for x in out):
        raise FormatError(f"missing {what} for some players")
    return out


def _load_game(path):
    return io.parse_game(io.load_json(path))


def _capacity_only(x) -> Capacity:
    if isinstance(x, Density):
        if x.space.size > MAX_LATTICE_BITS:
            raise GuardExceeded("possibility capacity too large for a full lattice")
        return cap.from_density(x)
    return x


# --- subcommands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    space, kind, arr, _ = io.parse_capacity_raw(io.load_json(args.capacity))
    violations = io.check_raw_capacity(space, kind, arr)
    _emit({"valid": not violations, "kind": kind, "violations": violations})
    return 1 if violations else 0


def cmd_dual(args) -> int:
    x, player = io.load_capacity(args.capacity)
    _emit({"capacity": io.capacity_to_doc(cap.dual(_capacity_only(x)), player)})
    return 0


def cmd_classify(args) -> int:
    x, _ = io.load_capacity(args.capacity)
    c = classify_density(x) if isinstance(x, Density) else cap.classify(x)
    _emit({"class": c.tag.value, "possibility": c.possibility, "necessity": c.necessity})
    return 0


def cmd_tensor(args) -> int:
    factors = [io.load_capacity(p)[0] for p in args.capacities]
    size = int(np.prod([f.space.size for f in factors]))
    if all(isinstance(f, Density) for f in factors):
        if size > MAX_LATTICE_BITS:
            _warn(f"product lattice has 2^{size} subsets; using the density route")
        out = tensor_density(factors)
    else:
        if size > MAX_LATTICE_BITS:
            raise GuardExceeded(
                f"product lattice has 2^{size} subsets; only possibility inputs are supported "
                f"beyond 2^{MAX_LATTICE_BITS}"
            )
        out = tensor_n([_capacity_only(f) for f in factors])
    _emit({"capacity": io.capacity_to_doc(out)})
    return 0


def cmd_integrate(args) -> int:
    x, _ = io.load_capacity(args.capacity)
    phi = io.parse_function(io.load_json(args.function))
    if isinstance(x, Density):
        value = maxplus_integral_possibility(phi, x)
    else:
        value = maxplus_integral(phi, x)
    _emit({"value": value})
    return 0


def cmd_expected_payoff(args) -> int:
    g = _load_game(args.game)
    profile = _by_player(g, [io.load_capacity(p) for p in args.profile], "profile")
    i = g.index(args.player)
    _emit({"player": g.players[i], "value": expected_payoff(g, i, profile)})
    return 0


def cmd_best_response(args) -> int:
    g = _load_game(args.game)
    i = g.index(args.player)
    belief, _ = io.load_capacity(args.belief)
    labels = g.strategies[i].labels
    payoffs = belief_payoffs(g, i, belief)
    _emit({
        "player": g.players[i],
        "best_response": [labels[k] for k in best_response(g, i, belief)],
        "payoffs": {s: v for s, v in zip(labels, payoffs.tolist())},
    })
    return 0


def _load_deviations(g, paths) -> list[list] | None:
    if not paths:
        return None
    devs: list[list] = [[] for _ in g.players]
    for p in paths:
        x, player = io.load_capacity(p)
        if player is None:
            raise FormatError(f"deviation file {p} must name its player")
        devs[g.index(player)].append(x)
    return devs


def cmd_check_nash(args) -> int:
    g = _load_game(args.game)
    profile = _by_player(g, [io.load_capacity(p) for p in args.profile], "profile")
    report = check_nash(g, profile, Mode(args.mode), _load_deviations(g, args.deviations), args.grid)
    _emit(io.report_to_doc(report))
    return 0


def cmd_check_uncertainty(args) -> int:
    g = _load_game(args.game)
    beliefs = _by_player(g, [io.load_capacity(p) for p in args.beliefs], "belief")
    _emit(io.report_to_doc(check_uncertainty_equilibrium(g, beliefs)))
    return 0


def cmd_find_min(args) -> int:
    g = _load_game(args.game)
    _emit(io.report_to_doc(search_min_equilibrium(g, args.grid)))
    return 0


def cmd_find_uncertainty(args) -> int:
    g = _load_game(args.game)
    try:
        report = search_uncertainty_equilibrium(g, SearchMode(args.mode))
    except NoFixedPoint as exc:
        _emit({"kind": "uncertainty-search-iterate", "verdict": False,
               "failure": {"kind": exc.kind, "detail": str(exc)}, "cycle": exc.cycle})
        return 0
    _emit(io.report_to_doc(report))
    return 0


def cmd_probe(args) -> int:
    g = _load_game(args.game)
    marginals = _by_player(g, [io.load_capacity(p) for p in args.marginals], "marginal")
    _emit(io.report_to_doc(uncertainty_implies_nash_probe(g, marginals, args.grid)))
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(args.seed, args.cases)
    _emit({"seed": args.seed, "checks": results, "verdict": all(r["failures"] == 0 for r in results.values())})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maxplus-games", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the capacity axioms of a file")
    p.add_argument("--capacity", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dual", help="dual capacity")
    p.add_argument("--capacity", required=True)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("classify", help="possibility / necessity / general")
    p.add_argument("--capacity", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("tensor", help="tensor product of capacity files, in order")
    p.add_argument("--capacities", nargs="+", required=True)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("integrate", help="max-plus integral of a function")
    p.add_argument("--capacity", required=True)
    p.add_argument("--function", required=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("expected-payoff", help="payoff of a player under a capacity profile")
    p.add_argument("--game", required=True)
    p.add_argument("--profile", nargs="+", required=True)
    p.add_argument("--player", required=True)
    p.set_defaults(func=cmd_expected_payoff)

    p = sub.add_parser("best-response", help="best responses to a belief")
    p.add_argument("--game", required=True)
    p.add_argument("--player", required=True)
    p.add_argument("--belief", required=True)
    p.set_defaults(func=cmd_best_response)

    p = sub.add_parser("check-nash", help="Nash check against a deviation family")
    p.add_argument("--game", required=True)
    p.add_argument("--profile", nargs="+", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="max")
    p.add_argument("--grid", type=int, default=DEFAULT_DEVIATION_GRID)
    p.add_argument("--deviations", nargs="+")
    p.set_defaults(func=cmd_check_nash)

    p = sub.add_parser("check-uncertainty", help="equilibrium-under-uncertainty check")
    p.add_argument("--game", required=True)
    p.add_argument("--beliefs", nargs="+", required=True)
    p.set_defaults(func=cmd_check_uncertainty)

    p = sub.add_parser("find-min-equilibrium", help="grid search for a min-equilibrium")
    p.add_argument("--game", required=True)
    p.add_argument("--grid", type=int, required=True)
    p.set_defaults(func=cmd_find_min)

    p = sub.add_parser("find-uncertainty-equilibrium", help="crisp-support equilibrium search")
    p.add_argument("--game", required=True)
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default="crisp")
    p.set_defaults(func=cmd_find_uncertainty)

    p = sub.add_parser("probe-nash", help="is an uncertainty equilibrium also Nash?")
    p.add_argument("--game", required=True)
    p.add_argument("--marginals", nargs=2, required=True)
    p.add_argument("--grid", type=int, default=DEFAULT_DEVIATION_GRID)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("selftest", help="randomized invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except GuardExceeded as exc:
        return _fail(exc.kind, str(exc), 2)
    except MaxPlusGameError as exc:
        detail = str(exc)
        if hasattr(exc, "violations"):
            detail = {"message": detail, "violations": [v.detail for v in exc.violations]}
        return _fail(exc.kind, detail, 1)
    except (KeyError, ValueError) as exc:
        return _fail("InputError", str(exc).strip("'\""), 1)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
