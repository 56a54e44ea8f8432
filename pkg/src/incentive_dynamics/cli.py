"""Command-line interface: simulate, solve, stability, portrait, verify."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import classify_long_run, stability_report
from .dynamics import INTEGRATORS, TrajectoryConfig, integrate
from .equilibria import find_incentive_equilibria
from .exceptions import BoundaryError, InvalidInputError, PreconditionError, UnsupportedShapeError
from .game import Game, MixedProfile, load_game, make_rps, make_uniform_profile
from .incentives import IncentiveSpec
from .portrait import PortraitSpec, portrait, write_grid_csv
from .verify import CHECKS, GROUPS, run_checks

EXIT_USAGE = 2
EXIT_BLOW_UP = 3
EXIT_FAILED = 1


def parse_game(text: str) -> Game:
    """``rps:a,b``, ``matrix:r11,r12;r21,r22`` (symmetric) or a JSON file path."""
    if text.startswith("rps:"):
        try:
            a, b = (float(v) for v in text[4:].split(","))
        except ValueError as exc:
            raise InvalidInputError(f"bad rps game {text!r}; expected rps:a,b") from exc
        return make_rps(a, b)
    if text.startswith("matrix:"):
        try:
            rows = [[float(v) for v in row.split(",")] for row in text[7:].split(";")]
        except ValueError as exc:
            raise InvalidInputError(f"bad matrix {text!r}") from exc
        return Game.from_matrix(rows)
    path = Path(text)
    if not path.exists():
        raise InvalidInputError(f"game file {text!r} not found")
    return load_game(path)


def parse_profile(text: str | None, game: Game) -> MixedProfile:
    """Comma-separated weights; separate players with ``;``. One vector is reused
    for every player. Default: 0.8 on the first strategy, the rest shared equally."""
    counts = game.strategy_counts
    if text is None:
        seats = []
        for s in counts:
            x = np.full(s, 0.2 / (s - 1)) if s > 1 else np.ones(1)
            if s > 1:
                x[0] = 0.8
            seats.append(x)
        return MixedProfile(tuple(seats))
    try:
        parts = [np.array([float(v) for v in p.split(",")]) for p in text.split(";")]
    except ValueError as exc:
        raise InvalidInputError(f"bad profile {text!r}") from exc
    if len(parts) == 1:
        parts = parts * len(counts)
    seats = []
    for p in parts:
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise InvalidInputError(f"profile {text!r} is not a probability vector")
        seats.append(p / p.sum())
    return MixedProfile(tuple(seats))


def _equilibria(spec: IncentiveSpec, game: Game) -> list[MixedProfile]:
    return [r.point for r in find_incentive_equilibria(spec, game)]


def _describe(point: MixedProfile, game: Game) -> str:
    if point.distance(make_uniform_profile(game)) < 1e-6:
        return "uniform"
    return "(" + "; ".join(",".join(f"{v:.6g}" for v in x) for x in point) + ")"


def cmd_simulate(args) -> int:
    game = parse_game(args.game)
    spec = IncentiveSpec.parse(args.incentive)
    x0 = parse_profile(args.x0, game)
    cfg = TrajectoryConfig(T=args.T, h=args.h, integrator=args.integrator, record_stride=args.stride)
    eqs = _equilibria(spec, game)
    tr = integrate(spec, game, x0, cfg, target=eqs or None, population=args.population)
    tr.to_csv(args.out)
    if tr.status == "blow_up":
        print(f"blow_up at t={tr.times[-1]:.6g}; trajectory written to {args.out}")
        return EXIT_BLOW_UP
    if tr.status == "converged":
        summary = f"converged {_describe(tr.converged_to, game)}"
    elif len(tr) < 100:
        summary = "undetermined (fewer than 100 samples)"
    else:
        lr = classify_long_run(tr, eqs)
        if lr.kind == "converged":
            summary = f"converged {_describe(lr.target, game)}"
        elif lr.kind == "cycling":
            summary = f"cycling (period {lr.period:.4g})"
        else:
            summary = "undetermined"
    print(summary)
    return 0


def cmd_solve(args) -> int:
    game = parse_game(args.game)
    spec = IncentiveSpec.parse(args.incentive)
    reports = find_incentive_equilibria(spec, game, population=args.population)
    text = json.dumps([r.to_dict() for r in reports], indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_stability(args) -> int:
    game = parse_game(args.game)
    spec = IncentiveSpec.parse(args.incentive)
    x_hat = parse_profile(args.x0, game) if args.x0 else make_uniform_profile(game)
    rep = stability_report(spec, game, x_hat, n_samples=args.samples, seed=args.seed)
    text = json.dumps(rep.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_portrait(args) -> int:
    game = parse_game(args.game)
    spec = IncentiveSpec.parse(args.incentive)
    pspec = PortraitSpec(str(spec), resolution=args.resolution, n_seeds=args.seeds, T=args.T, h=args.h)
    eqs = _equilibria(spec, game)
    svg, grid, _ = portrait(game, pspec, equilibria=eqs)
    out = Path(args.out)
    out.write_text(svg)
    csv_path = Path(args.csv) if args.csv else out.with_suffix(".csv")
    write_grid_csv(grid, csv_path)
    print(f"wrote {out} and {csv_path}")
    return 0


def cmd_verify(args) -> int:
    try:
        results = run_checks(args.only, echo=print)
    except KeyError as exc:
        print(f"unknown check {exc.args[0]!r}; choose from {sorted([*CHECKS, *GROUPS])}", file=sys.stderr)
        return EXIT_USAGE
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_FAILED if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="incentive-dynamics", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, T=200.0):
        sp.add_argument("--game", required=True, help="path | rps:a,b | matrix:r1;r2;...")
        sp.add_argument("--incentive", required=True, help="replicator|bnn|logit:<eta>|smith|projection|dash")
        sp.add_argument("--T", type=float, default=T)
        sp.add_argument("--h", type=float, default=0.01)

    s = sub.add_parser("simulate", help="integrate one trajectory and classify it")
    common(s)
    s.add_argument("--x0")
    s.add_argument("--integrator", choices=INTEGRATORS, default="rk4_fixed")
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("--population", choices=("auto", "single", "multi"), default="auto")
    s.add_argument("--out", default="trajectory.csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("solve", help="find incentive equilibria (JSON)")
    s.add_argument("--game", required=True)
    s.add_argument("--incentive", required=True)
    s.add_argument("--population", choices=("auto", "single", "multi"), default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("stability", help="stability evidence at an equilibrium (JSON)")
    s.add_argument("--game", required=True)
    s.add_argument("--incentive", required=True)
    s.add_argument("--x0", help="equilibrium to probe (default uniform)")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("portrait", help="ternary phase portrait (SVG + grid CSV)")
    common(s, T=60.0)
    s.add_argument("--resolution", type=int, default=30)
    s.add_argument("--seeds", type=int, default=6, help="number of streamline starts")
    s.add_argument("--out", default="portrait.svg")
    s.add_argument("--csv", help="grid CSV path (default: SVG path with .csv)")
    s.set_defaults(func=cmd_portrait)

    s = sub.add_parser("verify", help="run the result checks, one line per check")
    s.add_argument("--only", action="append", help="check or group name; repeatable")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, UnsupportedShapeError, BoundaryError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
