"""Command-line entry point.

Subcommands: ``solve`` one game file under a chosen equilibrium,
``generate`` game files (random / example1 / example2 / maxsat),
``experiment`` a full grid run, and ``pou`` for the three inefficiency
indices of a single game.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    ExperimentConfig,
    compute_pou,
    normalize_payoffs,
    run_experiment,
    solve_one,
)
from .generators import (
    CnfFormula,
    RandomGameConfig,
    build_example1,
    build_example2,
    build_maxsat_game,
    generate_random,
    parse_dimacs,
)
from .serialize import load_game, save_game


def _add_solve(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("solve", help="solve one game file")
    p.add_argument("game", type=Path)
    p.add_argument("--eq", required=True, choices=["tme", "tmecor", "tmecom"])
    p.add_argument("--oracle", default="exact", choices=["exact", "approx"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--restarts", type=int, default=10, help="restarts for --eq tme")
    p.add_argument("--trace", type=Path, default=None, help="per-iteration CSV (tmecor)")


def _add_generate(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("generate", help="write a game file")
    p.add_argument("family", choices=["random", "example1", "example2", "maxsat"])
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--n", type=int, default=3, help="players (random/example1/example2)")
    p.add_argument("--m", type=int, default=2, help="actions per node (example1/example2)")
    p.add_argument("--depth", type=int, default=5)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cnf", type=Path, help="DIMACS file (maxsat)")


def _add_experiment(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("experiment", help="batch-run a config grid")
    p.add_argument("--grid", type=Path, required=True, help="JSON config")
    p.add_argument("--out", type=Path, required=True, help="output directory")


def _add_pou(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("pou", help="all three solvers plus inefficiency indices")
    p.add_argument("game", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument(
        "--renormalize",
        action="store_true",
        help="rescale payoffs to [0,1] from the attained min/max",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="teamgames")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_solve(sub)
    _add_generate(sub)
    _add_experiment(sub)
    _add_pou(sub)
    args = parser.parse_args(argv)

    if args.command == "solve":
        game = load_game(args.game.read_text())
        if args.eq == "tmecor" and args.trace is not None:
            from .tmecor import solve_tmecor

            sol = solve_tmecor(
                game, oracle=args.oracle, seed=args.seed,
                time_limit=args.time_limit, trace_path=args.trace,
            )
            record = {
                "game_id": args.game.stem, "eq": "tmecor", "value": sol.value,
                "support": sol.support_size, "iters": sol.iterations,
                "status": sol.status, "seconds": round(sol.seconds, 3),
            }
        else:
            rec = solve_one(
                game, args.eq, game_id=args.game.stem, seed=args.seed,
                oracle=args.oracle, tme_restarts=args.restarts,
                time_limit=args.time_limit,
            )
            record = {
                "game_id": rec.game_id, "eq": rec.eq, "value": rec.value,
                "support": rec.support, "iters": rec.iters,
                "status": rec.status, "seconds": round(rec.seconds, 3),
            }
        print(json.dumps(record))
        return 0

    if args.command == "generate":
        if args.family == "random":
            game = generate_random(
                RandomGameConfig(
                    num_players=args.n, depth=args.depth, nu=args.nu,
                    branching=args.branching, seed=args.seed,
                )
            )
        elif args.family == "example1":
            game = build_example1(args.n, args.m)
        elif args.family == "example2":
            game = build_example2(args.n, args.m)
        else:
            if args.cnf is None:
                parser.error("maxsat needs --cnf")
            game = build_maxsat_game(parse_dimacs(args.cnf.read_text()))
        args.out.write_text(save_game(game))
        print(f"wrote {args.out}")
        return 0

    if args.command == "experiment":
        config = ExperimentConfig.from_json(args.grid.read_text())
        records = run_experiment(config, str(args.out))
        print(f"{len(records)} records written to {args.out}")
        return 0

    if args.command == "pou":
        game = load_game(args.game.read_text())
        offset, scale = 0.0, 1.0
        leaves = game.payoff[game.leaves]
        if args.renormalize or leaves.min() < 0.0 or leaves.max() > 1.0:
            game, offset, scale = normalize_payoffs(game)
        values = {}
        for eq in ("tmecom", "tmecor", "tme"):
            rec = solve_one(
                game, eq, game_id=args.game.stem, seed=args.seed,
                tme_restarts=args.restarts,
            )
            values[eq] = rec.value
        report = compute_pou(
            values["tmecom"], values["tmecor"], values["tme"], offset=offset, scale=scale
        )
        print(json.dumps(report.as_dict()))
        return 0

    return 1  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
