"""Experiment harness: payoff normalization, inefficiency indices, batch
runs over generated games, CSV and SVG emission.

The three uncorrelation indices compare the team value under a
communication device, a correlation device and no device at all; they
are only meaningful with team payoffs normalized to [0, 1]. Generated
games already live there, so normalization defaults to a no-op and
per-instance rescaling sits behind a flag.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .game import GameTree
from .generators import RandomGameConfig, generate_random
from .serialize import save_game
from .tme import solve_tme_local
from .tmecom import solve_tmecom
from .tmecor import solve_tmecor

ORDER_TOL = 1e-6

CSV_COLUMNS = ["game_id", "n", "d", "nu", "seed", "eq", "value", "support", "iters", "status", "seconds"]


class DegenerateGameError(ValueError):
    """All leaves pay the same; the inefficiency indices are undefined."""


class OrderingViolation(RuntimeError):
    """A solved instance broke v_com >= v_cor >= v_no."""


def normalize_payoffs(game: GameTree) -> tuple[GameTree, float, float]:
    """Affine map of team payoffs onto [0, 1].

    Returns (game', offset, scale) with ``payoff = offset + scale *
    payoff'``. Constant-payoff games have no well-defined scale and are
    rejected.
    """
    leaves = game.leaves
    lo = float(game.payoff[leaves].min())
    hi = float(game.payoff[leaves].max())
    if hi - lo == 0.0:
        raise DegenerateGameError("degenerate: every leaf pays the same, PoU undefined")
    payoff = game.payoff.copy()
    payoff[leaves] = (payoff[leaves] - lo) / (hi - lo)
    scaled = GameTree(
        num_players=game.num_players,
        adversary=game.adversary,
        parent=game.parent,
        parent_action=game.parent_action,
        player=game.player,
        infoset=game.infoset,
        payoff=payoff,
        children=game.children,
        labels=game.labels,
    )
    return scaled, lo, hi - lo


@dataclass
class PoUReport:
    """The three uncorrelation indices and the values behind them."""

    pou_com_no: float
    pou_cor_no: float
    pou_com_cor: float
    v_com: float
    v_cor: float
    v_no: float
    offset: float = 0.0
    scale: float = 1.0
    #: names of indices reported as infinity (zero denominator)
    infinite: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return asdict(self)


def compute_pou(v_com: float, v_cor: float, v_no: float, offset: float = 0.0, scale: float = 1.0) -> PoUReport:
    """Inefficiency ratios of weaker correlation, on normalized values.

    Zero denominators yield infinity with the index flagged rather than
    raising: the ratio is genuinely unbounded there.
    """
    infinite = []

    def ratio(num: float, den: float, name: str) -> float:
        if den <= 0.0:
            infinite.append(name)
            return math.inf
        return num / den

    return PoUReport(
        pou_com_no=ratio(v_com, v_no, "pou_com_no"),
        pou_cor_no=ratio(v_cor, v_no, "pou_cor_no"),
        pou_com_cor=ratio(v_com, v_cor, "pou_com_cor"),
        v_com=v_com,
        v_cor=v_cor,
        v_no=v_no,
        offset=offset,
        scale=scale,
        infinite=tuple(infinite),
    )


@dataclass
class SolutionRecord:
    game_id: str
    n: int
    d: int
    nu: float
    seed: int
    eq: str  # tme | tmecor | tmecom
    value: float
    support: int = 0
    iters: int = 0
    status: str = "optimal"
    seconds: float = 0.0

    def csv_row(self) -> list[str]:
        return [
            self.game_id,
            str(self.n),
            str(self.d),
            repr(float(self.nu)),
            str(self.seed),
            self.eq,
            repr(float(self.value)),
            str(self.support),
            str(self.iters),
            self.status,
            f"{self.seconds:.3f}",
        ]


def solve_one(
    game: GameTree,
    eq: str,
    game_id: str = "game",
    n: int = 0,
    d: int = 0,
    nu: float = 0.0,
    seed: int = 0,
    oracle: str = "exact",
    tme_restarts: int = 10,
    time_limit: float | None = None,
) -> SolutionRecord:
    """Run one solver on one game and wrap the outcome in a record."""
    started = time.perf_counter()
    if eq == "tmecom":
        sol = solve_tmecom(game)
        value, support, iters, status = sol.value, 0, 0, "optimal"
    elif eq == "tmecor":
        cor = solve_tmecor(game, oracle=oracle, seed=seed, time_limit=time_limit)
        value, support, iters = cor.value, cor.support_size, cor.iterations
        status = cor.status if cor.status != "gap" else f"gap({cor.gap:.3g})"
    elif eq == "tme":
        tme = solve_tme_local(game, restarts=tme_restarts, seed=seed, time_limit=time_limit)
        value, support, iters, status = tme.value, 0, tme.restarts, tme.status
    else:
        raise ValueError(f"unknown equilibrium kind {eq!r}")
    return SolutionRecord(
        game_id=game_id,
        n=n,
        d=d,
        nu=nu,
        seed=seed,
        eq=eq,
        value=float(value),
        support=support,
        iters=iters,
        status=status,
        seconds=time.perf_counter() - started,
    )


@dataclass
class ExperimentConfig:
    n: list[int] = field(default_factory=lambda: [3])
    d: list[int] = field(default_factory=lambda: [4])
    nu: list[float] = field(default_factory=lambda: [0.5])
    instances: int = 20
    branching: int = 2
    solvers: list[str] = field(default_factory=lambda: ["tmecom", "tmecor", "tme"])
    oracle: str = "exact"
    tme_restarts: int = 10
    time_limit: float = 300.0
    renormalize: bool = False
    workers: int = 1

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        raw = json.loads(text)
        cfg = cls()
        for key, value in raw.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown experiment option {key!r}")
            setattr(cfg, key, value)
        if not cfg.solvers:
            raise ValueError("empty solver list")
        return cfg


def _run_cell(args) -> list[SolutionRecord]:
    cfg_dict, n, d, nu, seed = args
    cfg = ExperimentConfig(**cfg_dict)
    game = generate_random(
        RandomGameConfig(num_players=n, depth=d, nu=nu, branching=cfg.branching, seed=seed)
    )
    if cfg.renormalize:
        game, _, _ = normalize_payoffs(game)
    game_id = f"n{n}_d{d}_nu{nu}_s{seed}"
    records = []
    for eq in cfg.solvers:
        try:
            records.append(
                solve_one(
                    game,
                    eq,
                    game_id=game_id,
                    n=n,
                    d=d,
                    nu=nu,
                    seed=seed,
                    oracle=cfg.oracle,
                    tme_restarts=cfg.tme_restarts,
                    time_limit=cfg.time_limit,
                )
            )
        except Exception as exc:  # isolate failures to their record
            records.append(
                SolutionRecord(
                    game_id=game_id, n=n, d=d, nu=nu, seed=seed, eq=eq,
                    value=float("nan"), status=f"error({type(exc).__name__})",
                )
            )
    return records


def run_experiment(config: ExperimentConfig, out_dir: str) -> list[SolutionRecord]:
    """Grid of random instances, one record per (instance, solver).

    Emits ``instances.csv``, ``aggregate.csv`` and one SVG per index /
    timing chart. Any instance violating the value ordering
    v_com >= v_cor >= v_no (within tolerance) aborts the run after
    serializing the offending game next to the outputs.
    """
    if not config.solvers:
        raise ValueError("empty solver list")
    os.makedirs(out_dir, exist_ok=True)
    cells = [
        (asdict(config), n, d, nu, seed)
        for n in config.n
        for d in config.d
        for nu in config.nu
        for seed in range(config.instances)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_run_cell, cells))
    else:
        chunks = [_run_cell(cell) for cell in cells]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.n, r.d, r.nu, r.seed, r.eq))

    _check_ordering(records, config, out_dir)
    _write_csv(
        os.path.join(out_dir, "instances.csv"),
        [CSV_COLUMNS] + [r.csv_row() for r in records],
    )
    aggregate = aggregate_records(records)
    _write_csv(os.path.join(out_dir, "aggregate.csv"), aggregate)
    _emit_plots(records, out_dir)
    return records


def _check_ordering(records, config, out_dir):
    by_game: dict[str, dict[str, SolutionRecord]] = {}
    for rec in records:
        by_game.setdefault(rec.game_id, {})[rec.eq] = rec
    for game_id, per_eq in by_game.items():
        values = {eq: rec.value for eq, rec in per_eq.items() if not math.isnan(rec.value)}
        pairs = [("tmecom", "tmecor"), ("tmecom", "tme"), ("tmecor", "tme")]
        for hi, lo in pairs:
            if hi in values and lo in values and values[hi] < values[lo] - ORDER_TOL:
                rec = per_eq[lo]
                game = generate_random(
                    RandomGameConfig(
                        num_players=rec.n, depth=rec.d, nu=rec.nu,
                        branching=config.branching, seed=rec.seed,
                    )
                )
                path = os.path.join(out_dir, f"violation_{game_id}.json")
                with open(path, "w") as fh:
                    fh.write(save_game(game))
                raise OrderingViolation(
                    f"{game_id}: {hi}={values[hi]!r} < {lo}={values[lo]!r}; game saved to {path}"
                )


def _quartiles(values: list[float]) -> tuple[float, float, float, float]:
    if not values:
        return (math.nan,) * 4
    arr = np.array(values)
    return (
        float(arr.mean()),
        float(np.percentile(arr, 25)),
        float(np.percentile(arr, 50)),
        float(np.percentile(arr, 75)),
    )


def aggregate_records(records: list[SolutionRecord]) -> list[list[str]]:
    """Long-format aggregate: one row per (cell, metric) with mean and
    quartiles. PoU metrics get a companion restricted to instances whose
    TME value is certified (not merely local)."""
    rows = [["n", "d", "nu", "metric", "mean", "q1", "median", "q3", "count"]]
    cells: dict[tuple, dict[str, dict[str, SolutionRecord]]] = {}
    for rec in records:
        cells.setdefault((rec.n, rec.d, rec.nu), {}).setdefault(rec.game_id, {})[rec.eq] = rec

    def emit(cell, name, values):
        mean, q1, med, q3 = _quartiles(values)
        rows.append(
            [str(cell[0]), str(cell[1]), repr(float(cell[2])), name]
            + [repr(v) for v in (mean, q1, med, q3)]
            + [str(len(values))]
        )

    for cell in sorted(cells):
        games = cells[cell]
        pous = {"pou_com_no": [], "pou_cor_no": [], "pou_com_cor": []}
        pous_cert = {k: [] for k in pous}
        times: dict[str, list[float]] = {}
        for per_eq in games.values():
            for eq, rec in per_eq.items():
                times.setdefault(eq, []).append(rec.seconds)
            vals = {eq: rec.value for eq, rec in per_eq.items() if not math.isnan(rec.value)}
            if {"tmecom", "tmecor", "tme"} <= set(vals):
                report = compute_pou(vals["tmecom"], vals["tmecor"], vals["tme"])
                for key in pous:
                    value = getattr(report, key)
                    if math.isfinite(value):
                        pous[key].append(value)
                        if per_eq["tme"].status in ("global", "grid"):
                            pous_cert[key].append(value)
        for key, values in pous.items():
            emit(cell, key, values)
        for key, values in pous_cert.items():
            emit(cell, key + "_certified", values)
        for eq in sorted(times):
            emit(cell, f"seconds_{eq}", times[eq])
    return rows


def _write_csv(path: str, rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(buf.getvalue())
    os.replace(tmp, path)


def _emit_plots(records: list[SolutionRecord], out_dir: str) -> None:
    from .svgplot import boxplot_svg, lineplot_svg

    by_game: dict[str, dict[str, SolutionRecord]] = {}
    for rec in records:
        by_game.setdefault(rec.game_id, {})[rec.eq] = rec
    pou_groups: dict[str, dict[str, list[float]]] = {
        "pou_com_no": {}, "pou_cor_no": {}, "pou_com_cor": {},
    }
    time_series: dict[str, dict[int, list[float]]] = {}
    for per_eq in by_game.values():
        vals = {eq: rec.value for eq, rec in per_eq.items() if not math.isnan(rec.value)}
        any_rec = next(iter(per_eq.values()))
        label = f"d={any_rec.d}"
        if {"tmecom", "tmecor", "tme"} <= set(vals):
            report = compute_pou(vals["tmecom"], vals["tmecor"], vals["tme"])
            for key in pou_groups:
                value = getattr(report, key)
                if math.isfinite(value):
                    pou_groups[key].setdefault(label, []).append(value)
        for eq, rec in per_eq.items():
            time_series.setdefault(eq, {}).setdefault(rec.d, []).append(rec.seconds)
    for key, groups in pou_groups.items():
        if groups:
            boxplot_svg(
                groups,
                os.path.join(out_dir, f"{key}.svg"),
                title=key,
                ylabel="index value",
            )
    series = {
        eq: (
            sorted(per_d),
            [float(np.mean(per_d[d])) for d in sorted(per_d)],
        )
        for eq, per_d in time_series.items()
    }
    if series:
        lineplot_svg(
            series,
            os.path.join(out_dir, "compute_time.svg"),
            title="mean compute time",
            xlabel="depth",
            ylabel="seconds",
        )
