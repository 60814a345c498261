"""Training loop, hyperparameter sweep and report writing."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from icnstretch.errors import ConfigError, IcnError
from icnstretch.icn import DEFAULT_CATALOG
from icnstretch.mdp import RewardConfig, StretchEnv
from icnstretch.qlearning import (
    DEFAULT_WINDOW,
    Hyperparams,
    QTable,
    greedy_path,
    has_converged,
    select_action,
    update,
)
from icnstretch.topology import Topology, build_default_topology, load_topology

DEFAULT_GRID = (0.1, 0.5, 0.9)

EPISODE_FIELDS = (
    "alpha", "gamma", "seed", "iteration", "episode_reward",
    "episode_stretch", "greedy_stretch", "converged",
)
SUMMARY_FIELDS = (
    "alpha", "gamma", "seed", "convergence_iteration",
    "final_greedy_stretch", "oracle_stretch",
)
AGGREGATE_FIELDS = (
    "alpha", "gamma", "n_seeds", "fraction_converged",
    "median_convergence", "q25_convergence", "q75_convergence",
)


@dataclass
class ExperimentConfig:
    topology: str = "default"
    consumer: int = 9
    producer: int = 1
    catalog: tuple[str, ...] = DEFAULT_CATALOG
    requested: str = "c1"
    alphas: tuple[float, ...] = DEFAULT_GRID
    gammas: tuple[float, ...] = DEFAULT_GRID
    epsilon: float = 0.5
    episodes: int = 500
    seeds: tuple[int, ...] = tuple(range(50))
    rewards: RewardConfig = field(default_factory=RewardConfig)
    hop_budget: Optional[int] = None
    on_path_caching: bool = False
    num_actions: Optional[int] = None
    window: int = DEFAULT_WINDOW
    out: Optional[str] = None
    format: str = "csv"
    dump_qtable: Optional[str] = None
    jobs: int = 1
    include_timing: bool = False

    def validate(self) -> None:
        if not self.alphas or not self.gammas:
            raise ConfigError("need at least one alpha and one gamma")
        for a in self.alphas:
            if not 0.0 < a <= 1.0:
                raise ConfigError(f"alpha must lie in (0, 1], got {a}")
        for g in self.gammas:
            Hyperparams(1.0, g, self.epsilon)
        if self.episodes < 1:
            raise ConfigError(f"episodes must be >= 1, got {self.episodes}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.window < 1:
            raise ConfigError(f"convergence window must be >= 1, got {self.window}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.requested not in self.catalog:
            raise ConfigError(f"requested content {self.requested!r} not in catalog")
        self.make_env()

    def load_topology(self) -> Topology:
        if self.topology == "default":
            return build_default_topology()
        try:
            text = Path(self.topology).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read topology file {self.topology}: {exc.strerror}") from exc
        try:
            return load_topology(text)
        except IcnError as exc:
            raise ConfigError(f"{self.topology}: {exc}") from exc

    def make_env(self) -> StretchEnv:
        return StretchEnv(
            self.load_topology(),
            consumer=self.consumer,
            producer=self.producer,
            requested=self.requested,
            catalog=self.catalog,
            rewards=self.rewards,
            hop_budget=self.hop_budget,
            on_path_caching=self.on_path_caching,
            num_actions=self.num_actions,
        )

    def keys(self) -> list[tuple[float, float, int]]:
        return sorted((a, g, s) for a in self.alphas for g in self.gammas for s in self.seeds)


@dataclass(frozen=True)
class EpisodeRecord:
    iteration: int
    episode_reward: float
    episode_stretch: int
    greedy_stretch: float  # math.inf when the greedy rollout loops
    converged: bool


@dataclass(frozen=True)
class RunSummary:
    alpha: float
    gamma: float
    seed: int
    convergence_iteration: Optional[int]
    final_greedy_stretch: float
    oracle_stretch: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def key(self) -> tuple[float, float, int]:
        return (self.alpha, self.gamma, self.seed)


@dataclass
class RunResult:
    records: list[EpisodeRecord]
    summary: RunSummary
    qtable: QTable


@dataclass(frozen=True)
class CellAggregate:
    alpha: float
    gamma: float
    n_seeds: int
    fraction_converged: float
    median_convergence: float  # math.inf when fewer than half the seeds converged
    q25_convergence: float
    q75_convergence: float


@dataclass
class SweepResult:
    runs: list[RunResult]
    aggregates: list[CellAggregate]

    @property
    def summaries(self) -> list[RunSummary]:
        return [r.summary for r in self.runs]

    def cell(self, alpha: float, gamma: float) -> CellAggregate:
        for agg in self.aggregates:
            if agg.alpha == alpha and agg.gamma == gamma:
                return agg
        raise KeyError((alpha, gamma))


def run_training(config: ExperimentConfig, alpha: float, gamma: float, seed: int) -> RunResult:
    """Train one agent from scratch and evaluate its greedy policy after every episode."""
    started = time.perf_counter()
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
    env = config.make_env()
    hp = Hyperparams(alpha, gamma, config.epsilon)
    q = QTable.for_env(env)
    rng = random.Random(seed)

    records = []
    history = []
    convergence = None
    oracle = env.oracle_stretch()
    for iteration in range(1, config.episodes + 1):
        s = env.reset()
        total = 0.0
        while not env.is_terminal():
            a = select_action(q, s, hp, rng)
            t = env.step(a)
            update(q, t, hp)
            total += t.reward
            s = t.next_state
        oracle = env.oracle_stretch()
        greedy = greedy_path(q, env).stretch
        history.append(greedy)
        converged = has_converged(history, config.window, oracle)
        if converged and convergence is None:
            convergence = iteration
        records.append(EpisodeRecord(iteration, total, env.hops, greedy, converged))

    summary = RunSummary(
        alpha, gamma, seed, convergence, history[-1], oracle,
        wall_time=time.perf_counter() - started,
    )
    return RunResult(records, summary, q)


def _run_key(args):
    config, key = args
    return run_training(config, *key)


def _quantile(values: Sequence[float], q: float) -> float:
    # nearest-rank, so censored (inf) entries never produce nan
    return float(np.quantile(np.asarray(values, dtype=float), q, method="inverted_cdf"))


def aggregate(summaries: Sequence[RunSummary]) -> list[CellAggregate]:
    cells: dict[tuple[float, float], list[RunSummary]] = {}
    for s in summaries:
        cells.setdefault((s.alpha, s.gamma), []).append(s)
    out = []
    for (alpha, gamma), group in sorted(cells.items()):
        iters = [math.inf if s.convergence_iteration is None else s.convergence_iteration for s in group]
        done = sum(1 for s in group if s.convergence_iteration is not None)
        out.append(CellAggregate(
            alpha, gamma, len(group), done / len(group),
            float(statistics.median(iters)), _quantile(iters, 0.25), _quantile(iters, 0.75),
        ))
    return out


def sweep(config: ExperimentConfig) -> SweepResult:
    """Run every (alpha, gamma, seed) cell; result order never depends on ``jobs``."""
    config.validate()
    keys = config.keys()
    if config.jobs == 1:
        runs = [run_training(config, *k) for k in keys]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            runs = list(pool.map(_run_key, [(config, k) for k in keys], chunksize=max(1, len(keys) // (4 * config.jobs))))
    runs.sort(key=lambda r: r.summary.key)
    return SweepResult(runs, aggregate([r.summary for r in runs]))


def fmt(value) -> str:
    """6 significant digits, ``inf`` for the loop sentinel, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"


def _json_value(value):
    if value is None or isinstance(value, (bool, int)):
        return value
    if math.isinf(value):
        return fmt(value)
    return float(f"{value:.6g}")


def episode_rows(result: SweepResult) -> list[dict]:
    rows = []
    for run in result.runs:
        s = run.summary
        for rec in run.records:
            rows.append({
                "alpha": s.alpha, "gamma": s.gamma, "seed": s.seed,
                "iteration": rec.iteration, "episode_reward": rec.episode_reward,
                "episode_stretch": rec.episode_stretch, "greedy_stretch": rec.greedy_stretch,
                "converged": rec.converged,
            })
    return rows


def summary_rows(result: SweepResult, include_timing: bool = False) -> list[dict]:
    rows = []
    for s in result.summaries:
        row = {name: getattr(s, name) for name in SUMMARY_FIELDS}
        if include_timing:
            row["wall_time"] = s.wall_time
        rows.append(row)
    return rows


def aggregate_rows(result: SweepResult) -> list[dict]:
    return [{name: getattr(a, name) for name in AGGREGATE_FIELDS} for a in result.aggregates]


def _csv_text(fields: Sequence[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt(row[f]) for f in fields])
    return buf.getvalue()


def _json_text(rows: list[dict]) -> str:
    return json.dumps([{k: _json_value(v) for k, v in row.items()} for row in rows], indent=1) + "\n"


def render_reports(result: SweepResult, format: str = "csv", include_timing: bool = False) -> dict[str, str]:
    """File name -> file contents, without touching the disk."""
    tables = {
        "episodes": (EPISODE_FIELDS, episode_rows(result)),
        "summary": (SUMMARY_FIELDS + (("wall_time",) if include_timing else ()), summary_rows(result, include_timing)),
        "aggregates": (AGGREGATE_FIELDS, aggregate_rows(result)),
    }
    if format == "csv":
        return {f"{name}.csv": _csv_text(fields, rows) for name, (fields, rows) in tables.items()}
    if format == "json":
        return {f"{name}.json": _json_text(rows) for name, (_, rows) in tables.items()}
    raise ConfigError(f"format must be csv or json, got {format!r}")


def emit_report(result: SweepResult, format: str, path, include_timing: bool = False) -> list[Path]:
    if not result.runs:
        raise ConfigError("nothing to report")
    out_dir = Path(path)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in render_reports(result, format, include_timing).items():
            target = out_dir / name
            target.write_text(text, encoding="utf-8")
            written.append(target)
    except OSError as exc:
        raise IOError(f"cannot write report to {out_dir}: {exc.strerror}") from exc
    return written


def dump_qtables(result: SweepResult, path) -> list[Path]:
    """One run writes ``path`` itself; several runs get one file each, keyed by alpha/gamma/seed."""
    path = Path(path)
    if len(result.runs) == 1:
        targets = [(path, result.runs[0])]
    else:
        targets = [
            (path.with_name(f"{path.stem}_a{fmt(r.summary.alpha)}_g{fmt(r.summary.gamma)}_s{r.summary.seed}{path.suffix or '.json'}"), r)
            for r in result.runs
        ]
    try:
        for target, run in targets:
            target.parent.mkdir(parents=True, exist_ok=True)
            run.qtable.dump(target)
    except OSError as exc:
        raise IOError(f"cannot write Q-table to {path}: {exc.strerror}") from exc
    return [t for t, _ in targets]
