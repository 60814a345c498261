"""Command-line entry point: ``icnstretch [options]``."""

from __future__ import annotations

import argparse
import sys

from icnstretch.errors import ConfigError, IcnError
from icnstretch.experiment import ExperimentConfig, dump_qtables, emit_report, fmt, sweep
from icnstretch.mdp import RewardConfig


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seeds(text: str) -> tuple[int, ...]:
    """``50`` means seeds 0..49; anything with a comma is an explicit list (``7,`` is the single seed 7)."""
    try:
        if "," in text:
            return tuple(int(x) for x in text.split(",") if x.strip())
        return tuple(range(int(text)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a seed count or comma-separated seeds, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="icnstretch",
        description="Train Q-learning interest forwarders over a router mesh and report convergence to minimum stretch.",
    )
    p.add_argument("--topology", default="default", help="edge-list file, or 'default' for the 3x3 grid")
    p.add_argument("--alpha", type=_float_list, default=(0.1, 0.5, 0.9), help="learning rates, comma separated")
    p.add_argument("--gamma", type=_float_list, default=(0.1, 0.5, 0.9), help="discount factors, comma separated")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--episodes", type=int, default=500)
    p.add_argument("--seeds", type=_seeds, default=tuple(range(50)), help="seed count N (0..N-1) or comma list")
    p.add_argument("--r-step", type=float, default=-1.0)
    p.add_argument("--r-goal", type=float, default=100.0)
    p.add_argument("--r-fail", type=float, default=-100.0)
    p.add_argument("--hop-budget", type=int, default=None, help="default: twice the router count")
    p.add_argument("--actions", type=int, default=None, help="action-space size (default: max(5, largest degree))")
    p.add_argument("--window", type=int, default=25, help="consecutive optimal greedy rollouts that count as converged")
    p.add_argument("--on-path-caching", action="store_true")
    p.add_argument("--consumer", type=int, default=9)
    p.add_argument("--producer", type=int, default=1)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dump-qtable", metavar="PATH", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--include-timing", action="store_true", help="add wall_time to the summary (breaks byte reproducibility)")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        topology=args.topology,
        consumer=args.consumer,
        producer=args.producer,
        alphas=args.alpha,
        gammas=args.gamma,
        epsilon=args.epsilon,
        episodes=args.episodes,
        seeds=args.seeds,
        rewards=RewardConfig(args.r_step, args.r_goal, args.r_fail),
        hop_budget=args.hop_budget,
        on_path_caching=args.on_path_caching,
        num_actions=args.actions,
        window=args.window,
        out=args.out,
        format=args.format,
        dump_qtable=args.dump_qtable,
        jobs=args.jobs,
        include_timing=args.include_timing,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        result = sweep(config)
        written = emit_report(result, config.format, config.out, config.include_timing)
        if config.dump_qtable:
            written += dump_qtables(result, config.dump_qtable)
    except (ConfigError, IcnError) as exc:
        print(f"icnstretch: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"icnstretch: {exc}", file=sys.stderr)
        return 3

    print("alpha  gamma  converged  median  q25  q75")
    for agg in result.aggregates:
        print(f"{fmt(agg.alpha):<6} {fmt(agg.gamma):<6} {agg.fraction_converged:>9.0%}  "
              f"{fmt(agg.median_convergence):>6} {fmt(agg.q25_convergence):>4} {fmt(agg.q75_convergence):>4}")
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
