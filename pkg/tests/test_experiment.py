import json
import math

import pytest

from icnstretch.errors import ConfigError
from icnstretch.experiment import (
    EPISODE_FIELDS,
    ExperimentConfig,
    RunSummary,
    aggregate,
    dump_qtables,
    emit_report,
    fmt,
    render_reports,
    run_training,
    sweep,
)
from icnstretch.mdp import RewardConfig


def small(**kw):
    base = dict(alphas=(0.5,), gammas=(0.5,), seeds=(0, 1), episodes=60)
    base.update(kw)
    return ExperimentConfig(**base)


def test_single_episode():
    result = run_training(small(episodes=1), 0.5, 0.5, 0)
    assert len(result.records) == 1
    assert result.records[0].iteration == 1


def test_default_run_records():
    cfg = ExperimentConfig(episodes=200)
    result = run_training(cfg, 0.5, 0.5, 11)
    iters = [r.iteration for r in result.records]
    assert iters == list(range(1, 201))
    for rec in result.records:
        assert rec.greedy_stretch in set(range(4, 19)) or math.isinf(rec.greedy_stretch)
        assert 1 <= rec.episode_stretch <= 18
    s = result.summary
    assert s.oracle_stretch == 4
    assert s.convergence_iteration is not None and s.convergence_iteration <= 200
    assert all(r.greedy_stretch == 4 for r in result.records[s.convergence_iteration - 25:s.convergence_iteration])
    assert s.final_greedy_stretch == 4


def test_converged_flag_matches_summary():
    result = run_training(small(episodes=120), 0.1, 0.1, 5)
    first = next(r.iteration for r in result.records if r.converged)
    assert first == result.summary.convergence_iteration


def test_runs_are_deterministic():
    cfg = small()
    a = run_training(cfg, 0.9, 0.1, 3)
    b = run_training(cfg, 0.9, 0.1, 3)
    assert a.records == b.records
    assert a.summary == b.summary
    assert a.qtable.to_json_dict() == b.qtable.to_json_dict()


def test_reward_conservation_on_successful_episodes():
    cfg = small(episodes=150)
    r = cfg.rewards
    for rec in run_training(cfg, 0.5, 0.9, 2).records:
        if rec.episode_reward != r.r_fail + r.r_step * (rec.episode_stretch - 1):
            assert rec.episode_reward == r.r_goal + r.r_step * (rec.episode_stretch - 1)


def test_monotone_improvement_on_converged_runs():
    result = sweep(small(episodes=200, seeds=tuple(range(5)), alphas=(0.1, 0.9)))
    for run in result.runs:
        if run.summary.convergence_iteration is None:
            continue
        g = [r.greedy_stretch for r in run.records]
        tenth = len(g) // 10
        assert sum(g[-tenth:]) / tenth <= sum(g[:tenth]) / tenth


def test_sweep_cardinality():
    cfg = small(alphas=(0.1, 0.5, 0.9), gammas=(0.1, 0.5, 0.9), seeds=(0, 1, 2), episodes=5)
    result = sweep(cfg)
    assert len(result.runs) == 27
    assert len(result.aggregates) == 9
    assert [r.summary.key for r in result.runs] == sorted(r.summary.key for r in result.runs)


def test_aggregate_statistics():
    summaries = [RunSummary(0.5, 0.5, s, it, 4, 4) for s, it in enumerate([10, 20, 30, None])]
    (cell,) = aggregate(summaries)
    assert cell.n_seeds == 4
    assert cell.fraction_converged == 0.75
    assert cell.median_convergence == 25
    assert cell.q25_convergence == 10
    assert cell.q75_convergence == 30


def test_aggregate_median_is_inf_when_most_fail():
    summaries = [RunSummary(0.5, 0.5, s, it, math.inf, 4) for s, it in enumerate([10, None, None])]
    (cell,) = aggregate(summaries)
    assert math.isinf(cell.median_convergence)
    assert not math.isnan(cell.q25_convergence) and not math.isnan(cell.q75_convergence)


@pytest.mark.parametrize("kw", [
    dict(alphas=(0.0,)), dict(alphas=(1.2,)), dict(gammas=(1.0,)), dict(epsilon=1.5),
    dict(episodes=0), dict(seeds=()), dict(seeds=(1, 1)), dict(format="xml"),
    dict(producer=12), dict(consumer=1, producer=1), dict(topology="/nonexistent/topo.txt"),
    dict(requested="c9"), dict(jobs=0), dict(window=0),
])
def test_config_errors(kw):
    with pytest.raises(ConfigError):
        sweep(small(**kw))


def test_bad_topology_file(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("n=3\n1 2\n")
    with pytest.raises(ConfigError, match="unreachable"):
        sweep(small(topology=str(f)))


def test_custom_topology_file(tmp_path):
    f = tmp_path / "line.txt"
    f.write_text("n=4\n1 2\n2 3\n3 4\n")
    result = sweep(small(topology=str(f), consumer=4, producer=1, episodes=80))
    assert all(r.summary.oracle_stretch == 3 for r in result.runs)
    assert all(r.summary.final_greedy_stretch == 3 for r in result.runs)


def test_on_path_caching_shrinks_oracle():
    result = run_training(small(on_path_caching=True, episodes=40), 0.5, 0.5, 0)
    # the first successful episode copies c1 back to the consumer's router
    assert result.summary.oracle_stretch == 0
    assert result.records[-1].episode_stretch == 0
    assert result.summary.final_greedy_stretch == 0


def test_fmt():
    assert fmt(math.inf) == "inf"
    assert fmt(0.1) == "0.1"
    assert fmt(1 / 3) == "0.333333"
    assert fmt(97.0) == "97"
    assert fmt(4) == "4"
    assert fmt(True) == "true"
    assert fmt(None) == ""
    assert fmt(123456789.0) == "1.23457e+08"


def test_csv_schema_and_sentinel():
    cfg = small(episodes=3, seeds=(0,), rewards=RewardConfig())
    result = sweep(cfg)
    result.runs[0].records[1] = type(result.runs[0].records[1])(2, -117.0, 18, math.inf, False)
    files = render_reports(result, "csv")
    lines = files["episodes.csv"].splitlines()
    assert lines[0] == ",".join(EPISODE_FIELDS)
    assert lines[0] == "alpha,gamma,seed,iteration,episode_reward,episode_stretch,greedy_stretch,converged"
    assert lines[2] == "0.5,0.5,0,2,-117,18,inf,false"
    assert files["summary.csv"].splitlines()[0] == (
        "alpha,gamma,seed,convergence_iteration,final_greedy_stretch,oracle_stretch"
    )


def test_json_summary(tmp_path):
    result = sweep(small(seeds=(0, 1, 2), episodes=30))
    emit_report(result, "json", tmp_path)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert [(s["alpha"], s["gamma"], s["seed"]) for s in summary] == [(0.5, 0.5, 0), (0.5, 0.5, 1), (0.5, 0.5, 2)]
    assert set(summary[0]) == {"alpha", "gamma", "seed", "convergence_iteration", "final_greedy_stretch", "oracle_stretch"}
    episodes = json.loads((tmp_path / "episodes.json").read_text())
    assert len(episodes) == 90


def test_timing_is_opt_in():
    result = sweep(small(episodes=2))
    assert "wall_time" not in render_reports(result)["summary.csv"]
    assert "wall_time" in render_reports(result, include_timing=True)["summary.csv"].splitlines()[0]


def test_emit_report_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_report(sweep(small(episodes=2)), "csv", blocker / "sub")


def test_dump_qtables(tmp_path):
    one = sweep(small(seeds=(0,), episodes=10))
    (path,) = dump_qtables(one, tmp_path / "q.json")
    assert path == tmp_path / "q.json"
    assert json.loads(path.read_text())["5"][4] is None
    many = sweep(small(seeds=(0, 1), episodes=10))
    paths = dump_qtables(many, tmp_path / "q.json")
    assert [p.name for p in paths] == ["q_a0.5_g0.5_s0.json", "q_a0.5_g0.5_s1.json"]


def test_parallel_matches_serial():
    cfg = small(alphas=(0.1, 0.9), seeds=(0, 1, 2), episodes=40)
    serial = render_reports(sweep(cfg))
    cfg.jobs = 3
    assert render_reports(sweep(cfg)) == serial
