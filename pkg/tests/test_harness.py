import pytest

from statbench import harness
from statbench.diagnostics import AGGREGATE_METRICS
from statbench.harness import (
    AggregateReport, episode_seed, evaluate, replay, run_episode, scaling_comparison,
)
from statbench.scenario import make_config, preset


def test_coordinated_episode_example():
    log = run_episode(preset("3A-6T-5x3"), "coordinated_greedy", 1)
    assert log.terminal_reason == "ALL_COMPLETED"
    assert log.metrics().total_conflicts == 0
    assert len(log.steps) == log.final["t"]


def test_run_episode_deterministic_and_replayable():
    cfg = preset("5A-12T-10x6")
    a = run_episode(cfg, "random_valid", 42)
    b = run_episode(cfg, "random_valid", 42)
    assert a == b
    r = replay(a)
    assert r.steps == a.steps and r.final == a.final and r.episode_return == a.episode_return


def test_horizon_one_episode():
    log = run_episode(make_config(3, 6, 5, 3, max_horizon=1), "random_valid", 0)
    assert len(log.steps) == 1 and log.terminal_reason == "HORIZON"


def test_zero_completion_return():
    cfg = make_config(3, 6, 5, 3, max_horizon=4)
    log = run_episode(cfg, "greedy_nearest", 0)
    assert log.final["completed_count"] == 0
    assert log.episode_return == -3 * 1.0 * 4


def test_episode_seeds_distinct():
    seeds = {episode_seed(0, s, e) for s in range(5) for e in range(20)}
    assert len(seeds) == 100


def test_evaluate_defaults_and_shape():
    rep = evaluate(preset("3A-6T-5x3"), "coordinated_greedy")
    assert rep.episodes_per_seed == 20 and rep.seed_count == 5
    assert set(rep.metrics) == set(AGGREGATE_METRICS)
    assert all(len(s.per_seed) == 5 for s in rep.metrics.values())
    assert rep.metrics["conflict_rate"].mean == 0.0 and rep.metrics["conflict_rate"].ci95 == 0.0
    assert len(rep.episodes) == 100


def test_evaluate_single_seed_is_degenerate():
    rep = evaluate(preset("3A-6T-5x3"), "random_valid", seeds=[0], episodes_per_seed=1)
    assert rep.degenerate and all(s.ci95 == 0.0 for s in rep.metrics.values())


def test_evaluate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        evaluate(preset("3A-6T-5x3"), "random_valid", episodes_per_seed=0)
    with pytest.raises(ValueError):
        evaluate(preset("3A-6T-5x3"), "random_valid", seeds=[])


def test_evaluate_reproducible_and_worker_independent():
    cfg = preset("3A-6T-5x3")
    a = evaluate(cfg, "random_valid", seeds=range(3), episodes_per_seed=4)
    b = evaluate(cfg, "random_valid", seeds=range(3), episodes_per_seed=4, workers=2)
    assert a.to_dict() == b.to_dict()
    assert AggregateReport.from_dict(a.to_dict()).to_dict() == a.to_dict()


def test_scaling_comparison_identical_reports():
    rep = evaluate(preset("3A-6T-5x3"), "random_valid", seeds=range(3), episodes_per_seed=3)
    row = scaling_comparison(rep, rep, "episode_return")
    assert row.direction == "none" and not row.significant and row.cell == "= ns"
    with pytest.raises(KeyError):
        scaling_comparison(rep, rep, "nope")


def test_benchmark_reports_rate():
    res = harness.benchmark(preset("3A-6T-5x3"), steps=2000)
    assert res["steps"] == 2000 and res["steps_per_second"] > 0
