import pytest
from hypothesis import given, settings, strategies as st

from statbench.diagnostics import (
    AGGREGATE_METRICS, MetricsRecord, StepRecord, conflicts_at, diversity_at, episode_metrics,
)
from statbench.harness import run_episode
from statbench.scenario import make_config, preset

from .oracles import recount


def test_conflicts_at_counts_contested_tasks():
    # agents 0,1 on task 2; agents 2,3 on task 5; agent 4 on task 7
    assert conflicts_at([5, 5, 8, 8, 10]) == 2
    assert conflicts_at([3, 4, 5]) == 0
    assert conflicts_at([]) == 0


def test_diversity_at_counts_distinct_surviving_selections():
    assert diversity_at([5, 0, 8, 0, 10]) == 3
    assert diversity_at([1, 2, 0]) == 0


def _rec(t, selections, final, decision_active=3, available=6, completions=()):
    return StepRecord(t=t, actions=list(final), selections=list(selections), final_actions=list(final),
                      conflicts=[], forced_idle=[], decision_active=decision_active, available=available,
                      completions=list(completions), rewards=[-0.1], team_reward=-0.1)


def test_three_step_example():
    cfg = make_config(3, 6, 5, 3)
    steps = [_rec(0, [3, 3, 4], [3, 0, 4]), _rec(1, [], [1, 1, 1]), _rec(2, [5, 5], [5, 0, 1])]
    rec = episode_metrics(steps, cfg)
    assert rec.total_conflicts == 2
    assert rec.conflict_rate == pytest.approx(2 / 3, abs=1e-3)
    assert rec.conflicts_per_task == pytest.approx(1 / 3, abs=1e-3)
    assert rec.assignment_diversity == 1.0
    assert rec.per_agent_diversity == pytest.approx(1 / 3)


def test_no_decision_activity_flag_and_zero_ratios():
    cfg = make_config(2, 2, 4, 4)
    steps = [_rec(t, [], [2, 2], decision_active=0) for t in range(4)]
    rec = episode_metrics(steps, cfg)
    assert rec.no_decision_activity
    assert rec.conflicts_per_decision_opportunity == 0.0
    assert rec.diversity_per_decision_active_agent == 0.0


def test_empty_log_rejected():
    with pytest.raises(ValueError):
        episode_metrics([], make_config(1, 1, 3, 3))


def test_columns_order_and_aggregate_set():
    cols = MetricsRecord.columns()
    assert cols[:6] == ["total_conflicts", "conflict_rate", "conflicts_per_task", "assignment_diversity",
                        "per_agent_diversity", "throughput"]
    assert "no_decision_activity" not in AGGREGATE_METRICS


def test_step_record_dict_round_trip():
    log = run_episode(preset("3A-6T-5x3"), "greedy_nearest", 0)
    for rec in log.steps:
        assert StepRecord.from_dict(rec.to_dict()) == rec


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["3A-6T-5x3", "5A-12T-10x6", "3A-6T-10x6"]),
       st.sampled_from(["random_valid", "greedy_nearest", "coordinated_greedy"]),
       st.integers(0, 2**40))
def test_metrics_match_bruteforce_and_invariants(name, policy, seed):
    cfg = preset(name)
    log = run_episode(cfg, policy, seed)
    rec = episode_metrics(log)
    want = recount([r.to_dict() for r in log.steps], cfg.n, cfg.m)
    for key, value in want.items():
        assert getattr(rec, key) == value, key
    for r in log.steps:
        d = diversity_at(r.final_actions)
        assert d <= min(r.decision_active, r.available)
        assert len(r.forced_idle) == sum(len(c) - 1 for _, c, _ in r.conflicts)
        assert len(r.conflicts) == conflicts_at(r.selections)
    assert rec.throughput * rec.horizon == pytest.approx(rec.completed)
    assert rec.completed == log.final["completed_count"]
    assert 0.0 <= rec.per_agent_diversity <= 1.0
    assert 0.0 <= rec.decision_active_fraction <= 1.0
