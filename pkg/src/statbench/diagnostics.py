"""Coordination-aware process metrics computed from episode step records.

Per step: ``K_t`` counts task ids selected by two or more agents before
resolution; ``D_t`` counts distinct task ids among the SELECT actions that
survived resolution. Episode metrics normalise these by the horizon ``H``
(number of steps), the task count, the team size or decision activity.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

from .scenario import EnvConfig
from .world import A_SELECT0, StepOutcome


@dataclass
class StepRecord:
    t: int
    actions: list[int]
    selections: list[int]
    final_actions: list[int]
    conflicts: list[tuple[int, list[int], int]]
    forced_idle: list[int]
    decision_active: int
    available: int
    completions: list[int]
    rewards: list[float]
    team_reward: float

    @property
    def forced_idle_count(self) -> int:
        return len(self.forced_idle)

    @property
    def completions_count(self) -> int:
        return len(self.completions)

    @classmethod
    def from_outcome(cls, actions: Sequence[int], outcome: StepOutcome) -> StepRecord:
        return cls(
            t=outcome.t,
            actions=list(actions),
            selections=list(outcome.selections),
            final_actions=list(outcome.final_actions),
            conflicts=[(c.task, list(c.contenders), c.winner) for c in outcome.conflicts],
            forced_idle=list(outcome.forced_idle),
            decision_active=outcome.decision_active,
            available=outcome.available_before,
            completions=list(outcome.completions),
            rewards=list(outcome.rewards),
            team_reward=outcome.team_reward,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["conflicts"] = [[task, list(c), w] for task, c, w in self.conflicts]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> StepRecord:
        d = dict(d)
        d["conflicts"] = [(int(task), list(c), int(w)) for task, c, w in d["conflicts"]]
        return cls(**{f.name: d[f.name] for f in fields(cls)})


@dataclass
class MetricsRecord:
    total_conflicts: int
    conflict_rate: float
    conflicts_per_task: float
    assignment_diversity: float
    per_agent_diversity: float
    throughput: float
    episode_return: float
    horizon: int
    completed: int
    forced_idle_rate: float
    decision_active_fraction: float
    conflicts_per_decision_opportunity: float
    diversity_per_decision_active_agent: float
    # set when there was no decision activity, so the two ratios above defaulted to 0
    no_decision_activity: bool = field(default=False)

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> list:
        return [getattr(self, c) for c in self.columns()]


# numeric fields aggregated by the evaluation harness
AGGREGATE_METRICS = [c for c in MetricsRecord.columns() if c != "no_decision_activity"]


def conflicts_at(selections: Iterable[int]) -> int:
    return sum(1 for c in Counter(selections).values() if c > 1)


def diversity_at(final_actions: Iterable[int]) -> int:
    return len({a - A_SELECT0 for a in final_actions if a >= A_SELECT0})


def episode_metrics(log, cfg: EnvConfig | None = None) -> MetricsRecord:
    """Metrics for one episode.

    ``log`` is an ``EpisodeLog`` or a plain sequence of ``StepRecord``; ``cfg``
    defaults to the log's own config.
    """
    steps = getattr(log, "steps", log)
    if cfg is None:
        cfg = log.cfg
    if not steps:
        raise ValueError("cannot compute metrics of an empty episode log")
    n, m = cfg.n, cfg.m
    horizon = len(steps)
    total_k = 0
    total_d = 0
    forced = 0
    active = 0
    completed = 0
    ret = 0.0
    for rec in steps:
        total_k += conflicts_at(rec.selections)
        total_d += diversity_at(rec.final_actions)
        forced += len(rec.forced_idle)
        active += rec.decision_active
        completed += len(rec.completions)
        ret += rec.team_reward
    mean_active = active / horizon
    opportunities = mean_active * horizon
    return MetricsRecord(
        total_conflicts=total_k,
        conflict_rate=total_k / horizon,
        conflicts_per_task=total_k / m,
        assignment_diversity=total_d / horizon,
        per_agent_diversity=total_d / horizon / n,
        throughput=completed / horizon,
        episode_return=ret,
        horizon=horizon,
        completed=completed,
        forced_idle_rate=forced / horizon,
        decision_active_fraction=active / (n * horizon),
        conflicts_per_decision_opportunity=total_k / opportunities if opportunities else 0.0,
        diversity_per_decision_active_agent=total_d / active if active else 0.0,
        no_decision_activity=active == 0,
    )
