"""Per-agent and team rewards.

Every agent pays ``lambda_step`` per step unless it completes a task that
step; a completion pays the time-decayed base reward scaled by a bonus on
the number of tasks completed so far (this step's completions included).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .scenario import RewardParams


class RewardKind(enum.Enum):
    STEP = "step"
    COMPLETION = "completion"


@dataclass(frozen=True)
class RewardEvent:
    kind: RewardKind
    t: int
    completed_total: int = 0


def base_reward(t: int, params: RewardParams) -> float:
    # no clamping: the base reward is allowed to go negative at very late steps
    return params.r0 - params.eta * (t // params.beta)


def completion_reward(t: int, completed_total: int, params: RewardParams) -> float:
    return base_reward(t, params) * (1 + params.alpha * completed_total)


def agent_reward(event: RewardEvent, params: RewardParams) -> float:
    if event.kind is RewardKind.COMPLETION:
        return completion_reward(event.t, event.completed_total, params)
    return -params.lambda_step


def team_reward(rewards: Iterable[float]) -> float:
    """Left-to-right sum, so results do not depend on ``sum``'s float algorithm."""
    total = 0.0
    for r in rewards:
        total += r
    return total
