"""Retrospective conflict resolution for simultaneous task selections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import AllocationError


def distance(ax: float, ay: float, bx: float, by: float) -> float:
    """Euclidean distance; the single definition used by the whole package."""
    return math.hypot(bx - ax, by - ay)


@dataclass
class AllocationResult:
    winners: dict[int, int] = field(default_factory=dict)  # task -> agent
    losers: set[int] = field(default_factory=set)
    conflict_events: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)


def resolve(
    selections: Mapping[int, int],
    positions: Sequence[tuple[float, float]],
    task_locations: Sequence[tuple[float, float]],
    available: Sequence[bool] | None = None,
) -> AllocationResult:
    """Resolve one step of ``agent -> task`` selections.

    Each selected task goes to the contender nearest to it; equal distances
    (bitwise-equal doubles) go to the lowest agent index. Every other
    contender of a contested task becomes a loser.

    ``available`` optionally flags which tasks may be selected; a selection of
    an unavailable task raises ``AllocationError``.
    """
    by_task: dict[int, list[int]] = {}
    for agent in sorted(selections):
        task = selections[agent]
        if available is not None and not available[task]:
            raise AllocationError(f"agent {agent} selected unavailable task {task}")
        by_task.setdefault(task, []).append(agent)

    result = AllocationResult()
    for task in sorted(by_task):
        contenders = by_task[task]
        if len(contenders) == 1:
            result.winners[task] = contenders[0]
            continue
        tx, ty = task_locations[task]
        best = contenders[0]
        best_d = distance(*positions[best], tx, ty)
        for agent in contenders[1:]:
            d = distance(*positions[agent], tx, ty)
            # strict < keeps the lower index on ties (contenders are ascending)
            if d < best_d:
                best, best_d = agent, d
        result.winners[task] = best
        result.conflict_events.append((task, tuple(contenders)))
        result.losers.update(a for a in contenders if a != best)
    return result
