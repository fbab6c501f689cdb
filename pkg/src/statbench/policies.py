"""Scripted baseline policies spanning the coordination spectrum.

* ``random_valid``: uniform over each agent's mask.
* ``greedy_nearest``: every deciding agent grabs its nearest available task
  with no communication, so co-located agents collide.
* ``coordinated_greedy``: a central sequential assignment that never lets two
  agents select the same task, hence zero conflicts by construction.

Joint policies share one signature, ``policy(state, rng) -> list[int]``.
"""
from __future__ import annotations

import enum
from typing import Callable

from .actionspace import valid_codes
from .allocation import distance
from .rng import SplitMix64
from .world import A_EXECUTE, A_IDLE, A_MOVE, A_SELECT0, EXECUTE, IDLE, MOVE, SELECT, WorldState

JointPolicy = Callable[[WorldState, SplitMix64], list]


class PolicyKind(str, enum.Enum):
    RANDOM_VALID = "random_valid"
    GREEDY_NEAREST = "greedy_nearest"
    COORDINATED_GREEDY = "coordinated_greedy"


def random_valid(state: WorldState, agent: int, rng: SplitMix64) -> int:
    codes = valid_codes(state, agent)
    if len(codes) == 1:
        return codes[0]
    return codes[rng.below(len(codes))]


def random_valid_joint(state: WorldState, rng: SplitMix64) -> list[int]:
    """Same distribution as calling ``random_valid`` per agent, without building masks."""
    modes = state.modes
    available = state.available
    k = len(available)
    out = []
    deciding = -1
    for q in modes:
        if q == MOVE:
            out.append(A_MOVE)
        elif q == EXECUTE:
            out.append(A_EXECUTE)
        elif not k:
            out.append(A_IDLE)
        else:
            if deciding < 0:
                deciding = sum(1 for p in modes if p == SELECT or p == IDLE)
            if deciding > k:
                r = rng.below(k + 1)
                out.append(A_IDLE if r == 0 else A_SELECT0 + available[r - 1])
            else:
                out.append(A_SELECT0 + available[rng.below(k)])
    return out


def _nearest(state: WorldState, agent: int, candidates) -> int:
    x, y = state.pos_x[agent], state.pos_y[agent]
    tx, ty = state.task_x, state.task_y
    best = -1
    best_d = 0.0
    for j in candidates:  # ascending ids, so strict < keeps the smallest id on ties
        d = distance(x, y, tx[j], ty[j])
        if best < 0 or d < best_d:
            best, best_d = j, d
    return best


def _forced(state: WorldState, agent: int) -> int | None:
    q = state.modes[agent]
    if q == MOVE:
        return A_MOVE
    if q == EXECUTE:
        return A_EXECUTE
    if not state.available:
        return A_IDLE
    return None


def greedy_nearest(state: WorldState, agent: int) -> int:
    forced = _forced(state, agent)
    if forced is not None:
        return forced
    return A_SELECT0 + _nearest(state, agent, state.available)


def greedy_nearest_joint(state: WorldState, rng: SplitMix64 | None = None) -> list[int]:
    return [greedy_nearest(state, i) for i in range(state.cfg.n)]


def coordinated_greedy(state: WorldState, rng: SplitMix64 | None = None) -> list[int]:
    """Deciding agents, in index order, each claim their nearest unclaimed task."""
    out = []
    unclaimed = list(state.available)
    for i in range(state.cfg.n):
        forced = _forced(state, i)
        if forced is not None:
            out.append(forced)
        elif unclaimed:
            j = _nearest(state, i, unclaimed)
            unclaimed.remove(j)
            out.append(A_SELECT0 + j)
        else:
            out.append(A_IDLE)
    return out


POLICIES: dict[str, JointPolicy] = {
    PolicyKind.RANDOM_VALID.value: random_valid_joint,
    PolicyKind.GREEDY_NEAREST.value: greedy_nearest_joint,
    PolicyKind.COORDINATED_GREEDY.value: coordinated_greedy,
}


def get_policy(name: str | PolicyKind) -> JointPolicy:
    key = name.value if isinstance(name, PolicyKind) else name
    try:
        return POLICIES[key]
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; choose from {', '.join(POLICIES)}") from None
