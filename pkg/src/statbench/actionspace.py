"""Action codes, state-dependent masks and assignment-space counting.

Codes are absolute: 0 idle, 1 move, 2 execute, ``3 + j`` select task ``j``.
Masks always have length ``3 + m``; unavailable tasks are masked out rather
than removed so a code means the same thing for a whole episode.

Agents at a decision point (SELECT_TASK, or IDLE after a lost conflict while
tasks remain) may select any available task. They may additionally idle only
when more agents are deciding than there are available tasks, i.e. when at
least one of them cannot be served this step anyway.
"""
from __future__ import annotations

from .world import (
    A_EXECUTE, A_IDLE, A_MOVE, A_SELECT0, EXECUTE, IDLE, MOVE, SELECT, WorldState,
)

ACTION_NAMES = ("IDLE", "MOVE", "EXECUTE")


def nominal_action_count(m: int) -> int:
    return 3 + m


def encode_select(task: int) -> int:
    return A_SELECT0 + task


def decode(code: int) -> tuple[str, int | None]:
    """``(kind, task)``: kind is IDLE/MOVE/EXECUTE/SELECT, task set only for SELECT."""
    if code < 0:
        raise ValueError(f"negative action code {code}")
    if code >= A_SELECT0:
        return "SELECT", code - A_SELECT0
    return ACTION_NAMES[code], None


def deciding_agents(state: WorldState) -> list[int]:
    """Agents at a decision point this step (empty when no task is available)."""
    if not state.available:
        return []
    return [i for i, q in enumerate(state.modes) if q == SELECT or q == IDLE]


def valid_codes(state: WorldState, agent: int, _deciding: int | None = None) -> list[int]:
    """Ascending list of valid action codes for ``agent``."""
    q = state.modes[agent]
    if q == MOVE:
        return [A_MOVE]
    if q == EXECUTE:
        return [A_EXECUTE]
    if not state.available:
        return [A_IDLE]
    deciding = len(deciding_agents(state)) if _deciding is None else _deciding
    codes = [A_SELECT0 + j for j in state.available]
    if deciding > len(state.available):
        codes.insert(0, A_IDLE)
    return codes


def valid_actions(state: WorldState, agent: int) -> list[bool]:
    if not 0 <= agent < state.cfg.n:
        raise IndexError(f"agent {agent} out of range for n={state.cfg.n}")
    row = [False] * (3 + state.cfg.m)
    for c in valid_codes(state, agent):
        row[c] = True
    return row


def action_masks(state: WorldState) -> list[list[bool]]:
    return [valid_actions(state, i) for i in range(state.cfg.n)]


def assignment_space_size(selectable_tasks: int, selecting_agents: int) -> int:
    """Exact count ``m_t ** n_t`` of assignment-level joint actions."""
    if selectable_tasks < 0 or selecting_agents < 0:
        raise ValueError("counts must be non-negative")
    return selectable_tasks**selecting_agents


def current_assignment_space(state: WorldState) -> int:
    return assignment_space_size(len(state.available), len(deciding_agents(state)))
