"""World state and the synchronized step pipeline.

A step runs, in order: mask check, conflict resolution over SELECT actions,
movement, execution, reward, clock/termination. State lives in flat lists
of plain ints and floats so one step stays in the low microseconds.
"""
from __future__ import annotations

import enum
import operator
from dataclasses import dataclass
from typing import Sequence

from . import allocation
from .allocation import distance
from .errors import EpisodeOverError, InvalidActionError, PlacementError
from .reward import base_reward
from .rng import SplitMix64, derive_seed
from .scenario import EnvConfig


class AgentMode(enum.IntEnum):
    IDLE = 0
    SELECT_TASK = 1
    MOVE = 2
    EXECUTE_TASK = 3


class TaskStatus(enum.IntEnum):
    AVAILABLE = 0
    ASSIGNED = 1
    COMPLETED = 2


class TerminalReason(str, enum.Enum):
    ALL_COMPLETED = "ALL_COMPLETED"
    HORIZON = "HORIZON"


# plain-int aliases for the hot path
IDLE, SELECT, MOVE, EXECUTE = 0, 1, 2, 3
AVAILABLE, ASSIGNED, COMPLETED = 0, 1, 2
A_IDLE, A_MOVE, A_EXECUTE, A_SELECT0 = 0, 1, 2, 3

# absolute slack when deciding that a moving agent has reached its task;
# absorbs rounding so arrival takes exactly ceil(d0 / v) steps
ARRIVAL_EPS = 1e-9

PLACEMENT_STREAM = 0x7A5C


@dataclass(slots=True)
class WorldState:
    cfg: EnvConfig
    t: int
    pos_x: list[float]
    pos_y: list[float]
    modes: list[int]
    assignments: list[int]  # -1 when unassigned
    exec_progress: list[int]
    task_x: list[float]
    task_y: list[float]
    task_status: list[int]
    completed_count: int
    available: list[int]  # ascending ids of AVAILABLE tasks
    terminal_reason: TerminalReason | None = None

    @property
    def positions(self) -> list[tuple[float, float]]:
        return list(zip(self.pos_x, self.pos_y))

    @property
    def task_locations(self) -> list[tuple[float, float]]:
        return list(zip(self.task_x, self.task_y))

    @property
    def terminal(self) -> bool:
        return self.terminal_reason is not None

    def copy(self) -> WorldState:
        return WorldState(
            self.cfg, self.t, self.pos_x[:], self.pos_y[:], self.modes[:],
            self.assignments[:], self.exec_progress[:], self.task_x[:], self.task_y[:],
            self.task_status[:], self.completed_count, self.available[:], self.terminal_reason,
        )

    def snapshot(self) -> tuple:
        """Hashable tuple of every field, for bit-exact comparisons."""
        return (
            self.t, tuple(self.pos_x), tuple(self.pos_y), tuple(self.modes),
            tuple(self.assignments), tuple(self.exec_progress), tuple(self.task_x),
            tuple(self.task_y), tuple(self.task_status), self.completed_count,
            tuple(self.available), self.terminal_reason,
        )


@dataclass(slots=True)
class Conflict:
    task: int
    contenders: tuple[int, ...]
    winner: int


@dataclass(slots=True)
class StepOutcome:
    t: int  # timestep the step was taken at
    rewards: list[float]
    team_reward: float
    conflicts: list[Conflict]
    forced_idle: tuple[int, ...]
    final_actions: list[int]
    completions: list[int]
    terminal: bool
    reason: TerminalReason | None
    # diagnostics inputs
    selections: list[int]  # pre-resolution task ids, agent order
    decision_active: int
    available_before: int


_NO_CONFLICTS: list = []


def place_tasks(cfg: EnvConfig, seed: int) -> list[tuple[int, int]]:
    """Distinct uniformly random integer cells, excluding the origin cell.

    Partial Fisher-Yates over row-major free cells, driven by SplitMix64.
    """
    free = [
        (x, y)
        for y in range(cfg.height)
        for x in range(cfg.width)
        if (x, y) != tuple(cfg.origin)
    ]
    if cfg.m > len(free):
        raise PlacementError(
            f"cannot place {cfg.m} tasks on a {cfg.width}x{cfg.height} grid "
            f"({len(free)} free cells excluding the origin)"
        )
    rng = SplitMix64(derive_seed(seed, PLACEMENT_STREAM))
    for i in range(cfg.m):
        j = i + rng.below(len(free) - i)
        free[i], free[j] = free[j], free[i]
    return free[: cfg.m]


def reset(cfg: EnvConfig, seed: int) -> WorldState:
    cells = place_tasks(cfg, seed)
    ox, oy = float(cfg.origin[0]), float(cfg.origin[1])
    n, m = cfg.n, cfg.m
    return WorldState(
        cfg=cfg,
        t=0,
        pos_x=[ox] * n,
        pos_y=[oy] * n,
        modes=[SELECT] * n,
        assignments=[-1] * n,
        exec_progress=[0] * n,
        task_x=[float(x) for x, _ in cells],
        task_y=[float(y) for _, y in cells],
        task_status=[AVAILABLE] * m,
        completed_count=0,
        available=list(range(m)),
    )


def move_agent(pos: tuple[float, float], target: tuple[float, float], v: float) -> tuple[float, float]:
    """Advance ``pos`` by ``min(v, d)`` along the straight line to ``target``."""
    x, y = pos
    tx, ty = target
    d = distance(x, y, tx, ty)
    if d <= v + ARRIVAL_EPS:
        return (tx, ty)
    return (x + v * (tx - x) / d, y + v * (ty - y) / d)


def is_terminal(state: WorldState) -> TerminalReason | None:
    if state.completed_count == state.cfg.m:
        return TerminalReason.ALL_COMPLETED
    if state.t >= state.cfg.max_horizon:
        return TerminalReason.HORIZON
    return None


def _as_code(agent: int, a) -> int:
    if isinstance(a, bool):
        raise InvalidActionError(agent, a, "action codes must be integers")
    try:
        return operator.index(a)
    except TypeError:
        raise InvalidActionError(agent, a, "action codes must be integers") from None


def step(state: WorldState, actions: Sequence[int]) -> tuple[WorldState, StepOutcome]:
    """Advance ``state`` in place by one timestep and return it with the outcome.

    Raises:
        InvalidActionError: an action outside the agent's mask; ``state`` is untouched.
        EpisodeOverError: the state is already terminal.
    """
    if state.terminal_reason is not None:
        raise EpisodeOverError(f"episode ended ({state.terminal_reason.value}); reset first")
    cfg = state.cfg
    n = cfg.n
    m = cfg.m
    if len(actions) != n:
        raise InvalidActionError(None, actions, f"expected {n} actions, got {len(actions)}")
    modes = state.modes
    status = state.task_status
    available = state.available
    n_avail = len(available)

    # -- mask check ----------------------------------------------------------
    # IDLE agents with tasks available are back at a decision point.
    deciding = 0
    if n_avail:
        for q in modes:
            if q == SELECT or q == IDLE:
                deciding += 1
    may_idle = deciding > n_avail
    selectors: list[int] = []
    selections: list[int] = []
    actions = list(actions)
    for i in range(n):
        a = actions[i]
        if type(a) is not int:
            actions[i] = a = _as_code(i, a)
        q = modes[i]
        if q == MOVE:
            if a != A_MOVE:
                raise InvalidActionError(i, a, "agent is moving; only MOVE is valid")
        elif q == EXECUTE:
            if a != A_EXECUTE:
                raise InvalidActionError(i, a, "agent is executing; only EXECUTE is valid")
        elif n_avail:
            if a >= A_SELECT0:
                j = a - A_SELECT0
                if j >= m or status[j] != AVAILABLE:
                    raise InvalidActionError(i, a, "task is not available")
                selectors.append(i)
                selections.append(j)
            elif not (a == A_IDLE and may_idle):
                raise InvalidActionError(i, a, "agent must select an available task")
        elif a != A_IDLE:
            raise InvalidActionError(i, a, "no task available; only IDLE is valid")

    t = state.t
    final_actions = list(actions)
    assignments = state.assignments
    conflicts = _NO_CONFLICTS
    forced: tuple[int, ...] = ()

    # -- phase 1: selection / conflict resolution -----------------------------
    if n_avail:
        for i in range(n):
            if modes[i] == SELECT or modes[i] == IDLE:
                # decision-active agents leave SELECT this step whatever they chose
                modes[i] = IDLE
    if selectors:
        if len(set(selections)) == len(selections):
            winners = zip(selections, selectors)
        else:
            res = allocation.resolve(
                dict(zip(selectors, selections)),
                list(zip(state.pos_x, state.pos_y)),
                list(zip(state.task_x, state.task_y)),
            )
            winners = sorted(res.winners.items())
            conflicts = [
                Conflict(task, contenders, res.winners[task])
                for task, contenders in res.conflict_events
            ]
            forced = tuple(sorted(res.losers))
            for i in forced:
                final_actions[i] = A_IDLE
        for j, i in winners:
            status[j] = ASSIGNED
            available.remove(j)
            assignments[i] = j
            modes[i] = MOVE

    # -- phase 2: movement ---------------------------------------------------
    pos_x = state.pos_x
    pos_y = state.pos_y
    v = cfg.speed
    reach = v + ARRIVAL_EPS
    completions: list[int] = []
    finishers: list[int] = []
    for i in range(n):
        a = actions[i]
        if a == A_MOVE:
            j = assignments[i]
            x = pos_x[i]
            y = pos_y[i]
            tx = state.task_x[j]
            ty = state.task_y[j]
            d = distance(x, y, tx, ty)
            if d <= reach:
                pos_x[i] = tx
                pos_y[i] = ty
                modes[i] = EXECUTE
                state.exec_progress[i] = cfg.exec_time
            else:
                pos_x[i] = x + v * (tx - x) / d
                pos_y[i] = y + v * (ty - y) / d
        elif a == A_EXECUTE:
            # -- phase 3: execution (movement never touches EXECUTE agents) --
            left = state.exec_progress[i] - 1
            state.exec_progress[i] = left
            if left == 0:
                j = assignments[i]
                status[j] = COMPLETED
                assignments[i] = -1
                completions.append(j)
                finishers.append(i)

    # -- phase 4: rewards ------------------------------------------------------
    params = cfg.reward
    rewards = [-params.lambda_step] * n
    if completions:
        state.completed_count += len(completions)
        bonus = base_reward(t, params) * (1 + params.alpha * state.completed_count)
        next_mode = SELECT if available else IDLE
        for i in finishers:
            rewards[i] = bonus
            modes[i] = next_mode
    team = 0.0
    for r in rewards:
        team += r

    # -- phase 5: clock and termination ----------------------------------------
    state.t = t + 1
    reason = is_terminal(state)
    state.terminal_reason = reason
    return state, StepOutcome(
        t=t,
        rewards=rewards,
        team_reward=team,
        conflicts=conflicts,
        forced_idle=forced,
        final_actions=final_actions,
        completions=completions,
        terminal=reason is not None,
        reason=reason,
        selections=selections,
        decision_active=deciding,
        available_before=n_avail,
    )
