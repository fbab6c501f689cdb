"""Flattened global observation vector.

Layout (fixed, length ``n * (4 + m) + 3 * m``)::

    for each agent i:  mode one-hot [IDLE, SELECT_TASK, MOVE, EXECUTE_TASK],
                       distance to task 0..m-1 divided by the grid diagonal
    for each task j:   status one-hot [AVAILABLE, ASSIGNED, COMPLETED]
"""
from __future__ import annotations

from ..allocation import distance
from ..world import WorldState


def observation_length(n: int, m: int) -> int:
    return n * (4 + m) + 3 * m


def observe(state: WorldState) -> list[float]:
    cfg = state.cfg
    diag = cfg.diagonal
    tx, ty = state.task_x, state.task_y
    obs: list[float] = []
    for i in range(cfg.n):
        onehot = [0.0, 0.0, 0.0, 0.0]
        onehot[state.modes[i]] = 1.0
        obs.extend(onehot)
        x, y = state.pos_x[i], state.pos_y[i]
        obs.extend(distance(x, y, tx[j], ty[j]) / diag for j in range(cfg.m))
    for z in state.task_status:
        onehot = [0.0, 0.0, 0.0]
        onehot[z] = 1.0
        obs.extend(onehot)
    return obs


def mask_bits(mask: list[bool]) -> str:
    return "".join("1" if b else "0" for b in mask)


def parse_mask_bits(bits: str) -> list[bool]:
    return [c == "1" for c in bits]
