import pytest

from statbench import preset, world
from statbench.policies import random_valid_joint
from statbench.rng import SplitMix64

_ACCEPTANCE: dict[str, tuple[str, str, float]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when not in ("setup", "call"):
        return
    cid, title = marker.args
    if call.excinfo is not None:
        _ACCEPTANCE[cid] = (title, "FAIL", call.duration)
    elif call.when == "call":
        _ACCEPTANCE[cid] = (title, "PASS", call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_ACCEPTANCE, key=lambda c: int(c.lstrip("AC"))):
        title, outcome, dur = _ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid:5s} {outcome}  {title}  ({dur:.2f}s)")


@pytest.fixture
def baseline_cfg():
    return preset("3A-6T-5x3")


def drive(cfg, seed, policy=random_valid_joint, max_steps=None):
    """Yield (state_before, actions, state_after, outcome) until termination."""
    state = world.reset(cfg, seed)
    rng = SplitMix64(seed ^ 0xABCDEF)
    k = 0
    while not state.terminal and (max_steps is None or k < max_steps):
        before = state.copy()
        actions = policy(state, rng)
        _, out = world.step(state, actions)
        yield before, actions, state, out
        k += 1
