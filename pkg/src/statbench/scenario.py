"""Environment configurations, the benchmark presets and derived quantities."""
from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Mapping

from .errors import ConfigError, UnknownPresetError

DEFAULT_EXEC_TIME = 3
DEFAULT_SPEED = 1.0
HORIZON_FACTOR = 50


@dataclass(frozen=True)
class RewardParams:
    """Reward parameters: base reward, its decay and interval, completion bonus, step penalty."""

    r0: float = 30.0
    eta: float = 0.5
    beta: int = 10
    alpha: float = 0.1
    lambda_step: float = 1.0

    def __post_init__(self) -> None:
        _check_number("r0", self.r0)
        _check_number("eta", self.eta)
        _check_number("alpha", self.alpha)
        _check_number("lambda_step", self.lambda_step)
        if not self.r0 > 0:
            raise ConfigError("r0", self.r0, "must be > 0")
        if not _is_int(self.beta) or self.beta < 1:
            raise ConfigError("beta", self.beta, "must be an integer >= 1")
        for name in ("eta", "alpha", "lambda_step"):
            if not getattr(self, name) >= 0:
                raise ConfigError(name, getattr(self, name), "must be >= 0")


@dataclass(frozen=True)
class EnvConfig:
    n: int
    m: int
    width: int
    height: int
    exec_time: int
    speed: float
    reward: RewardParams
    max_horizon: int
    origin: tuple[int, int] = (0, 0)
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for key in ("n", "m", "width", "height", "exec_time", "max_horizon"):
            value = getattr(self, key)
            if not _is_int(value) or value < 1:
                raise ConfigError(key, value, "must be an integer >= 1")
        _check_number("speed", self.speed)
        if not self.speed > 0 or math.isinf(self.speed):
            raise ConfigError("speed", self.speed, "must be finite and > 0")
        if not isinstance(self.reward, RewardParams):
            raise ConfigError("reward", self.reward, "must be RewardParams")
        ox, oy = self.origin
        if not (_is_int(ox) and _is_int(oy)) or not (0 <= ox < self.width and 0 <= oy < self.height):
            raise ConfigError("origin", self.origin, "must be an integer cell inside the grid")

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def label(self) -> str:
        return self.name or f"{self.n}A-{self.m}T-{self.width}x{self.height}"


@dataclass(frozen=True)
class DerivedStats:
    task_density: float
    tasks_per_agent: float
    choices_per_agent: int
    joint_actions: int


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_number(name: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or math.isnan(value):
        raise ConfigError(name, value, "must be a number")


def default_horizon(m: int, width: int, height: int, speed: float) -> int:
    """Step cap large enough that the coordinated baseline always finishes."""
    return HORIZON_FACTOR * m * math.ceil((width + height) / speed)


def make_config(
    n: int,
    m: int,
    width: int,
    height: int,
    exec_time: int = DEFAULT_EXEC_TIME,
    speed: float = DEFAULT_SPEED,
    reward: RewardParams | None = None,
    max_horizon: int | None = None,
    origin: tuple[int, int] = (0, 0),
    name: str | None = None,
) -> EnvConfig:
    """Build a validated configuration, filling in default reward and horizon.

    Raises:
        ConfigError: naming the first offending field.
    """
    if reward is None:
        reward = RewardParams()
    if max_horizon is None:
        # validate the inputs the horizon formula depends on before using them
        for key, value in (("m", m), ("width", width), ("height", height)):
            if not _is_int(value) or value < 1:
                raise ConfigError(key, value, "must be an integer >= 1")
        _check_number("speed", speed)
        if not speed > 0 or math.isinf(speed):
            raise ConfigError("speed", speed, "must be finite and > 0")
        max_horizon = default_horizon(m, width, height, speed)
    return EnvConfig(
        n=n,
        m=m,
        width=width,
        height=height,
        exec_time=exec_time,
        speed=speed,
        reward=reward,
        max_horizon=max_horizon,
        origin=tuple(origin),
        name=name,
    )


# (agents, tasks, width, height, regime)
_PRESET_ROWS = [
    (3, 6, 5, 3, "baseline"),
    (3, 6, 10, 6, "baseline"),
    (3, 12, 10, 6, "baseline"),
    (5, 12, 10, 6, "baseline"),
    (5, 25, 25, 15, "extreme"),
    (5, 25, 50, 30, "extreme"),
    (5, 50, 50, 30, "extreme"),
    (5, 100, 50, 30, "extreme"),
    (9, 25, 50, 30, "extreme"),
]

PRESETS: dict[str, tuple[int, int, int, int]] = {
    f"{n}A-{m}T-{w}x{h}": (n, m, w, h) for n, m, w, h, _ in _PRESET_ROWS
}
REGIMES: dict[str, str] = {f"{n}A-{m}T-{w}x{h}": r for n, m, w, h, r in _PRESET_ROWS}
BASELINE_PRESETS = [k for k, r in REGIMES.items() if r == "baseline"]


def preset(name: str) -> EnvConfig:
    try:
        n, m, w, h = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(name, list(PRESETS)) from None
    return make_config(n, m, w, h, name=name)


def derived_quantities(cfg: EnvConfig) -> DerivedStats:
    return DerivedStats(
        task_density=cfg.m / (cfg.width * cfg.height),
        tasks_per_agent=cfg.m / cfg.n,
        choices_per_agent=cfg.m,
        joint_actions=cfg.m**cfg.n,
    )


# -- flat key/value representation -------------------------------------------------

_INT_KEYS = ("n", "m", "width", "height", "exec_time", "max_horizon", "beta")
_FLOAT_KEYS = ("speed", "r0", "eta", "alpha", "lambda_step")
_REWARD_KEYS = ("r0", "eta", "beta", "alpha", "lambda_step")
CONFIG_KEYS = ("preset",) + _INT_KEYS + _FLOAT_KEYS + ("origin",)


def config_to_dict(cfg: EnvConfig) -> dict[str, Any]:
    """Flat JSON-friendly mapping; ``config_from_dict`` inverts it exactly."""
    d = asdict(cfg)
    reward = d.pop("reward")
    d.update(reward)
    d["origin"] = list(cfg.origin)
    if d.get("name") is None:
        d.pop("name", None)
    return d


def config_from_dict(values: Mapping[str, Any]) -> EnvConfig:
    """Build a config from flat keys, optionally layered on top of a ``preset``.

    The horizon is recomputed from the final geometry unless given explicitly.
    """
    values = dict(values)
    unknown = set(values) - set(CONFIG_KEYS) - {"name"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], values[sorted(unknown)[0]], "unknown config key")
    base: dict[str, Any] = {}
    name = values.pop("name", None)
    if "preset" in values:
        pname = values.pop("preset")
        cfg = preset(pname)
        base = config_to_dict(cfg)
        base.pop("max_horizon")
        base.pop("name", None)
        if not any(k in values for k in ("n", "m", "width", "height")):
            name = name or pname
    base.update(values)
    for key in ("n", "m", "width", "height"):
        if key not in base:
            raise ConfigError(key, None, "is required")
    reward = RewardParams(**{k: base[k] for k in _REWARD_KEYS if k in base})
    origin = base.get("origin", (0, 0))
    if isinstance(origin, str):
        origin = _parse_origin(origin)
    kwargs = {k: base[k] for k in ("exec_time", "speed", "max_horizon") if k in base}
    return make_config(
        base["n"], base["m"], base["width"], base["height"],
        reward=reward, origin=tuple(origin), name=name, **kwargs,
    )


def _parse_origin(text: str) -> tuple[int, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError("origin", text, "expected 'x,y'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError("origin", text, "expected integer 'x,y'") from None


def parse_config_text(text: str) -> EnvConfig:
    """Parse the flat ``key = value`` config format (``#`` starts a comment)."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("line %d" % lineno, raw, "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(key, value, "given twice")
        if key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(key, value, "must be an integer") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(key, value, "must be a number") from None
        elif key in ("preset", "origin", "name"):
            values[key] = value
        else:
            raise ConfigError(key, value, "unknown config key")
    return config_from_dict(values)


def format_config_text(cfg: EnvConfig) -> str:
    d = config_to_dict(cfg)
    lines = []
    for key in ("n", "m", "width", "height", "exec_time", "speed", "max_horizon") + _REWARD_KEYS:
        lines.append(f"{key} = {d[key]!r}")
    lines.append("origin = %d,%d" % cfg.origin)
    return "\n".join(lines) + "\n"


def load_config(source: str | os.PathLike) -> EnvConfig:
    """Resolve a preset name or a path to a config file."""
    source = os.fspath(source)
    if source in PRESETS:
        return preset(source)
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    raise UnknownPresetError(source, list(PRESETS))


def with_overrides(cfg: EnvConfig, **changes: Any) -> EnvConfig:
    return replace(cfg, **changes)
