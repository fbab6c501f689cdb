"""Newline-delimited JSON environment server for external learners.

Every request line gets exactly one response line. Requests::

    {"kind": "RESET", "preset": "3A-6T-5x3", "seed": 7}
    {"kind": "RESET", "config": {"n": 3, "m": 6, "width": 5, "height": 3}, "seed": 7}
    {"kind": "STEP", "actions": [3, 5, 8]}
    {"kind": "INFO"}

Responses are ``STATE`` (after RESET), ``OUTCOME`` (after STEP, with the next
``STATE`` nested under ``"state"``), ``INFO`` or ``ERROR``. Errors never end
the session. Each connection owns one environment.
"""
from __future__ import annotations

import json
import logging
import socketserver
import sys
from typing import IO, Any

from .. import world
from ..actionspace import action_masks
from ..diagnostics import conflicts_at, diversity_at
from ..errors import ConfigError, EpisodeOverError, InvalidActionError, PlacementError
from ..policies import POLICIES
from ..scenario import PRESETS, EnvConfig, config_from_dict, config_to_dict, preset
from .observation import mask_bits, observation_length, observe

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
MAX_LINE_BYTES = 1 << 20
# server-side guards so a single RESET cannot exhaust memory
MAX_CELLS = 1_000_000
MAX_AGENTS = 1024
MAX_TASKS = 10_000


def _dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def error(code: str, message: str, **extra: Any) -> dict:
    return {"kind": "ERROR", "version": PROTOCOL_VERSION, "code": code, "message": message, **extra}


class ProtocolError(Exception):
    def __init__(self, code: str, message: str, **extra: Any) -> None:
        super().__init__(message)
        self.payload = error(code, message, **extra)


class Session:
    """One connection's request loop state: parse a line, answer a line."""

    def __init__(self, default_config: EnvConfig | None = None) -> None:
        self.default_config = default_config
        self.state: world.WorldState | None = None
        self.seed: int | None = None

    # -- public ---------------------------------------------------------------

    def handle_line(self, line: str | bytes) -> str:
        try:
            return _dumps(self.handle(self._parse(line)))
        except ProtocolError as exc:
            return _dumps(exc.payload)
        except Exception as exc:  # never let a request kill the session
            log.exception("internal error while handling request")
            return _dumps(error("internal", f"{type(exc).__name__}: {exc}"))

    def handle(self, msg: dict) -> dict:
        kind = msg.get("kind")
        if kind == "RESET":
            return self._reset(msg)
        if kind == "STEP":
            return self._step(msg)
        if kind == "INFO":
            return self._info()
        raise ProtocolError("unknown_kind", f"unknown message kind {kind!r}; expected RESET, STEP or INFO")

    # -- internals ------------------------------------------------------------

    @staticmethod
    def _parse(line: str | bytes) -> dict:
        if isinstance(line, bytes):
            if len(line) > MAX_LINE_BYTES:
                raise ProtocolError("malformed", "line too long")
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError:
                raise ProtocolError("malformed", "request is not valid UTF-8") from None
        try:
            msg = json.loads(line)
        except (ValueError, RecursionError):
            raise ProtocolError("malformed", "request is not valid JSON") from None
        if not isinstance(msg, dict):
            raise ProtocolError("malformed", "request must be a JSON object")
        return msg

    def _config_from(self, msg: dict) -> EnvConfig:
        if "config" in msg:
            values = msg["config"]
            if not isinstance(values, dict):
                raise ProtocolError("bad_config", "config must be an object of flat keys")
            if "preset" in msg:
                values = {"preset": msg["preset"], **values}
            try:
                cfg = config_from_dict(values)
            except (ConfigError, TypeError, ValueError, OverflowError) as exc:
                raise ProtocolError("bad_config", str(exc)) from None
        elif "preset" in msg:
            name = msg["preset"]
            if not isinstance(name, str) or name not in PRESETS:
                raise ProtocolError("bad_config", f"unknown preset {name!r}", presets=list(PRESETS))
            cfg = preset(name)
        elif self.default_config is not None:
            cfg = self.default_config
        else:
            raise ProtocolError("bad_config", "RESET needs a preset or config")
        if cfg.width * cfg.height > MAX_CELLS or cfg.n > MAX_AGENTS or cfg.m > MAX_TASKS:
            raise ProtocolError("bad_config", "configuration exceeds server limits")
        return cfg

    def _reset(self, msg: dict) -> dict:
        seed = msg.get("seed", 0)
        if type(seed) is not int:
            raise ProtocolError("malformed", "seed must be an integer")
        cfg = self._config_from(msg)
        try:
            self.state = world.reset(cfg, seed)
        except PlacementError as exc:
            raise ProtocolError("bad_config", str(exc)) from None
        self.seed = seed
        return self.state_message()

    def _step(self, msg: dict) -> dict:
        if self.state is None:
            raise ProtocolError("wrong_phase", "wrong phase: send RESET before STEP")
        if self.state.terminal:
            raise ProtocolError("wrong_phase", "wrong phase: episode is over; send RESET")
        actions = msg.get("actions")
        if not isinstance(actions, list) or not all(type(a) is int for a in actions):
            raise ProtocolError("malformed", "actions must be a list of integer action codes")
        try:
            _, out = world.step(self.state, actions)
        except InvalidActionError as exc:
            extra = {} if exc.agent is None else {"agent": exc.agent, "action": exc.action}
            raise ProtocolError("invalid_action", str(exc), **extra) from None
        except EpisodeOverError as exc:
            raise ProtocolError("wrong_phase", str(exc)) from None
        return {
            "kind": "OUTCOME",
            "version": PROTOCOL_VERSION,
            "t": out.t,
            "rewards": out.rewards,
            "team_reward": out.team_reward,
            "terminal": out.terminal,
            "reason": out.reason.value if out.reason else None,
            "events": {
                "conflicts": [[c.task, list(c.contenders), c.winner] for c in out.conflicts],
                "conflict_count": conflicts_at(out.selections),
                "forced_idle": list(out.forced_idle),
                "diversity": diversity_at(out.final_actions),
                "decision_active": out.decision_active,
                "completions": out.completions,
                "final_actions": out.final_actions,
            },
            "state": self.state_message(),
        }

    def state_message(self) -> dict:
        s = self.state
        cfg = s.cfg
        return {
            "kind": "STATE",
            "version": PROTOCOL_VERSION,
            "t": s.t,
            "n": cfg.n,
            "m": cfg.m,
            "observation": observe(s),
            "masks": [mask_bits(row) for row in action_masks(s)],
            "terminal": s.terminal,
            "reason": s.terminal_reason.value if s.terminal_reason else None,
            "config": config_to_dict(cfg),
            "seed": self.seed,
        }

    def _info(self) -> dict:
        cfg = self.state.cfg if self.state is not None else self.default_config
        return {
            "kind": "INFO",
            "version": PROTOCOL_VERSION,
            "presets": list(PRESETS),
            "policies": list(POLICIES),
            "action_codes": {"IDLE": 0, "MOVE": 1, "EXECUTE": 2, "SELECT(j)": "3+j"},
            "observation_length": observation_length(cfg.n, cfg.m) if cfg else None,
        }


def serve_stream(instream: IO[bytes], outstream: IO[bytes], default_config: EnvConfig | None = None) -> None:
    session = Session(default_config)
    while True:
        line = instream.readline(MAX_LINE_BYTES + 1)
        if not line:
            return
        if not line.strip():
            continue
        if len(line) > MAX_LINE_BYTES and not line.endswith(b"\n"):
            # drain the rest of an oversized line before answering
            while line and not line.endswith(b"\n"):
                line = instream.readline(MAX_LINE_BYTES)
            reply = _dumps(error("malformed", "line too long"))
        else:
            reply = session.handle_line(line)
        outstream.write(reply.encode("utf-8") + b"\n")
        outstream.flush()


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        serve_stream(self.rfile, self.wfile, self.server.default_config)


class EnvServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], default_config: EnvConfig | None = None) -> None:
        self.default_config = default_config
        super().__init__(address, _Handler)


def serve(default_config: EnvConfig | None = None, transport: str = "stdio",
          host: str = "127.0.0.1", port: int = 5555) -> None:
    """Run the server until EOF (stdio) or interrupt (tcp)."""
    if transport == "stdio":
        serve_stream(sys.stdin.buffer, sys.stdout.buffer, default_config)
    elif transport == "tcp":
        with EnvServer((host, port), default_config) as srv:
            log.info("serving on %s:%d", *srv.server_address[:2])
            srv.serve_forever()
    else:
        raise ValueError(f"unknown transport {transport!r}")
