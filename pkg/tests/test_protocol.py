import json
import random
import socket
import threading

import pytest

from statbench.harness import run_episode
from statbench.interfaces.observation import observation_length, observe, parse_mask_bits
from statbench.interfaces.protocol import PROTOCOL_VERSION, EnvServer, Session
from statbench.actionspace import action_masks
from statbench.policies import coordinated_greedy
from statbench.scenario import PRESETS, preset
from statbench import world

KINDS = {"STATE", "OUTCOME", "ERROR", "INFO"}


def ask(session, obj):
    line = obj if isinstance(obj, (str, bytes)) else json.dumps(obj)
    return json.loads(session.handle_line(line))


@pytest.mark.parametrize("name", list(PRESETS))
def test_observation_length_and_range(name):
    s = world.reset(preset(name), 0)
    obs = observe(s)
    assert len(obs) == observation_length(s.cfg.n, s.cfg.m)
    assert all(0.0 <= x <= 1.0 for x in obs)


def test_reset_returns_state():
    msg = ask(Session(), {"kind": "RESET", "preset": "3A-6T-5x3", "seed": 7})
    assert msg["kind"] == "STATE" and msg["version"] == PROTOCOL_VERSION
    assert len(msg["observation"]) == 48
    assert msg["masks"] == ["000111111"] * 3


def test_step_before_reset_is_wrong_phase():
    msg = ask(Session(), {"kind": "STEP", "actions": [3, 4, 5]})
    assert msg["kind"] == "ERROR" and msg["code"] == "wrong_phase" and "wrong phase" in msg["message"]


def test_masked_action_names_agent():
    s = Session()
    ask(s, {"kind": "RESET", "preset": "3A-6T-5x3", "seed": 7})
    msg = ask(s, {"kind": "STEP", "actions": [3, 4, 1]})
    assert msg["code"] == "invalid_action" and msg["agent"] == 2 and "agent 2" in msg["message"]
    # the session survives and accepts a valid step afterwards
    assert ask(s, {"kind": "STEP", "actions": [3, 4, 5]})["kind"] == "OUTCOME"


@pytest.mark.parametrize("line,code", [
    ("not json", "malformed"),
    ("[1,2]", "malformed"),
    ('{"kind":"DANCE"}', "unknown_kind"),
    ('{"kind":"RESET","preset":"nope"}', "bad_config"),
    ('{"kind":"RESET"}', "bad_config"),
    ('{"kind":"RESET","seed":"x","preset":"3A-6T-5x3"}', "malformed"),
    ('{"kind":"RESET","config":{"n":1,"m":99,"width":3,"height":3}}', "bad_config"),
    ('{"kind":"RESET","config":{"n":1,"m":1,"width":100000,"height":100000}}', "bad_config"),
    ('{"kind":"RESET","config":{"n":-1}}', "bad_config"),
    (b"\xff\xfe", "malformed"),
])
def test_error_codes(line, code):
    msg = ask(Session(), line)
    assert msg["kind"] == "ERROR" and msg["code"] == code


def test_episode_over_requires_reset():
    s = Session()
    ask(s, {"kind": "RESET", "config": {"n": 1, "m": 1, "width": 3, "height": 3, "max_horizon": 1}})
    out = ask(s, {"kind": "STEP", "actions": [3]})
    assert out["terminal"] and out["reason"] == "HORIZON" and out["state"]["terminal"]
    assert ask(s, {"kind": "STEP", "actions": [1]})["code"] == "wrong_phase"


def test_info():
    msg = ask(Session(preset("3A-6T-5x3")), {"kind": "INFO"})
    assert msg["kind"] == "INFO" and msg["observation_length"] == 48


def _fuzz_lines(rng, count):
    pieces = ['{"kind":"RESET","preset":"3A-6T-5x3","seed":1}', '{"kind":"STEP","actions":[3,4,5]}',
              '{"kind":"STEP","actions":[1,1,1]}', '{"kind":"INFO"}', '{"kind":', '{"kind":"STEP","actions":"x"}',
              '{"kind":"STEP","actions":[99999999999999999999]}', '{"kind":"RESET","config":{"n":2.5}}',
              '{"kind":"RESET","config":{"speed":"fast"}}', "[[[[[[[[", "null", '{"kind":null}']
    for _ in range(count):
        r = rng.random()
        if r < 0.3:
            yield bytes(rng.randrange(256) for _ in range(rng.randrange(40)))
        elif r < 0.7:
            yield rng.choice(pieces)
        else:
            base = bytearray(rng.choice(pieces).encode())
            for _ in range(rng.randrange(1, 4)):
                if base:
                    base[rng.randrange(len(base))] = rng.randrange(256)
            yield bytes(base)


def test_fuzz_sample_never_crashes():
    s = Session()
    for line in _fuzz_lines(random.Random(5), 1500):
        msg = json.loads(s.handle_line(line))
        assert msg["kind"] in KINDS and msg["version"] == PROTOCOL_VERSION
        if msg["kind"] == "ERROR":
            assert msg["code"] != "internal", msg


def remote_episode(port, name, seed):
    with socket.create_connection(("127.0.0.1", port), timeout=10) as sock:
        f = sock.makefile("rwb")

        def rpc(obj):
            f.write(json.dumps(obj).encode() + b"\n")
            f.flush()
            return json.loads(f.readline())

        msg = rpc({"kind": "RESET", "preset": name, "seed": seed})
        mirror = world.reset(preset(name), seed)
        total = 0.0
        while not msg["terminal"]:
            assert [parse_mask_bits(b) for b in msg["masks"]] == action_masks(mirror)
            actions = coordinated_greedy(mirror)
            world.step(mirror, actions)
            out = rpc({"kind": "STEP", "actions": actions})
            assert out["kind"] == "OUTCOME"
            total += out["team_reward"]
            msg = out["state"]
        return total


@pytest.fixture
def server():
    srv = EnvServer(("127.0.0.1", 0))
    th = threading.Thread(target=srv.serve_forever, daemon=True)
    th.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def test_tcp_episode_matches_in_process(server):
    port = server.server_address[1]
    total = remote_episode(port, "3A-6T-5x3", 11)
    assert total == run_episode(preset("3A-6T-5x3"), "coordinated_greedy", 11).episode_return
