import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spincavity.config import (
    ConfigError,
    config_from_dict,
    load_config,
    parse_config,
    serialize_config,
)


def test_minimal_echo_gets_defaults():
    cfg = parse_config('{"command": "echo"}')
    assert cfg.seed == 0 and cfg.output is None
    assert cfg.params.n_samples == 100_000 and cfg.params.echo is False


def test_sweep_defaults():
    cfg = config_from_dict({"command": "sweep"})
    assert cfg.params.gamma_ratio == 0.01
    assert len(cfg.params.g_values()) == 300
    assert config_from_dict({"command": "bsa"}).params.mode.kind == "ideal"


def test_toml_input(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('command = "sweep"\nseed = 3\n[params]\ng_norm = [0.5, 1.0]\nks_over_k = [0.0]\n')
    cfg = load_config(path)
    assert cfg.seed == 3 and cfg.params.g_values() == [0.5, 1.0]


@pytest.mark.parametrize("data, key", [
    ({"command": "sweep", "params": {"ks_over_k": [-0.1]}}, "params.ks_over_k.0"),
    ({"command": "sweep", "params": {"window": [1.0, -1.0]}}, "params"),
    ({"command": "echo", "params": {"t2star": 1.0}}, "params.t2star"),
    ({"command": "echo", "params": {"n_samples": "10"}}, "params.n_samples"),
    ({"command": "link", "seed": -1}, "seed"),
    ({"command": "teleport", "params": {"alpha": [1.0, 0.0], "beta": [1.0, 0.0]}}, "params"),
    ({"command": "bsa", "params": {"mode": {"kind": "lossy"}}}, "params.mode"),
    ({"command": "warp"}, "command"),
])
def test_invalid_configs_name_the_key(data, key):
    with pytest.raises(ConfigError) as err:
        config_from_dict(data)
    assert str(err.value).startswith(key)


def test_unparseable_text_and_extension(tmp_path):
    with pytest.raises(ConfigError):
        parse_config("{not json")
    path = tmp_path / "run.yaml"
    path.write_text("command: echo")
    with pytest.raises(ConfigError):
        load_config(path)


configs = st.one_of(
    st.builds(lambda s, n, e: {"command": "echo", "seed": s, "params": {"n_samples": n, "echo": e}},
              st.integers(0, 2 ** 64 - 1), st.integers(1, 10 ** 6), st.booleans()),
    st.builds(lambda p, w, t: {"command": "link", "params": {"p_arrival": p, "window_attempts": w, "t2e": t}},
              st.floats(1e-6, 1.0), st.integers(1, 1000), st.one_of(st.none(), st.floats(1e-3, 1e6))),
    st.builds(lambda g, ks, gr: {"command": "sweep", "params": {"g_norm": g, "ks_over_k": ks, "gamma_ratio": gr}},
              st.lists(st.floats(0, 3), min_size=1, max_size=5), st.lists(st.floats(0, 2), min_size=1, max_size=3),
              st.floats(0, 0.2)),
    st.builds(lambda k, s: {"command": "swap", "params": {"analyzer": 2, "mode": {"kind": "ebs"}, "shots": s}, "seed": k},
              st.integers(0, 100), st.integers(0, 100)),
)


@settings(max_examples=60, deadline=None)
@given(configs)
def test_serialize_round_trip(data):
    cfg = config_from_dict(data)
    again = parse_config(serialize_config(cfg))
    assert again == cfg
    assert json.loads(serialize_config(again)) == json.loads(serialize_config(cfg))
