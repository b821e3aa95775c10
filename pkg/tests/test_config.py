import json

import pytest
from hypothesis import given, settings, strategies as st

from cavitygates.config import RunConfig, load_config, parse_config
from cavitygates.errors import ConfigurationError

FIG4 = {"gate": "fredkin", "couplings": {"g": 1.0}, "detunings": {"Delta": 20.0, "Delta3": "auto", "Delta6": "auto"}}


def test_shorthands_and_auto():
    params = RunConfig.model_validate(FIG4).params()
    assert params["g_fa"] == 1.0 and params["Delta5"] == 20.0
    assert params["Delta3"] == pytest.approx(0.05) and params["Delta6"] == pytest.approx(0.05)
    # free detunings default to auto when omitted
    implicit = RunConfig.model_validate({"gate": "fredkin", "detunings": {"Delta": 20.0}}).params()
    assert implicit == params


def test_explicit_values_win():
    cfg = RunConfig.model_validate({**FIG4, "detunings": {"Delta": 20.0, "Delta1": 15.0, "Delta3": 0.1, "Delta6": 0.2}})
    p = cfg.params()
    assert (p["Delta1"], p["Delta2"], p["Delta3"], p["Delta6"]) == (15.0, 20.0, 0.1, 0.2)


def test_xrot_drive_defaults_to_twice_g():
    p = RunConfig.model_validate({"gate": "xrot", "couplings": {"g": 0.5}, "detunings": {"Delta": 25.0}}).params()
    assert p["omega"] == 1.0 and p["Delta3"] == pytest.approx(-0.01)


def test_slow_fredkin_uses_crossing():
    from cavitygates.effective import solve_resonance

    p = RunConfig.model_validate({"gate": "fredkin2", "detunings": {"Delta": 20.0}}).params()
    assert p == solve_resonance("fredkin-slow", p, polish="spectral").params
    assert p["Delta6"] != 0.05


def test_overrides():
    cfg = RunConfig.model_validate(FIG4)
    assert cfg.params(Delta=10.0)["Delta3"] == pytest.approx(0.1)
    assert cfg.params(g=2.0)["g_ab"] == 2.0


@pytest.mark.parametrize(
    "data, fragment",
    [
        ({"gate": "toffoli"}, "gate"),
        ({**FIG4, "detuning": {}}, "detuning"),
        ({**FIG4, "detunings": {"Dleta3": 1.0}}, "Dleta3"),
        ({**FIG4, "couplings": {"g_xy": 1.0}}, "g_xy"),
        ({**FIG4, "detunings": {"Delta": 20.0, "Delta1": "auto"}}, "auto"),
        ({**FIG4, "sweep": {"parameter": "Delta", "from": 5, "to": 40, "points": 1}}, "points"),
        ({**FIG4, "sweep": {"parameter": "Delta9", "from": 5, "to": 40, "points": 4}}, "Delta9"),
        ({**FIG4, "sweep": {"parameter": "Delta", "from": -5, "to": 40, "points": 4, "scale": "log"}}, "positive"),
        ({**FIG4, "phase_mode": "loose"}, "phase_mode"),
        ({**FIG4, "input": [1, 2, 0]}, "bits"),
        ({**FIG4, "g_hz": -1}, "g_hz"),
    ],
)
def test_schema_errors(data, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config(json.dumps(data))


def test_partial_auto_rejected():
    cfg = RunConfig.model_validate({**FIG4, "detunings": {"Delta": 20.0, "Delta3": "auto", "Delta6": 0.05}})
    with pytest.raises(ConfigurationError, match="auto"):
        cfg.params()


def test_missing_values():
    with pytest.raises(ConfigurationError, match="Delta1"):
        RunConfig.model_validate({"gate": "iswap"}).params()
    with pytest.raises(ConfigurationError, match="g_bc"):
        RunConfig.model_validate({"gate": "iswap", "couplings": {"g_ab": 1.0}, "detunings": {"Delta": 9.0}}).params()


def test_json_error_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"gate": "iswap",\n  "measure": tru}\n')
    with pytest.raises(ConfigurationError, match=r"bad.json:2:14"):
        load_config(path)
    with pytest.raises(ConfigurationError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    with pytest.raises(ConfigurationError, match="object"):
        parse_config("[1, 2]")


def test_sweep_grids():
    cfg = RunConfig.model_validate({**FIG4, "sweep": {"parameter": "Delta", "from": 5, "to": 40, "points": 4, "scale": "log"},
                                    "time_grid": {"t_max": 10, "points": 3}})
    assert cfg.sweep.values() == pytest.approx([5, 10, 20, 40])
    assert cfg.time_grid.values().tolist() == [0, 5, 10]


@settings(max_examples=40, deadline=None)
@given(
    gate=st.sampled_from(["iswap", "fredkin", "fredkin-slow", "xrot", "zrot"]),
    delta=st.floats(1, 100),
    measure=st.booleans(),
    phase=st.sampled_from(["population", "strict"]),
    theta=st.none() | st.floats(-7, 7),
    sweep=st.booleans(),
)
def test_dump_round_trip(gate, delta, measure, phase, theta, sweep):
    data = {"gate": gate, "couplings": {"g": 1.0}, "detunings": {"Delta": delta}, "measure": measure,
            "phase_mode": phase, "theta": theta}
    if sweep:
        data["sweep"] = {"parameter": "Delta", "from": 2.0, "to": delta + 3, "points": 5}
    cfg = RunConfig.model_validate(data)
    again = parse_config(cfg.dump())
    assert again == cfg
    assert again.dump() == cfg.dump()
