"""Command-line interface: output shapes, config merging, exit codes."""

import json

import numpy as np
from click.testing import CliRunner

from vnqca.cli import main


def _run(args, **kw):
    return CliRunner().invoke(main, args, **kw)


def test_simulate_json_fields():
    res = _run(["simulate", "--s", "2", "--kind", "cphase",
                "--phi", "3.14,1.0", "--theta", "0,1.57,0",
                "--t", "2", "--delta", "1.0,2.0,0"])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["cone_sites"] == 13
    assert 0.0 <= payload["entropy"] <= 1.0
    assert "fingerprint" in payload


def test_simulate_cap_exit_code():
    res = _run(["simulate", "--s", "2", "--kind", "cphase",
                "--phi", "1,1", "--t", "4"])
    assert res.exit_code == 3


def test_bad_flags_exit_code():
    res = _run(["simulate", "--s", "2", "--kind", "cphase", "--phi", "1.0"])
    assert res.exit_code == 2
    res = _run(["index", "--s", "1", "--kind", "shift", "--shift", "1,0"])
    assert res.exit_code == 2


def test_index_output():
    res = _run(["index", "--s", "1", "--kind", "shift", "--shift", "-1"])
    assert res.exit_code == 0
    assert res.output.strip() == "2/1"
    res = _run(["index", "--s", "2", "--kind", "cphase", "--phi", "1,2",
                "--theta", "0.1,0.2,0.3"])
    assert res.output.strip() == "1/1,1/1"


def test_classify_json():
    res = _run(["classify", "--s", "1", "--kind", "cphase",
                "--phi", str(np.pi), "--theta", "0.3,0.8,0.1"])
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["case"] == "CASE_II"
    assert payload["dims"] == {"-1": 2, "1": 2}
    assert payload["index"] == "1/1"


def test_verify_ok():
    res = _run(["verify", "--s", "2", "--kind", "cphase", "--phi", "1.0,2.0",
                "--theta", "0.5,0.6,0.7"])
    assert res.exit_code == 0
    assert json.loads(res.output)["ok"] is True


def test_cone_sites():
    res = _run(["cone", "--s", "2", "--t", "2", "--sites"])
    payload = json.loads(res.output)
    assert payload["cone_sites"] == 13
    assert len(payload["sites"]) == 13
    assert [0, 0] in payload["sites"]


def test_emit_circuit(tmp_path):
    out = str(tmp_path / "circ.json")
    res = _run(["emit-circuit", "--s", "1", "--kind", "cphase",
                "--phi", "1.0", "--theta", "0,1,0", "--extent", "4",
                "--out", out])
    assert res.exit_code == 0, res.output
    payload = json.loads(open(out).read())
    assert payload["layers"]
    assert payload["depth"] >= 1


def test_sweep_tiny_grid(tmp_path):
    out = str(tmp_path / "sweep.csv")
    res = _run(["sweep", "--s", "1", "--t", "1", "--grid-n", "2",
                "--theta2-points", "3", "--delta-samples", "4",
                "--refine", "off", "--out", out])
    assert res.exit_code == 0, res.output
    lines = open(out).read().strip().splitlines()
    assert lines[0].startswith("axis1,axis2,s_max")
    assert len(lines) == 1 + 4


def test_config_file_merge(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "s": 1, "kind": "cphase", "phi": [3.141592653589793],
        "theta": [0.0, 1.0, 0.0], "t": 1,
    }))
    res = _run(["simulate", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["cone_sites"] == 3
    # flags override the config file
    res2 = _run(["simulate", "--config", str(cfg), "--t", "2"])
    assert json.loads(res2.output)["cone_sites"] == 5


def test_degrees_flag():
    res_r = _run(["simulate", "--s", "1", "--kind", "cphase",
                  "--phi", str(np.pi), "--theta", "0,1.5707963267948966,0",
                  "--t", "1", "--delta", "0,1.5707963267948966,0"])
    res_d = _run(["simulate", "--s", "1", "--kind", "cphase",
                  "--phi", "180", "--theta", "0,90,0",
                  "--t", "1", "--delta", "0,90,0", "--degrees"])
    e_r = json.loads(res_r.output)["entropy"]
    e_d = json.loads(res_d.output)["entropy"]
    assert abs(e_r - e_d) < 1e-12
