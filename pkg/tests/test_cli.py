import json

import pytest

from pottsflow import lattices
from pottsflow.cli import main
from pottsflow.cycles import format_gens


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sample_flow_below_threshold_exits_two(capsys):
    code, out, err = run(capsys, "sample-flow", "--graph", "grid:3x3", "--q", "2", "--x", "0.1", "--delta", "0.01")
    assert code == 2 and out == ""
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["threshold"] == pytest.approx(0.6)
    assert "0.6" in err


def test_sample_flow_output_and_manifest(capsys):
    code, out, _ = run(capsys, "sample-flow", "--graph", "grid:3x3", "--x", "0.9", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    d = doc["manifest"]["derived"]
    assert (d["r"], d["bound"], d["steps"]) == (4, 80, 80)
    assert d["bound_params"] == {"d": 4, "iota": 1, "ell": 4, "s": 2}
    assert d["xi"] == pytest.approx(0.3)
    assert len(doc["flow"]["values"]) == 12


def test_same_seed_is_byte_identical(capsys):
    argv = ("sample-potts", "--graph", "tri:3x3", "--q", "3", "--w", "40", "--seed", "7")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_sample_joint(capsys):
    code, out, _ = run(capsys, "sample-joint", "--graph", "grid:3x3", "--x", "0.95", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["steps"] == 318 and doc["p"] == pytest.approx(1 / 6)
    nonzero = {e for e, v in enumerate(doc["flow"]["values"]) if v > 0}
    assert nonzero <= set(doc["edge_set"])


def test_sample_rc_reports_parameter_map(capsys):
    code, out, _ = run(capsys, "sample-rc", "--graph", "grid:3x3", "--q", "3", "--x", "0.9", "--chain", "joint")
    doc = json.loads(out)
    assert code == 0 and doc["param_map"]["y_rc"] == pytest.approx(27)


def test_explicit_steps_skip_the_range_check(capsys):
    code, out, _ = run(capsys, "sample-flow", "--graph", "grid:3x3", "--x", "0.1", "--steps", "50")
    doc = json.loads(out)
    assert code == 0 and doc["manifest"]["derived"]["bound"] is None


def test_estimate_z(capsys):
    code, out, _ = run(
        capsys, "estimate-z", "--graph", "grid:2x2", "--q", "3", "--x", "0.8", "--samples-per-ratio", "200", "--seed", "2"
    )
    doc = json.loads(out)
    assert code == 0 and doc["zeta"] > 0 and len(doc["contraction_sequence"]) == 3
    assert "wall_time" not in doc


def test_estimate_z_timings_flag(capsys):
    argv = ["estimate-z", "--graph", "grid:2x2", "--x", "0.8", "--samples-per-ratio", "10", "--timings"]
    _, out, _ = run(capsys, *argv)
    doc = json.loads(out)
    assert "wall_time" in doc and "timings" in doc["manifest"]


def test_verify_all(capsys):
    code, out, err = run(capsys, "verify", "--suite", "all", "--graph", "grid:3x3", "--q", "2", "--x", "0.5")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    assert {c["name"] for c in doc["checks"]} >= {"potts-identity", "flow-count", "flow-chain", "sum-of-minima"}
    assert "PASS" in err


def test_duality(capsys):
    code, out, _ = run(capsys, "duality", "--L", "2", "--q", "2", "--x", "0.7")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["states"] == 16


def test_tv_curve_csv(capsys):
    code, out, _ = run(capsys, "tv-curve", "--graph", "grid:3x3", "--xs", "0.5,0.9", "--t-max", "4")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,x,tv" and len(lines) == 11


def test_missing_graph_file_is_io_error(capsys):
    code, _, err = run(capsys, "sample-flow", "--graph", "/no/such/file", "--x", "0.9")
    assert code == 1 and json.loads(err)["error"] == "io"


def test_graph_and_gens_files(tmp_path, capsys):
    lat = lattices.grid(3, 3)
    gpath, cpath = tmp_path / "g.txt", tmp_path / "c.txt"
    gpath.write_text("9 12\n" + "".join(f"{t} {h}\n" for t, h in zip(lat.graph.tails, lat.graph.heads)))
    cpath.write_text(format_gens(lat.gens))
    code, out, _ = run(capsys, "sample-flow", "--graph", str(gpath), "--gens", str(cpath), "--x", "0.9")
    doc = json.loads(out)
    assert code == 0 and doc["manifest"]["gens"] == str(cpath)
    # instance params (d = 2) are clamped, giving a lower threshold than the lattice class
    assert doc["manifest"]["derived"]["threshold"] == pytest.approx(1 - 2 / 3)
    code, out, _ = run(capsys, "sample-flow", "--graph", str(gpath), "--x", "0.9")
    assert code == 0 and json.loads(out)["manifest"]["gens"] == "fundamental-cycles"


def test_non_generating_set_rejected(tmp_path, capsys):
    cpath = tmp_path / "c.txt"
    cpath.write_text("1\n4 0 + 3 + 2 - 6 -\n")
    code, _, err = run(capsys, "sample-flow", "--graph", "grid:3x3", "--gens", str(cpath), "--x", "0.9")
    assert code == 2


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"graph": "grid:3x3", "x": 0.9, "seed": 7, "q": 3}))
    code, out, _ = run(capsys, "sample-flow", "--config", str(cfg), "--q", "2")
    doc = json.loads(out)
    assert code == 0 and doc["manifest"]["inputs"]["q"] == 2 and doc["manifest"]["inputs"]["seed"] == 7


def test_bad_config_is_io_error(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text("{not json")
    code, _, _ = run(capsys, "sample-flow", "--config", str(cfg))
    assert code == 1


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "flow.json"
    code, out, _ = run(capsys, "sample-flow", "--graph", "grid:3x3", "--x", "0.9", "--out", str(dest))
    assert code == 0 and out == "" and json.loads(dest.read_text())["schema"] == 1
