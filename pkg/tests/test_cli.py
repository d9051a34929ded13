import json
import math

import numpy as np
import pytest

from chebpot.cli import dumps, main


def run_cli(tmp_path, name, doc, *args):
    cfg = tmp_path / f"{name}.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / f"out_{name}"
    code = main([name.split("__")[0], "--config", str(cfg), "--out", str(out), *args])
    return code, out


def test_solve_classical(tmp_path):
    doc = {"bands": [[-1, 1]], "weight": {"kind": "unit"}, "x_star": "inf", "n": 3}
    code, out = run_cli(tmp_path, "solve", doc)
    assert code == 0
    data = json.loads((out / "solve.json").read_text())
    assert abs(data["solution"]["t"] - 0.25) < 1e-12
    assert data["solution"]["coefficients"] == [0, -0.75, 0, 1]
    csv_text = (out / "solve.csv").read_text().splitlines()
    assert csv_text[0] == "n,degree,t,defect"


def test_bounds_csv_row(tmp_path):
    doc = {
        "bands": [[-1, 1]],
        "weight": {"kind": "recip_poly", "coeffs": [-3.0, 1.0]},
        "x_star": "inf",
        "n": 5,
    }
    code, out = run_cli(tmp_path, "bounds", doc)
    assert code == 0
    lines = (out / "bounds.csv").read_text().splitlines()
    assert lines[0] == "n,t_n,W_n,S,sharp_lb,ub,pass_lb,pass_ub"
    row = lines[1].split(",")
    assert int(row[0]) == 5
    W, S = float(row[2]), float(row[3])
    assert abs(W - 2 * S) < 1e-9
    assert row[6] == "true" and row[7] == "true"


def test_missing_bands_is_input_error(tmp_path, capsys):
    code, _ = run_cli(tmp_path, "solve", {"weight": {"kind": "unit"}, "n": 3})
    assert code == 2
    assert "/bands" in capsys.readouterr().err


def test_bad_weight_kind_path(tmp_path, capsys):
    doc = {"bands": [[-1, 1]], "weight": {"kind": "nope"}, "n": 2}
    code, _ = run_cli(tmp_path, "solve", doc)
    assert code == 2
    assert "/weight/kind" in capsys.readouterr().err


def test_computation_error_exit_one(tmp_path, capsys):
    # x* on the set: valid descriptor, failing computation
    doc = {"bands": [[-1, 1]], "weight": {"kind": "unit"}, "x_star": 0.5, "n": 2}
    code, _ = run_cli(tmp_path, "solve", doc)
    assert code == 1
    assert "PoleOnSet" in capsys.readouterr().err


def test_determinism_byte_identical(tmp_path):
    doc = {
        "bands": [[-1, -0.6], [0.6, 1]],
        "weight": {"kind": "unit"},
        "n_range": [1, 4],
    }
    _, out1 = run_cli(tmp_path, "sweep__a", doc)
    _, out2 = run_cli(tmp_path, "sweep__b", doc)
    assert (out1 / "sweep.json").read_bytes() == (out2 / "sweep.json").read_bytes()
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()


def test_solve_output_feeds_enset_without_resolve(tmp_path):
    doc = {
        "bands": [[-1, 1]],
        "weight": {"kind": "recip_poly", "coeffs": [-3.0, 1.0]},
        "x_star": "inf",
        "n": 4,
    }
    code, out = run_cli(tmp_path, "solve__r", doc)
    assert code == 0
    solved = json.loads((out / "solve.json").read_text())

    cfg2 = tmp_path / "chain.json"
    cfg2.write_text(json.dumps(solved))
    out2 = tmp_path / "out_chain"
    assert main(["enset", "--config", str(cfg2), "--out", str(out2)]) == 0
    data = json.loads((out2 / "enset.json").read_text())
    assert data["d_n"] == 4 and data["r_n"] == 1
    assert data["measures_ok"] and data["cosh_ok"]

    # same command from the raw descriptor gives identical artifacts
    cfg3 = tmp_path / "raw.json"
    cfg3.write_text(json.dumps(doc))
    out3 = tmp_path / "out_raw"
    assert main(["enset", "--config", str(cfg3), "--out", str(out3)]) == 0
    assert (out2 / "enset.json").read_bytes() == (out3 / "enset.json").read_bytes()


def test_widom_uses_embedded_solution_verbatim(tmp_path):
    doc = {"bands": [[-1, 1]], "weight": {"kind": "unit"}, "x_star": "inf", "n": 2}
    code, out = run_cli(tmp_path, "solve__w", doc)
    solved = json.loads((out / "solve.json").read_text())
    solved["solution"]["t"] = 123.0  # a recomputation would overwrite this
    cfg = tmp_path / "tweaked.json"
    cfg.write_text(json.dumps(solved))
    out2 = tmp_path / "out_tweaked"
    assert main(["widom", "--config", str(cfg), "--out", str(out2)]) == 0
    data = json.loads((out2 / "widom.json").read_text())
    assert data["t"] == 123.0


def test_dichotomy_command(tmp_path):
    doc = {
        "bands": [[-1, 1]],
        "weight": {"kind": "exp_inv_abs", "center": 0.2},
        "n_range": [4, 8],
    }
    code, out = run_cli(tmp_path, "dichotomy", doc)
    assert code == 0
    data = json.loads((out / "dichotomy.json").read_text())
    assert data["divergent"] is True
    assert data["szego_log_integral"] == "-inf"


def test_potential_command(tmp_path):
    doc = {"bands": [[-1, -0.6], [0.6, 1]], "x_star": 0.0}
    code, out = run_cli(tmp_path, "potential", doc)
    assert code == 0
    data = json.loads((out / "potential.json").read_text())
    assert abs(data["capacity"] - 0.4) < 1e-10
    assert abs(data["pw"] - math.log(2)) < 1e-10
    assert abs(data["pw_at_x_star"] - math.log(2)) < 1e-10


def test_json_format_only(tmp_path):
    doc = {"bands": [[-1, 1]], "weight": {"kind": "unit"}, "n": 2}
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "o"
    assert main(["solve", "--config", str(cfg), "--out", str(out), "--format", "json"]) == 0
    assert (out / "solve.json").exists()
    assert not (out / "solve.csv").exists()


def test_dumps_17_digits_roundtrip():
    x = 1 / 3
    s = dumps({"v": x})
    assert "0.33333333333333331" in s
    assert json.loads(s)["v"] == x
    assert dumps({"a": math.inf, "b": -math.inf}) == '{\n  "a": "inf",\n  "b": "-inf"\n}'


def test_dumps_sorted_keys_and_types():
    s = dumps({"b": [1, 2.5, None, True], "a": "x"})
    assert s.index('"a"') < s.index('"b"')
    parsed = json.loads(s)
    assert parsed == {"a": "x", "b": [1, 2.5, None, True]}
