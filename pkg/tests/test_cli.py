"""CLI behaviour: exit codes, JSON reports, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from metric_union import canonical_dumps, to_jsonable, union_instance
from metric_union.cli import main


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(canonical_dumps(to_jsonable(obj)))
    return str(path)


def _stderr_payload(capsys):
    err = capsys.readouterr().err
    return json.loads(err.splitlines()[0])


@pytest.fixture()
def embed_input(tmp_path):
    inst = union_instance(8, 7, 2, 3, seed=31)
    obj = {
        "space": {"dist": inst.space.dist},
        "partition": {"a": inst.partition.idx_a, "b": inst.partition.idx_b},
        "phi_a": {"points": inst.phi_a.points},
        "phi_b": {"points": inst.phi_b.points},
    }
    return _write(tmp_path, "embed.json", obj), inst


def test_check_metric_ok(tmp_path, capsys):
    path = _write(tmp_path, "m.json",
                  {"dist": [[0, 1], [1, 0]], "labels": ["p", "q"]})
    assert main(["check-metric", "--input", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"ok": True, "n": 2, "labels": ["p", "q"]}


def test_check_metric_triangle_violation(tmp_path, capsys):
    path = _write(tmp_path, "bad.json",
                  {"dist": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]})
    assert main(["check-metric", "--input", path]) == 1
    payload = _stderr_payload(capsys)
    assert payload["error"] == "TriangleViolation"
    w = payload["witness"]
    assert (w["i"], w["j"], w["k"]) == (0, 2, 1)
    assert w["slack"] == pytest.approx(1.0)
    assert w["total"] == 2


def test_embed_with_coordinates(tmp_path, capsys, embed_input):
    path, inst = embed_input
    out_file = tmp_path / "emb.json"
    assert main(["embed", "--input", path, "--output", str(out_file)]) == 0
    rep = json.loads(out_file.read_text())
    assert rep["embedding"]["dim"] == 2 + 3 + 1
    assert len(rep["embedding"]["points"]) == inst.space.n
    assert all(e["ok"] for e in rep["audit"])
    assert rep["report"]["contraction"] <= 1.0 + 1e-9
    assert rep["scale_a"] == 1.0


def test_embed_without_coordinates(tmp_path, capsys):
    inst = union_instance(7, 6, 2, 2, seed=32)
    path = _write(tmp_path, "embed2.json", {
        "space": {"dist": inst.space.dist},
        "partition": {"a": inst.partition.idx_a, "b": inst.partition.idx_b},
    })
    assert main(["embed", "--input", path]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert all(e["ok"] for e in rep["audit"])


def test_embed_alpha_flag(tmp_path, capsys, embed_input):
    path, _ = embed_input
    assert main(["embed", "--input", path, "--alpha", "0.5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["params"]["alpha"] == 0.5
    assert rep["params"]["beta"] == 1.5 * 3.0


def test_embed_deterministic_bytes(tmp_path, embed_input):
    path, _ = embed_input
    f1, f2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["embed", "--input", path, "--output", str(f1)]) == 0
    assert main(["embed", "--input", path, "--output", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()


def test_cover_report(tmp_path, capsys, embed_input):
    path, inst = embed_input
    assert main(["cover", "--input", path, "--alpha", "0.5"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["alpha"] == 0.5
    assert rep["lip_bound"] == 6.0
    assert rep["lip_f"] <= rep["lip_bound"]
    assert rep["cover_size"] == len(rep["cover_idx"])
    # nearest is aligned with the cover points
    assert len(rep["nearest"]) == rep["cover_size"]
    assert set(rep["cover_idx"]) <= set(inst.partition.idx_a.tolist())


def test_lowerbound_n64(capsys):
    assert main(["lowerbound", "--n", "64", "--seed", "1"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["n"] == 64
    assert rep["edges_e1"] + rep["edges_e2"] == 64 * 64
    assert rep["delta_star"] < 1.0
    assert 0.0 < rep["certified_bound"] <= 3.0
    assert all(a["ok"] for a in rep["audits"])


def test_lowerbound_seed_changes_split(capsys):
    assert main(["lowerbound", "--n", "64", "--seed", "1"]) == 0
    rep1 = json.loads(capsys.readouterr().out)
    assert main(["lowerbound", "--n", "64", "--seed", "2"]) == 0
    rep2 = json.loads(capsys.readouterr().out)
    assert rep1["delta_star"] != rep2["delta_star"]


def test_lowerbound_n16_exhausts_budget(capsys):
    assert main(["lowerbound", "--n", "16", "--seed", "0"]) == 2
    payload = _stderr_payload(capsys)
    assert payload["error"] == "RetryBudgetExceeded"
    assert payload["witness"]["attempts"] == 64


def test_lowerbound_epsilon(capsys):
    assert main(["lowerbound", "--epsilon", "0.95", "--seed", "3"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["epsilon"] == 0.95
    assert 3.0 / (1.0 + rep["median_delta"]) ** 2 >= 3.0 - 0.95
    assert rep["certified_bound"] > 0.0


def test_lowerbound_bad_epsilon(capsys):
    assert main(["lowerbound", "--epsilon", "1.5"]) == 1
    assert _stderr_payload(capsys)["error"] == "InputError"


def test_lowerbound_needs_n_or_epsilon(capsys):
    assert main(["lowerbound"]) == 1


def test_glue_command(tmp_path, capsys):
    path = _write(tmp_path, "glue.json", {
        "u_points": {"points": [[0.0], [1.0], [2.0]]},
        "v_points": {"points": [[0.0], [2.0], [1.0]]},
        "a_idx": [0, 1, 2],
        "b_idx": [0, 1, 2],
        "pairing": [0, 1, 2],
    })
    assert main(["glue", "--input", path]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["glued"] == {"n": 3, "n_u": 3, "n_v": 3, "n_pairs": 3,
                            "d_f": 4.0, "v_scale": 2.0}
    assert rep["distortions"]["bound"] == 9.0 * 4.0 + 2.0
    assert rep["distortions"]["distortion_f1"] <= rep["distortions"]["bound"]
    assert len(rep["f1"]["points"]) == 3
    assert all(e["ok"] for e in rep["audit"])


def test_usage_errors(tmp_path, capsys):
    assert main(["embed"]) == 1                      # missing --input
    capsys.readouterr()
    assert main(["frobnicate"]) == 1                 # unknown command
    capsys.readouterr()
    bad = tmp_path / "nope.json"
    bad.write_text("{oops")
    assert main(["check-metric", "--input", str(bad)]) == 1
    assert _stderr_payload(capsys)["error"] == "InputError"
    assert main(["check-metric", "--input",
                 str(tmp_path / "missing.json")]) == 1


def test_glue_bad_pairing_maps_to_input_error(tmp_path, capsys):
    path = _write(tmp_path, "glue_bad.json", {
        "u_points": {"points": [[0.0], [1.0]]},
        "v_points": {"points": [[0.0], [1.0]]},
        "a_idx": [0, 1],
        "b_idx": [0, 1],
        "pairing": [0, 0],
    })
    assert main(["glue", "--input", path]) == 1


def test_runtime_goes_to_stderr_only(tmp_path, capsys):
    path = _write(tmp_path, "m.json", {"dist": [[0, 2], [2, 0]]})
    assert main(["check-metric", "--input", path]) == 0
    captured = capsys.readouterr()
    assert "runtime" not in captured.out
    assert "runtime" in captured.err


def test_console_script_entry_point(tmp_path):
    path = _write(tmp_path, "m.json", {"dist": [[0, 1], [1, 0]]})
    proc = subprocess.run(
        [sys.executable, "-m", "metric_union.cli"],
        capture_output=True, text=True)
    assert proc.returncode == 1                      # no subcommand
    proc = subprocess.run(
        ["metric-union", "check-metric", "--input", path],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"] is True
