import csv
import io
import json
import subprocess
import sys

import pytest

from nldistill import cli, nsbox, wiring


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def signaling_file(tmp_path):
    doc = nsbox.behavior_to_json(nsbox.named_box("P_L1"))
    doc["p"] = [[1, 0, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [1, 0, 0, 0]]
    path = tmp_path / "sig.json"
    path.write_text(json.dumps(doc))
    return path


def test_box_show_prints_vertex_matrix(capsys):
    code, out, _ = run(capsys, "box", "show", "--name", "P_L5")
    assert code == 0
    rows = [line.split()[1:] for line in out.splitlines() if line.startswith("xy=")]
    assert [[float(v) for v in r] for r in rows] == nsbox.named_box("P_L5").p.tolist()
    assert "chsh 2" in out


def test_box_decompose(capsys):
    code, out, _ = run(capsys, "--full-precision", "box", "decompose", "--name", "H_Q_max")
    assert code == 0
    values = dict(line.split() for line in out.splitlines())
    want = nsbox.decompose_simplex(nsbox.named_box("H_Q_max")).c
    for name, c in zip(nsbox.SIMPLEX_NAMES, want):
        assert float(values[name]) == pytest.approx(c, abs=1e-15)


def test_box_validate_exit_codes(capsys, tmp_path):
    code, out, err = run(capsys, "box", "validate", "--input", str(signaling_file(tmp_path)))
    assert code == 1 and "NoSignalingViolation" in err
    assert run(capsys, "box", "validate", "--name", "H_NS")[0] == 0
    assert run(capsys, "box", "validate", "--input", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "other", "p": [[0.25] * 4] * 4}))
    assert run(capsys, "box", "show", "--input", str(bad))[0] == 2
    assert run(capsys, "box", "show", "--name", "nope")[0] == 2


def test_box_decompose_outside_simplex(capsys, tmp_path):
    path = tmp_path / "u.json"
    nsbox.save_behavior(nsbox.uniform_box(), path)
    code, _, err = run(capsys, "box", "decompose", "--input", str(path))
    assert code == 1 and "NotInSimplex" in err


def test_box_canonicalize(capsys):
    code, out, _ = run(capsys, "box", "canonicalize", "--name", "PR_000")
    assert code == 0 and "chsh 4" in out


def test_wire_h_ns_eight_copies(capsys, tmp_path):
    out_path = tmp_path / "h8.json"
    code, out, _ = run(capsys, "wire", "--name", "H_NS", "--copies", "8", "--out", str(out_path))
    assert code == 0 and "hardy 0.157977" in out
    child = nsbox.load_behavior(out_path)
    assert child.allclose(wiring.wire_n_closed(nsbox.named_box("H_NS"), 8), 0)


def test_wire_identity_law(capsys, tmp_path):
    out_path = tmp_path / "c.json"
    code, _, _ = run(capsys, "wire", "--name", "P_L1", "--name", "H_NS", "--out", str(out_path))
    assert code == 0
    assert nsbox.load_behavior(out_path).allclose(nsbox.named_box("H_NS"), 1e-15)


def test_wire_mixed_parent_order(capsys, tmp_path):
    path = tmp_path / "h.json"
    nsbox.save_behavior(nsbox.named_box("H_NS"), path)
    out_path = tmp_path / "c.json"
    code, _, _ = run(capsys, "wire", "--input", str(path), "--name", "P_NL", "--out", str(out_path))
    assert code == 0
    want = wiring.wire_pair(nsbox.named_box("H_NS"), nsbox.named_box("P_NL"))
    assert nsbox.load_behavior(out_path).allclose(want, 1e-15)


def test_wire_monte_carlo(capsys):
    code, out, _ = run(capsys, "wire", "--name", "P_NL", "--copies", "2", "--method", "mc",
                       "--rounds", "1000000", "--seed", "7")
    assert code == 0
    z = float(out.strip().splitlines()[-1].split()[-1])
    assert z < 3


def test_wire_errors(capsys, tmp_path):
    assert run(capsys, "wire", "--name", "H_NS", "--copies", "0")[0] == 2
    assert run(capsys, "wire")[0] == 2
    assert run(capsys, "wire", "--input", str(signaling_file(tmp_path)))[0] == 1


def test_sweep_gap(capsys, tmp_path):
    out_path = tmp_path / "gap.csv"
    code, out, _ = run(capsys, "sweep", "--quantity", "gap", "--r", "0:1:200", "--s", "0:1:200",
                       "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(out_path.open()))
    assert len(rows) == 40000
    best = max(rows, key=lambda r: float(r["gap"]))
    assert float(best["gap"]) == pytest.approx(0.0101896, abs=1e-4)
    assert abs(float(best["r"]) - 0.1241) <= 0.005 and abs(float(best["s"]) - 0.8896) <= 0.005
    assert out.startswith("argmax gap=0.0101")


def test_sweep_limit(capsys):
    code, out, _ = run(capsys, "sweep", "--quantity", "limit", "--r", "0:1:200", "--s", "0:1:200")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in out.splitlines() if not l.startswith("arg")))))
    best = max(rows, key=lambda r: float(r["distilled_value"]))
    assert float(best["distilled_value"]) == pytest.approx(0.0433049, abs=1e-5)
    assert abs(float(best["r"]) - 0.5) <= 0.005 and abs(float(best["s"]) - 2 / 3) <= 0.005


def test_sweep_chsh_peak(capsys):
    code, out, _ = run(capsys, "sweep", "--quantity", "chsh-n", "--lambda", "1e-7", "--n-around-peak")
    assert code == 0
    line = next(l for l in out.splitlines() if l.startswith("argmax"))
    assert "distilled_value=2.32928" in line


def test_sweep_bad_grid(capsys):
    assert run(capsys, "sweep", "--quantity", "gap", "--r", "0:1:x", "--s", "0:1:4")[0] == 2
    assert run(capsys, "sweep", "--quantity", "gap", "--r", "1:0:4", "--s", "0:1:4")[0] == 2
    assert run(capsys, "sweep", "--quantity", "gap", "--r", "0:1:4")[0] == 2


def test_sweep_byte_identical_across_workers(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "sweep", "--quantity", "gap", "--r", "0:1:20", "--s", "0:1:20", "--out", str(a), "--workers", "1")
    run(capsys, "sweep", "--quantity", "gap", "--r", "0:1:20", "--s", "0:1:20", "--out", str(b), "--workers", "4")
    assert a.read_bytes() == b.read_bytes()


def test_detect(capsys):
    code, out, _ = run(capsys, "detect", "--name", "H_NS", "--max-copies", "8")
    verdicts = json.loads(out)
    assert code == 0
    assert [v["positive"] for v in verdicts[:3]] == [True, False, False]
    code, out, _ = run(capsys, "detect", "--name", "H_NS_prime", "--max-copies", "2")
    v = json.loads(out)[0]
    assert v["positive"] and v["witness"] == 2


def test_detect_assert_postquantum(capsys):
    assert run(capsys, "detect", "--name", "B_Q_max", "--max-copies", "20", "--assert-postquantum")[0] == 3
    assert run(capsys, "detect", "--name", "H_NS", "--max-copies", "8", "--assert-postquantum")[0] == 0


@pytest.mark.parametrize("key", ["prop1-copies", "thm2-gain", "thm1-hardy", "figD1"])
def test_reproduce_passing_keys(capsys, key):
    code, out, _ = run(capsys, "reproduce", key)
    assert code == 0 and "FAIL" not in out


def test_reproduce_prop1_table(capsys):
    _, out, _ = run(capsys, "reproduce", "prop1-copies")
    assert "floor(x*) for H_NS" in out and "3/3 passed" in out


def test_reproduce_postquantum_reports_mismatch(capsys):
    # the 8-copy CHSH reference value cannot be matched; see the decisions ledger
    code, out, _ = run(capsys, "reproduce", "appE-postquantum")
    assert code == 4
    fails = [l for l in out.splitlines() if l.endswith("FAIL")]
    assert len(fails) == 1 and "CHSH of 8-copy H_NS" in fails[0]


def test_precision_flag(capsys):
    _, out6, _ = run(capsys, "box", "show", "--name", "H_Q_max")
    _, out17, _ = run(capsys, "--full-precision", "box", "show", "--name", "H_Q_max")
    assert "hardy 0.0901699 " in out6
    assert f"hardy {nsbox.HARDY_QUANTUM_MAX!r}" in out17 or f"hardy {nsbox.HARDY_QUANTUM_MAX:.17g}" in out17


def test_console_entry_point_is_deterministic(tmp_path):
    cmd = [sys.executable, "-m", "nldistill.cli", "wire", "--name", "H_NS", "--copies", "3",
           "--method", "mc", "--rounds", "20000", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and "max z-score" in a


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["box", "explode", "--name", "H_NS"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["reproduce", "nope"])
    assert e.value.code == 2
