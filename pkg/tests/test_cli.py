import json
import subprocess
import sys

import pytest

from alfeld.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_assumption_ok(capsys):
    code, out, _ = call(capsys, "check-assumption", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["valid"] is True and rep["violated"] is None and rep["config"]["rho"] == 2


def test_check_assumption_violation(capsys):
    code, out, _ = call(capsys, "check-assumption", "--d", "2", "--r", "1,2", "--k", "5", "--rho", "4")
    assert code == 2
    assert json.loads(out)["violated"] == "r2 <= 2*r1-1"


def test_assumption_error_message(capsys):
    code, out, err = call(capsys, "unisolvence", "--d", "2", "--r", "1,2", "--k", "5", "--b", "1")
    assert code == 2 and out == ""
    assert "r2 <= 2*r1-1" in err


def test_argparse_errors_exit_2(capsys):
    assert run(["unisolvence", "--d", "2"]) == 2
    assert run(["dofs", "--d", "2", "--r", "x", "--k", "3", "--b", "1"]) == 2
    assert run(["nonsense"]) == 2


def test_length_mismatch(capsys):
    code, _, err = call(capsys, "dofs", "--d", "3", "--r", "1,1", "--k", "5", "--b", "1")
    assert code == 2 and "--r" in err


def test_unisolvence_ct(capsys):
    code, out, _ = call(capsys, "unisolvence", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["matrix_size"] == rep["oracle_dim"] == rep["formula_dim"] == 12
    assert rep["nonsingular"] and rep["agree"]


def test_unisolvence_with_split_point(capsys):
    code, out, _ = call(
        capsys, "unisolvence", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--split-point", "1/5,2/5"
    )
    assert code == 0 and json.loads(out)["nonsingular"]


def test_oracle_dim_toggles(capsys):
    code, out, _ = call(
        capsys, "oracle-dim", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--no-supersmoothness", "--no-split-point"
    )
    rep = json.loads(out)
    assert code == 0 and rep["oracle_dim"] == rep["formula_dim"] == 12


def test_dofs_listing(capsys, tmp_path):
    code, out, _ = call(capsys, "dofs", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 12
    assert [r["id"] for r in rows] == list(range(12))
    assert {r["kind"] for r in rows} == {"VertexDerivative", "FaceMoment"}
    code, out, _ = call(capsys, "dofs", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--mesh", "two-triangles")
    assert code == 0 and len(json.loads(out)) == 17


def test_mesh_file(capsys, tmp_path):
    mesh = tmp_path / "m.txt"
    mesh.write_text("2\n4\n0 0\n1 0\n0 1\n1 1\n2\n0 1 2\n1 2 3\n")
    code, out, _ = call(capsys, "dimension", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--mesh", str(mesh))
    rep = json.loads(out)
    assert code == 0 and rep["dim_form1"] == 17 and rep["N"] == [4, 5, 2]
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n3\n0 0\n1 0\n")
    code, _, err = call(capsys, "dofs", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--mesh", str(bad))
    assert code == 2 and "line 5" in err


def test_dimension_face_counts(capsys):
    code, out, _ = call(capsys, "dimension", "--d", "3", "--r", "1,1,2", "--k", "5", "--b", "1", "--N", "1,1,1,1")
    rep = json.loads(out)
    assert code == 0 and rep["dim_form1"] == rep["dim_form2"] == 16
    assert rep["closed_forms"]["polynomial_value"] == "16"


def test_decompose(capsys):
    code, out, _ = call(capsys, "decompose", "--d", "2", "--r", "1,2", "--k", "7", "--refined")
    cells = json.loads(out)
    assert code == 0 and sum(len(c["indices"]) for c in cells) == 36
    code, out, _ = call(capsys, "decompose", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1")
    groups = {c["group"] for c in json.loads(out)}
    assert code == 0 and groups == {"boundary", "interior"}


def test_tables(capsys):
    code, out, _ = call(capsys, "tables", "--d", "2..3", "--m", "1..2")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 8
    code, out, _ = call(capsys, "tables", "--format", "text", "--d", "1")
    assert code == 0 and "unsupported" not in out and "n/a" in out


def test_continuity(capsys):
    code, out, _ = call(capsys, "continuity", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--trials", "2")
    rep = json.loads(out)
    assert code == 0 and rep["agree"] and rep["defect_detected"]
    assert all(j["zero"] for j in rep["jumps"])


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = call(capsys, "check-assumption", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().endswith("\n")


def test_output_is_deterministic(capsys):
    argv = ["dofs", "--d", "2", "--r", "2,3", "--k", "7", "--b", "1"]
    _, a, _ = call(capsys, *argv)
    _, b, _ = call(capsys, *argv)
    assert a == b
    assert "." not in "".join(ch for ch in a if not ch.isalpha())
    assert json.dumps(json.loads(a), sort_keys=True, indent=2) + "\n" == a


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "alfeld", "check-assumption", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["valid"]


@pytest.mark.parametrize("argv", [["tables", "--d", "0"], ["dimension", "--d", "2", "--r", "1,1", "--k", "3", "--b", "1", "--N", "1,2"]])
def test_value_errors(capsys, argv):
    assert run(argv) == 2
