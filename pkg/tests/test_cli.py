import json
import subprocess
import sys

import pytest

from curvedfem.cli import main
from curvedfem.output import read_trace_csv

TABLE4_JSON = {"G1": "0", "G2": "0", "G3": "1-x", "G4": "1", "G5": "1-x", "G6": "0", "G7": "0"}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    results = [ln for ln in out.out.splitlines() if ln.startswith("RESULT:")]
    assert len(results) == 1, out.out
    return code, out.out, out.err, results[0]


@pytest.fixture(scope="module")
def vnotch_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "vnotch.json"
    assert main(["mesh", "--domain", "vnotch", "--h", "0.045", "-o", str(path)]) == 0
    return path


def write_bc(tmp_path, data, name="bc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def test_mesh_square(tmp_path, capsys):
    out = tmp_path / "m.json"
    code, stdout, _, res = run(capsys, "mesh", "--domain", "square", "--elements", 8, "-o", out)
    assert code == 0
    assert "elements=8 dof=49 boundary_nodes=24" in stdout.splitlines()
    assert res.startswith("RESULT: status=ok")
    assert len(json.loads(out.read_text())["elements"]) == 8


def test_mesh_bad_count(capsys):
    code, _, err, res = run(capsys, "mesh", "--domain", "square", "--elements", 7)
    assert code == 1
    assert "usage:" in err
    assert "status=usage-error" in res


def test_mesh_square_requires_elements(capsys):
    code, _, _, _ = run(capsys, "mesh", "--domain", "square")
    assert code == 1


def test_mesh_vnotch_stats(tmp_path, capsys):
    code, stdout, _, _ = run(capsys, "mesh", "--domain", "vnotch", "--h", 0.045, "-o", tmp_path / "v.json")
    assert code == 0
    fields = dict(kv.split("=") for kv in stdout.splitlines()[0].split())
    assert abs(int(fields["elements"]) - 1038) <= 0.2 * 1038
    assert abs(int(fields["dof"]) - 4843) <= 0.2 * 4843


def test_mesh_from_config(tmp_path, capsys):
    cfg = write_bc(tmp_path, {"variant": "v_notch_with_inclusions", "target_h": 0.08,
                              "inclusions": [{"center": [0.3, 0.75], "radius": 0.08}]}, "domain.json")
    code, stdout, _, _ = run(capsys, "mesh", "--domain", "vnotch-inclusions", "--config", cfg, "-o", tmp_path / "i.json")
    assert code == 0, stdout


def test_mesh_geometry_failure(tmp_path, capsys):
    cfg = write_bc(tmp_path, {"variant": "v_notch_with_inclusions", "target_h": 0.08,
                              "inclusions": [{"center": [0.02, 0.5], "radius": 0.1}]}, "domain.json")
    code, _, err, res = run(capsys, "mesh", "--domain", "vnotch-inclusions", "--config", cfg, "-o", tmp_path / "i.json")
    assert code == 3
    assert "status=failure" in res


def test_solve_vnotch(tmp_path, capsys, vnotch_json):
    bc = write_bc(tmp_path, TABLE4_JSON)
    trace = tmp_path / "trace.csv"
    code, _, _, res = run(capsys, "solve", "--mesh", vnotch_json, "--bc", bc, "-o", tmp_path / "s.vtk", "--trace", trace)
    assert code == 0
    diffs = read_trace_csv(trace)
    assert len(diffs) <= 30 and diffs[-1] <= 1e-5
    assert "status=converged" in res
    assert (tmp_path / "s.vtk").read_text().startswith("# vtk DataFile")


def test_solve_not_converged(tmp_path, capsys, vnotch_json):
    bc = write_bc(tmp_path, TABLE4_JSON)
    trace = tmp_path / "trace.csv"
    code, _, _, res = run(capsys, "solve", "--mesh", vnotch_json, "--bc", bc, "--max-iters", 3,
                          "-o", tmp_path / "s.vtk", "--trace", trace)
    assert code == 2
    assert len(read_trace_csv(trace)) == 3
    assert "status=not-converged" in res


def test_solve_zero_bc(tmp_path, capsys, vnotch_json):
    bc = write_bc(tmp_path, {k: "0" for k in TABLE4_JSON})
    trace = tmp_path / "trace.csv"
    code, _, _, _ = run(capsys, "solve", "--mesh", vnotch_json, "--bc", bc, "-o", tmp_path / "s.vtk", "--trace", trace)
    assert code == 0
    assert len(read_trace_csv(trace)) <= 2


def test_solve_missing_label(tmp_path, capsys, vnotch_json):
    data = dict(TABLE4_JSON)
    del data["G2"]
    bc = write_bc(tmp_path, data)
    code, _, err, res = run(capsys, "solve", "--mesh", vnotch_json, "--bc", bc, "-o", tmp_path / "s.vtk",
                            "--trace", tmp_path / "t.csv")
    assert code == 1
    assert "G2" in err and "G2" in res


def test_solve_bad_expression(tmp_path, capsys, vnotch_json):
    bc = write_bc(tmp_path, {**TABLE4_JSON, "G4": "exp(x)"})
    code, _, err, _ = run(capsys, "solve", "--mesh", vnotch_json, "--bc", bc, "-o", tmp_path / "s.vtk",
                          "--trace", tmp_path / "t.csv")
    assert code == 1 and "exp" in err


def test_solve_missing_mesh_file(tmp_path, capsys):
    bc = write_bc(tmp_path, TABLE4_JSON)
    code, _, _, res = run(capsys, "solve", "--mesh", tmp_path / "nope.json", "--bc", bc, "-o", tmp_path / "s.vtk",
                          "--trace", tmp_path / "t.csv")
    assert code == 1 and "config-error" in res


def test_solve_inclusions_defaults_natural(tmp_path, capsys):
    mesh = tmp_path / "inc.json"
    assert main(["mesh", "--domain", "vnotch-inclusions", "-o", str(mesh)]) == 0
    capsys.readouterr()
    bc = write_bc(tmp_path, TABLE4_JSON)
    code, _, _, _ = run(capsys, "solve", "--mesh", mesh, "--bc", bc, "-o", tmp_path / "s.vtk",
                        "--trace", tmp_path / "t.csv")
    assert code == 0


def test_verify_default_and_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    code, _, _, res = run(capsys, "verify", "--case", "square-manufactured", "--elements", "8,16,32", "-o", a)
    assert code == 0 and "status=ok" in res
    rows = a.read_text().splitlines()
    assert rows[0] == "elements,dof,e_abs,e_rel,l2" and len(rows) == 4
    assert all(float(r.split(",")[4]) <= 1e-6 for r in rows[1:])
    assert main(["verify", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_single_mesh(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _, _ = run(capsys, "verify", "--elements", "8", "-o", out)
    assert code == 0
    assert len(out.read_text().splitlines()) == 2


def test_verify_unknown_case(tmp_path, capsys):
    code, _, _, res = run(capsys, "verify", "--case", "circle", "-o", tmp_path / "r.csv")
    assert code == 1 and "usage-error" in res


def test_no_command(capsys):
    code, _, _, _ = run(capsys)
    assert code == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "curvedfem", "mesh", "--domain", "square", "--elements", "16",
                           "-o", str(tmp_path / "m.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "elements=16 dof=85 boundary_nodes=24"
