import hashlib
import json
import subprocess
import sys

import pytest

from youngkit import measure as M
from youngkit import young as Y
from youngkit.cli import main, scenario_outputs
from youngkit.graph import GraphMeasure
from youngkit.io import write_json
from youngkit.varifold import regular_polygon


def put(path, obj):
    write_json(path, obj.to_dict() if hasattr(obj, "to_dict") else obj)
    return str(path)


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def test_w1_prints_distance(tmp_path, capsys):
    a = put(tmp_path / "a.json", M.dirac([0]))
    b = put(tmp_path / "b.json", M.dirac([5]))
    assert run(capsys, "w1", a, b) == (0, "5\n", "")
    sym = put(tmp_path / "s.json", M.ProbabilityMeasure([[-1], [1]], [0.5, 0.5]))
    code, out, _ = run(capsys, "w1", sym, a, "--plan", tmp_path / "plan.csv")
    assert code == 0 and out == "1\n"
    assert (tmp_path / "plan.csv").read_text().splitlines()[0] == "source_index,target_index,flow,cost_contribution"


def test_w1_error_codes(tmp_path, capsys):
    a = put(tmp_path / "a.json", M.dirac([0]))
    (tmp_path / "bad.json").write_text("{oops")
    (tmp_path / "empty.json").write_text("")
    half = put(tmp_path / "half.json", M.DiscreteMeasure([[1.0]], [0.5]))
    two = put(tmp_path / "two.json", M.dirac([0, 0]))
    code, _, err = run(capsys, "w1", a, tmp_path / "bad.json")
    assert code == 2 and "error" in err
    assert run(capsys, "w1", a, tmp_path / "empty.json")[0] == 2
    assert run(capsys, "w1", a, tmp_path / "missing.json")[0] == 2
    assert run(capsys, "w1", a, half)[0] == 3
    assert run(capsys, "w1", a, two)[0] == 5
    assert run(capsys, "w1")[0] == 2


def test_dual(tmp_path, capsys):
    a = put(tmp_path / "a.json", M.dirac([0]))
    b = put(tmp_path / "b.json", M.dirac([1]))
    code, out, _ = run(capsys, "dual", a, b)
    assert code == 0 and 0.9 <= float(out) <= 1.0
    bad = tmp_path / "bat.json"
    steep = {"kind": "bump", "parameters": {"center": [0.0], "r_inner": 0.01, "r_outer": 0.02, "height": 1.0}}
    write_json(bad, [steep])
    assert run(capsys, "dual", a, b, "--battery", bad)[0] == 6
    write_json(bad, [{"kind": "nope"}])
    assert run(capsys, "dual", a, b, "--battery", bad)[0] == 2


def test_build_disintegrate_roundtrip_bytes(tmp_path, capsys):
    g = GraphMeasure([[0], [0], [1]], [[1], [2], [5]], [0.3, 0.3, 0.4])
    gp = put(tmp_path / "g.json", g)
    assert run(capsys, "disintegrate", gp, "--out", tmp_path / "d")[0] == 0
    young = json.loads((tmp_path / "d" / "young.json").read_text())
    assert [s["x"] for s in young["sites"]] == [[0.0], [1.0]]
    assert young["sites"][0]["fiber"]["atoms"] == [{"x": [1.0], "w": 0.5}, {"x": [2.0], "w": 0.5}]
    assert run(capsys, "build", tmp_path / "d" / "young.json", "--out", tmp_path / "g2.json")[0] == 0
    assert (tmp_path / "g2.json").read_bytes() == (tmp_path / "g.json").read_bytes()


def test_disintegrate_errors(tmp_path, capsys):
    (tmp_path / "empty.json").write_text("")
    assert run(capsys, "disintegrate", tmp_path / "empty.json", "--out", tmp_path / "o")[0] == 2
    z = put(tmp_path / "z.json", GraphMeasure([[0]], [[1]], [0.0]))
    assert run(capsys, "disintegrate", z, "--out", tmp_path / "o")[0] == 3
    assert not (tmp_path / "o").exists()


def test_build_to_stdout(tmp_path, capsys):
    f = Y.YoungFunction([[0.0]], [1.0], [M.dirac([2.0])])
    code, out, _ = run(capsys, "build", put(tmp_path / "f.json", f))
    assert code == 0 and json.loads(out)["atoms"] == [{"x": [0.0], "y": [2.0], "w": 1.0}]


def test_tightness(tmp_path, capsys):
    files = [put(tmp_path / f"g{i}.json", GraphMeasure([[0.0]], [[float(i)]], [0.3])) for i in (1, 5, 20)]
    code, out, _ = run(capsys, "tightness", *files, "--radii", "1,4,16", "--tol", "0.1")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "s,T(s),verdict" and rows[-1] == "16,0.29999999999999999,not_tight"
    assert run(capsys, "tightness", *files, "--radii", "4,1")[0] == 7
    assert run(capsys, "tightness", *files, "--radii", "a,b")[0] == 2


def test_varifold_commands(tmp_path, capsys):
    p = put(tmp_path / "p.json", regular_polygon(4))
    code, out, _ = run(capsys, "varifold", "first-variation", p)
    assert code == 0 and abs(float(out) - 4 * 2**0.5) <= 1e-12
    code, out, _ = run(capsys, "varifold", "mass", p, "--atoms-per-segment", "3")
    assert code == 0 and abs(float(out) - 4 * 2**0.5) <= 1e-12
    code, _, _ = run(capsys, "varifold", "tangent-young", p, "--out", tmp_path / "ty.json")
    assert code == 0
    ty = json.loads((tmp_path / "ty.json").read_text())
    assert ty["carrier_dim"] == 2 and ty["fiber_dim"] == 4 and len(ty["sites"]) == 4


def test_scenario_unknown(capsys, tmp_path):
    code, _, err = run(capsys, "scenario", "nope", "--out", tmp_path)
    assert code == 4 and "parallel_lines" in err and "pairs_compactness" in err
    assert run(capsys, "scenario", "atom_floor", "--steps", "0", "--out", tmp_path)[0] == 2


def test_scenario_parallel_lines(tmp_path, capsys):
    code, out, _ = run(capsys, "scenario", "parallel_lines", "--steps", "50", "--out", tmp_path)
    assert code == 0
    assert out.splitlines()[0] == "weak=pass moment=pass d=pass"
    slope = float(out.splitlines()[1].split(":")[1])
    assert -1.3 <= slope <= -0.7
    assert (tmp_path / "report.json").exists() and (tmp_path / "table.csv").exists()
    assert (tmp_path / "steps" / "step_00050.json").exists()


def test_scenario_escaping_mass(tmp_path, capsys):
    code, out, _ = run(capsys, "scenario", "escaping_mass", "--steps", "200", "--out", tmp_path)
    assert code == 0 and out.splitlines()[0] == "weak=pass moment=fail d=fail"
    rep = json.loads((tmp_path / "report.json").read_text())
    assert abs(rep["w1"][-1] - 1.0) <= 0.05


def digest(files):
    return hashlib.sha256(json.dumps(files, sort_keys=True).encode()).hexdigest()


@pytest.mark.parametrize("name", ["parallel_lines", "oscillation", "escaping_mass", "atom_floor", "truncation"])
def test_scenario_outputs_deterministic(name):
    a = scenario_outputs(name, 40, 1e-3, 0, None)
    b = scenario_outputs(name, 40, 1e-3, 0, None)
    assert digest(a) == digest(b)


def test_pairs_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "scenario", "pairs_compactness", "--steps", "40", "--out", tmp_path)
    assert code == 0
    assert "escaping_fiber: hypothesis_violation" in out and "parallel_lines: converged" in out
    assert (tmp_path / "tightness_escaping_fiber.csv").read_text().splitlines()[-1].endswith("not_tight")


def test_module_entry_point(tmp_path):
    a = put(tmp_path / "a.json", M.dirac([0]))
    b = put(tmp_path / "b.json", M.dirac([5]))
    res = subprocess.run([sys.executable, "-m", "youngkit", "w1", a, b], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "5\n"
