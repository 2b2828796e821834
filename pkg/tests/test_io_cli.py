import json
import subprocess
import sys

import numpy as np
import pytest

from normlab import io
from normlab.cli import main
from normlab.core import FiniteSet, FnOnE, Functional
from normlab.errors import MalformedInput
from normlab.functions import Abs, Coord, Identity, Prod, Sum, Table, from_dict
from normlab.hahn_banach import Subspace
from normlab.measures import DiscreteMeasure
from normlab.norms import (EllipsoidNorm, L1Norm, LinfNorm, LpNorm, PolyFacetNorm,
                           PolyVertexNorm)
from normlab.operators import MapFromFunctions, MapToFunctions
from normlab.plot import plot_balls

SPECS = [L1Norm(3), LinfNorm(2, "complex"), LpNorm(4, 3.5), LpNorm(2, float("inf")),
         EllipsoidNorm([[2.0, 0.5j], [-0.5j, 1.0]]), EllipsoidNorm.identity(3),
         PolyVertexNorm([[1, 0], [0, 1], [1, 1]]), PolyFacetNorm([[1, 2], [3, -1]])]


def _reparse(obj):
    return json.loads(io.dumps(obj))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: type(s).__name__)
def test_spec_round_trip(spec):
    assert io.spec_from_dict(_reparse(spec)) == spec


def test_other_round_trips():
    E = FiniteSet(["a", "b"])
    f = FnOnE(E, [1.0, -2.5])
    assert io.fn_on_e_from_json(_reparse(f)) == f
    lam = Functional([1 + 2j, -1])
    assert np.array_equal(io.functional_from_json(_reparse(lam)).coeffs, lam.coeffs)
    A = MapFromFunctions(E, [[1, 2, 3], [0, 1, 0]])
    assert io.map_from_json(_reparse(A)) == A
    T = MapToFunctions(E, [[1j, 2], [0, -3]])
    assert io.map_from_json(_reparse(T)) == T
    mu = DiscreteMeasure(L1Norm(2), [[1, 0], [0, -1]], [2.0, -1.0])
    assert io.measure_from_json(_reparse(mu)) == mu
    for fn in (Sum([Coord(0), Prod([Coord(1), Coord(0)])]), Abs(Coord(1)), Identity(3),
               Table([[1, 0], [0, 1]], [[1, 2], [3, 4]]), Table([[1, 0]], [1 + 1j])):
        assert from_dict(_reparse(fn)) == fn
    W = io.subspace_from_json({"ambient_dim": 3, "basis": [[1, 0, 0]]})
    assert isinstance(W, Subspace) and W.dim == 1


def test_strict_parsing():
    with pytest.raises(MalformedInput):
        io.spec_from_dict({"variant": "L1", "dim": 2, "p": 3})
    with pytest.raises(MalformedInput):
        io.spec_from_dict({"variant": "Banana", "dim": 2})
    with pytest.raises(MalformedInput):
        io.measure_from_json({"norm": {"variant": "L1", "dim": 2}, "atoms": [], "extra": 1})
    with pytest.raises(MalformedInput):
        io.decode_scalar("3")
    with pytest.raises(MalformedInput):
        from_dict({"coord": 0, "abs": {"coord": 1}})


# -- CLI ---------------------------------------------------------------------------------

def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) == 1, out
    return code, json.loads(lines[0])


def test_cli_dual_norm_example(tmp_path, capsys):
    spec = _write(tmp_path, "l1_3d.json", {"variant": "L1", "dim": 3})
    f = _write(tmp_path, "f.json", [1, -2, 3])
    code, out = _run(capsys, ["dual", "norm", "--spec", spec, "--functional", f])
    assert code == 0 and out["value"] == 3.0


def test_cli_missing_file(tmp_path, capsys):
    code, out = _run(capsys, ["dual", "norm", "--spec", str(tmp_path / "nope.json"),
                              "--functional", str(tmp_path / "f.json")])
    assert code == 2 and out["error"]["code"] == "FILE_NOT_FOUND"


def test_cli_domain_error_and_bad_usage(tmp_path, capsys):
    spec = _write(tmp_path, "s.json", {"variant": "L1", "dim": 2})
    v = _write(tmp_path, "v.json", [0, 0])
    code, out = _run(capsys, ["dual", "norming", "--spec", spec, "--vector", v])
    assert code == 1 and out["error"]["code"] == "ZERO_VECTOR"
    code, out = _run(capsys, ["dual", "frobnicate"])
    assert code == 2 and out["error"]["code"] == "MALFORMED_INPUT"
    bad = _write(tmp_path, "bad.json", {"variant": "L1", "dim": 2, "typo": 1})
    code, out = _run(capsys, ["norm", "eval", "--spec", bad, "--vector", v])
    assert code == 2


def test_cli_every_subcommand(tmp_path, capsys):
    spec = _write(tmp_path, "s.json", {"variant": "L1", "dim": 2})
    vec = _write(tmp_path, "v.json", [1, -2])
    code, out = _run(capsys, ["norm", "eval", "--spec", spec, "--vector", vec])
    assert out["value"] == 3.0
    assert io.spec_from_dict(out["norm"]) == L1Norm(2)
    code, out = _run(capsys, ["norm", "axioms", "--spec", spec, "--trials", "50"])
    assert out["ok"]
    code, out = _run(capsys, ["dual", "polar", "--spec", spec])
    assert io.spec_from_dict(out["norm"]) == LinfNorm(2)
    code, out = _run(capsys, ["dual", "norming", "--spec", spec, "--vector", vec])
    assert out["functional"] == [1.0, -1.0] and out["pairing"] == 3.0

    amap = _write(tmp_path, "a.json", {"domain": ["a", "b"], "columns": [[1, 2], [3, 0]]})
    code, out = _run(capsys, ["opnorm", "l1v", "--map", amap, "--norm", spec])
    assert (out["value"], out["witness_label"]) == (3.0, "a")
    tmap = _write(tmp_path, "t.json", {"codomain": ["a", "b"], "rows": [[1, 2], [0, -3]]})
    code, out = _run(capsys, ["opnorm", "vlinf", "--map", tmap, "--norm", spec])
    assert (out["value"], out["witness_label"]) == (3.0, "b")

    sub = _write(tmp_path, "w.json", {"ambient_dim": 2, "basis": [[1, 1]]})
    vals = _write(tmp_path, "y.json", [2])
    code, out = _run(capsys, ["extend", "--norm", spec, "--subspace", sub, "--values", vals,
                              "--bound", "1"])
    assert code == 0 and out["functional"] == [1.0, 1.0]
    assert out["ball_violation"] <= 1e-8 and len(out["steps"]) == 1
    img = _write(tmp_path, "img.json", {"codomain": ["p", "q"], "images": [[2, 2]]})
    code, out = _run(capsys, ["extend", "--norm", spec, "--subspace", sub, "--values", img,
                              "--bound", "1"])
    assert io.map_from_json(out["map"]).rows.tolist() == [[1.0, 1.0], [1.0, 1.0]]

    meas = _write(tmp_path, "m.json", {"norm": {"variant": "L1", "dim": 2}, "atoms": [
        {"point": [1, 0], "weight": 2}, {"point": [0, 1], "weight": -1}]})
    code, out = _run(capsys, ["measure", "tv", "--measure", meas])
    assert out["value"] == 3.0
    assert io.measure_from_json(out["canonical"]) == io.measure_from_json(json.load(open(meas)))
    code, out = _run(capsys, ["measure", "barycenter", "--measure", meas])
    assert out["barycenter"] == [2.0, -1.0]
    phi = _write(tmp_path, "phi.json", {"coord": 0})
    code, out = _run(capsys, ["measure", "multiply", "--measure", meas, "--function", phi])
    assert out["check"]["lhs"] == 2.0 and out["check"]["rhs"] == 3.0
    code, out = _run(capsys, ["measure", "integrate", "--measure", meas, "--function", phi])
    assert out["value"] == 2.0
    ident = _write(tmp_path, "id.json", {"identity": 2})
    code, out = _run(capsys, ["measure", "integrate", "--measure", meas, "--function", ident])
    assert out["vector"] == [2.0, -1.0]
    code, out = _run(capsys, ["measure", "nonneg", "--measure", meas])
    assert out["nonnegative"] is False
    tests = _write(tmp_path, "tests.json", [{"coord": 0}, {"coord": 1}])
    code, out = _run(capsys, ["measure", "gap", "--measure", meas, "--other", meas,
                              "--tests", tests])
    assert out["gap"] == 0.0
    e1 = _write(tmp_path, "e1.json", [1, 0])
    code, out = _run(capsys, ["measure", "dirac", "--spec", spec, "--vector", e1])
    assert io.measure_from_json(out["measure"]).weights.tolist() == [1.0]

    svg = tmp_path / "ball.svg"
    code, out = _run(capsys, ["plot", "--spec", spec, "--out", str(svg)])
    assert code == 0 and svg.read_text().startswith("<svg")


def test_cli_dump_lp(tmp_path, capsys):
    spec = _write(tmp_path, "s.json", {"variant": "PolyFacet", "functionals": [[1, 0], [0, 1], [1, 1]]})
    sub = _write(tmp_path, "w.json", {"ambient_dim": 2, "basis": [[1, 0]]})
    vals = _write(tmp_path, "y.json", [0.5])
    dump = tmp_path / "lps.json"
    code, out = _run(capsys, ["--dump-lp", str(dump), "extend", "--norm", spec,
                              "--subspace", sub, "--values", vals])
    assert code == 0
    lps = json.loads(dump.read_text())
    assert lps and all({"objective", "constraints", "bounds"} <= set(lp) for lp in lps)


def test_cli_display_tolerance(tmp_path, capsys, monkeypatch):
    spec = _write(tmp_path, "s.json", {"variant": "Lp", "dim": 2, "p": 2})
    vec = _write(tmp_path, "v.json", [1, 1])
    monkeypatch.setenv("NORMLAB_TOLERANCE", "1e-3")
    _, out = _run(capsys, ["norm", "eval", "--spec", spec, "--vector", vec])
    assert out["value"] == 1.414
    assert out["vector"] == [1.0, 1.0]


def test_cli_verify_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {"cases": [
        {"equation_id": "E13", "trials": 30, "config": {"adversarial": True}},
        {"equation_id": "E8", "trials": 10, "seed": 3},
        {"equation_id": "E18", "trials": 30, "config": {"dims": [2, 3]}}]})
    reports = []
    for k in range(2):
        out_path = tmp_path / f"r{k}.json"
        code, out = _run(capsys, ["verify", "run", "--config", cfg, "--seed", "7",
                                  "--out", str(out_path)])
        assert code == 0 and out["passed"]
        reports.append(out_path.read_bytes())
    assert reports[0] == reports[1]
    bad = _write(tmp_path, "bad.json", {"cases": [{"equation_id": "E99"}]})
    code, out = _run(capsys, ["verify", "run", "--config", bad])
    assert code == 2


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "normlab.cli", "plot", "--spec", "/nonexistent",
                           "--out", "/tmp/never.svg"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["error"]["code"] == "FILE_NOT_FOUND"


# -- plot ---------------------------------------------------------------------------------

def test_plot_l1_diamond_and_square(tmp_path):
    res = plot_balls(L1Norm(2), tmp_path / "a.svg")
    assert sorted(map(tuple, res["ball"].tolist())) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert sorted(map(tuple, res["dual_ball"].tolist())) == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    again = plot_balls(L1Norm(2))
    assert (tmp_path / "a.svg").read_text() == again["svg"]


def test_plot_circle_self_dual():
    res = plot_balls(EllipsoidNorm.identity(2))
    assert len(res["ball"]) == 256
    assert np.linalg.norm(res["ball"], axis=1) == pytest.approx(1.0)
    assert np.allclose(res["ball"], res["dual_ball"])


def test_plot_needs_dimension_two():
    from normlab.errors import Unsupported
    with pytest.raises(Unsupported):
        plot_balls(L1Norm(3))


def test_cli_problem_file(tmp_path, capsys):
    prob = _write(tmp_path, "p.json", {"task": "dual norm", "spec": {"variant": "L1", "dim": 3},
                                       "functional": [1, -2, 3]})
    code, out = _run(capsys, ["--problem", prob])
    assert code == 0 and out["value"] == 3.0
    prob = _write(tmp_path, "q.json", {"task": "extend", "norm": {"variant": "L1", "dim": 2},
                                       "subspace": [[1, 1]], "values": [2], "bound": 1})
    code, out = _run(capsys, ["--problem", prob])
    assert code == 0 and out["functional"] == [1.0, 1.0]
    typo = _write(tmp_path, "t.json", {"task": "dual norm", "spec": {"variant": "L1", "dim": 3},
                                       "functionl": [1, -2, 3]})
    code, out = _run(capsys, ["--problem", typo])
    assert code == 2 and out["error"]["code"] == "MALFORMED_INPUT"
    untagged = _write(tmp_path, "u.json", {"spec": {"variant": "L1", "dim": 3}})
    code, out = _run(capsys, ["--problem", untagged])
    assert code == 2
    code, out = _run(capsys, [])
    assert code == 2
