import io
import json
import os
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from dgheart.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")
GOLDEN = os.path.join(DATA, "golden")

# (golden file, argv relative to the data directory)
PINNED = [
    ("koszul_verify_polyXY.json", ["koszul", "verify", "polyXY.alg"]),
    ("minimize_cone_id.json", ["minimize", "cone_id.mod"]),
    ("decompose_MplusM.json", ["decompose", "MplusM.mod", "--seed", "1"]),
    ("socle_M.json", ["heart", "socle", "M.mod"]),
    ("koszul_check_D2.json", ["koszul", "check", "D2.alg", "--length", "2"]),
    ("fitting_nil.json", ["fitting", "M.mod", "-f", "nil.map"]),
    ("cokernel_j.json", ["heart", "cokernel", "-f", "j.map"]),
    ("ext_polyXY.json", ["koszul", "ext", "polyXY.alg"]),
]


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    args = [a if not a.endswith((".alg", ".mod", ".map")) else os.path.join(DATA, a) for a in argv]
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(args) + ["--output", "structured"])
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, _ = run(*argv)
    assert code == 0, out
    return json.loads(out)["result"]


def test_koszul_verify_two_variables():
    r = report("koszul", "verify", "polyXY.alg")
    assert r["ext_dims"] == [1, 2, 1] and r["end_dims"] == [1, 2, 1]
    assert r["isomorphism"] == "verified" and all(r["checks"].values())


def test_minimize_contractible_cone():
    r = report("minimize", "cone_id.mod")
    assert r["module"]["generators"] == [] and len(r["eliminations"]) == 1 and r["verified"]


def test_decompose_doubled_module():
    r = report("decompose", "MplusM.mod", "--seed", "1")
    assert len(r["summands"]) == 2
    assert r["isomorphic"] == [[True, True], [True, True]]
    assert r["certificates"] == ["local", "local"] and r["verified"]


def test_other_commands():
    assert report("validate", "D2.alg")["dims"] == [1, 1, 1]
    assert report("validate", "M.mod")["flag"] is True
    assert report("validate", "j.map")["chain_map"] is True
    assert report("info", "M.mod")["reduced_cohomology"] == {"0": 2}
    assert report("cone", "-f", "id_L.map")["module"]["generators"][1]["shift"] == 1
    assert len(report("normalize", "MplusM.mod")["module"]["generators"]) == 4
    t = report("truncate", "--at", "0", "M.mod")
    assert t["t_bounds"] == [0, 0] and t["ge"]["generators"] == []
    h = report("hom", "L.mod", "M.mod")
    assert h == {"degree": 0, "chain_maps": 1, "homotopy_classes": 1}
    assert report("heart", "jh", "M.mod") == {"multiplicities": {"v": 2}}
    assert report("heart", "injective", "M.mod") == {"injective": True}
    assert report("heart", "kernel", "-f", "j.map")["module"]["generators"] == []
    assert len(report("heart", "image", "-f", "j.map")["module"]["generators"]) == 1
    k = report("koszul", "resolve", "polyX.alg")
    assert k["finite"] and [len(t) for t in k["terms"]] == [1, 1]
    assert len(report("koszul", "module", "polyXY.alg")["module"]["generators"]) == 4


def test_domain_errors_exit_one():
    code, out, _ = run("koszul", "ext", "D2.alg", "--length", "2")
    assert code == 1 and json.loads(out)["error"] == "NotKoszul"
    code, out, _ = run("koszul", "check", "D2.alg", "--length", "3")
    assert code == 1 and json.loads(out)["error"] == "DegreeCapExceeded"
    code, out, _ = run("heart", "kernel", "-f", "nil.map")
    assert code == 0
    code, out, _ = run("validate", "missing.mod")
    assert code == 1 and json.loads(out)["error"] == "ParseError"


def test_validation_error_names_the_cause(tmp_path):
    doc = json.loads(open(os.path.join(DATA, "L.mod")).read())
    doc["algebra_ref"] = os.path.join(DATA, "D2.alg")
    doc["generators"][0]["vertex"] = "w"
    p = tmp_path / "bad.mod"
    p.write_text(json.dumps(doc))
    code, out, _ = run("validate", str(p))
    rep = json.loads(out)
    assert code == 1 and rep["error"] == "VertexMismatch"
    assert out.count("VertexMismatch") == 1


def test_usage_errors_exit_two():
    assert run("frobnicate")[0] == 2
    code, _, err = run("truncate", "M.mod")
    assert code == 2 and "--at" in err
    code, _, err = run("heart", "kernel")
    assert code == 2 and "-f" in err
    assert run("decompose", "M.mod", "--seed", "abc")[0] == 2


def test_global_flags_before_subcommand():
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(["--output", "structured", "heart", "jh", os.path.join(DATA, "M.mod")])
    assert code == 0 and json.loads(out.getvalue())["result"]["multiplicities"] == {"v": 2}


def test_text_output():
    out = io.StringIO()
    with redirect_stdout(out):
        assert main(["heart", "injective", os.path.join(DATA, "M.mod")]) == 0
    assert "injective: true" in out.getvalue()


@pytest.mark.parametrize("golden, argv", PINNED)
def test_structured_reports_are_pinned(golden, argv):
    code, out, _ = run(*argv)
    assert code == 0
    with open(os.path.join(GOLDEN, golden), encoding="utf-8") as fh:
        assert out == fh.read()
    assert run(*argv)[1] == out


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "dgheart", "decompose", os.path.join(DATA, "MplusM.mod"), "--seed", "3", "--output", "structured"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and json.loads(a)["command"] == "decompose"
