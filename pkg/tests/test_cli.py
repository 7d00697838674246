import json
import random
import subprocess
import sys

from skeinlab.cli import main
from skeinlab.ribbon_backend import make_backend, simple
from skeinlab.skein_algebra import loop_element, mu, random_element
from skeinlab.surface import annulus, disk_with_two_points
from skeinlab.tangle import Cell, Strand, TangleWord


def run_cli(args, tmp_path=None):
    import io
    from contextlib import redirect_stdout, redirect_stderr

    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


def test_eval_tangle(tmp_path):
    w = TangleWord((Strand(1, 1), Strand(1, 1)), ((Cell("braid+", 0),), (Cell("braid-", 0),)), {})
    path = tmp_path / "word.json"
    path.write_text(json.dumps(w.to_json()))
    code, out, _ = run_cli(["eval-tangle", str(path), "--backend", "quantum", "--order", "3"])
    assert code == 0
    data = json.loads(out)
    # R2: the evaluation is the identity matrix
    assert all(v == ["1", "0", "0"] for v in data["entries"].values())


def test_product_and_sigma(tmp_path):
    cl = make_backend("classical")
    ann = annulus()
    tr = loop_element(cl, ann, [[0]])
    left = tmp_path / "a.json"
    right = tmp_path / "b.json"
    left.write_text(json.dumps(tr.to_json()))
    right.write_text(json.dumps(tr.to_json()))
    code, out, _ = run_cli(["product", str(left), str(right)])
    assert code == 0
    code, out_g, _ = run_cli(["sigma", str(left), str(right), "--method", "goldman"])
    assert code == 0
    code, out_a, _ = run_cli(["sigma", str(left), str(right), "--method", "algebraic"])
    assert code == 0
    ga = json.loads(out_g)
    aa = json.loads(out_a)
    assert ga.pop("method") == "goldman" and aa.pop("method") == "algebraic"
    assert ga == aa  # identical payloads (both vanish here)


def test_fuse_command(tmp_path):
    disk = disk_with_two_points()
    path = tmp_path / "disk.json"
    path.write_text(json.dumps(disk.to_json()))
    code, out, _ = run_cli(["fuse", str(path), "0", "1"])
    assert code == 0
    assert json.loads(out)["vertices"] == 1


def test_verify_exit_codes_and_determinism(tmp_path):
    args = ["verify", "--suite", "torsion", "--backend", "quantum", "--order", "2", "--seed", "3"]
    code1, out1, _ = run_cli(args)
    code2, out2, _ = run_cli(args)
    assert code1 == code2 == 0
    r1, r2 = json.loads(out1), json.loads(out2)
    r1.pop("elapsed_ms")
    r2.pop("elapsed_ms")
    assert r1 == r2  # byte-identical up to timing


def test_malformed_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(["eval-tangle", str(bad)])
    assert code == 2


def test_unknown_backend_exit_2(tmp_path):
    w = TangleWord((Strand(1, 1),), (), {})
    path = tmp_path / "w.json"
    path.write_text(json.dumps(w.to_json()))
    code, out, err = run_cli(["eval-tangle", str(path), "--backend", "nonsense"])
    assert code == 2


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("SKEINLAB_SEED", "11")
    code, out, _ = run_cli(["verify", "--suite", "torsion"])
    assert code == 0
    assert json.loads(out)["seed"] == 11
