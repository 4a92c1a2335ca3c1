import json
import subprocess
import sys

import numpy as np
import pytest

from condsvd import read_matrix, write_matrix
from condsvd.cli import main
from condsvd.instances import random_general


def run(tmp_path, *argv):
    return main([str(a) for a in argv] + ["-q"])


def report(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture
def pair(tmp_path):
    assert run(tmp_path, "generate", "--dims", "5,4,3,3", "--seed", "42", "--out-prefix", tmp_path / "g") == 0
    return tmp_path / "g.A.mtx", tmp_path / "g.B.mtx"


def test_generate_decompose_verify(tmp_path, pair):
    a, b = pair
    rj = tmp_path / "d.json"
    assert run(tmp_path, "decompose", a, b, "--out-prefix", tmp_path / "f", "--report", rj) == 0
    rep = report(rj)
    assert rep["schema"] == 1
    assert rep["case"] == "Condition1" and rep["p"] == 3
    assert rep["exact"] and rep["residual_rel"] <= 1e-8
    assert rep["hh_hermitian"] and rep["mm_hermitian"]
    assert read_matrix(tmp_path / "f.H.mtx").shape == (5, 3)
    assert read_matrix(tmp_path / "f.M.mtx").shape == (4, 3)

    vj = tmp_path / "v.json"
    code = run(tmp_path, "verify", a, b, tmp_path / "f.H.mtx", tmp_path / "f.M.mtx", "--report", vj)
    assert code == 0
    assert report(vj)["residual_abs"] == rep["residual_abs"]


def test_svd(tmp_path, pair):
    rj = tmp_path / "s.json"
    assert run(tmp_path, "svd", pair[0], "--out-prefix", tmp_path / "s", "--report", rj) == 0
    u, s, v = (read_matrix(tmp_path / f"s.{x}.mtx") for x in "USV")
    a = read_matrix(pair[0])
    assert np.linalg.norm(a - u @ s @ v.conj().T) <= 1e-12 * np.linalg.norm(a)
    assert report(rj)["residual_rel"] <= 1e-12


def test_check_exit_codes(tmp_path):
    write_matrix(tmp_path / "a.mtx", random_general(2, 5, 1))
    write_matrix(tmp_path / "b.mtx", random_general(3, 4, 2))
    rj = tmp_path / "c.json"
    assert run(tmp_path, "check", tmp_path / "a.mtx", tmp_path / "b.mtx", "--report", rj) == 3
    rep = report(rj)
    assert rep["case"] == "Infeasible"
    assert any(v.startswith("m < k") for v in rep["violations"])

    write_matrix(tmp_path / "a2.mtx", random_general(4, 4, 1))
    assert run(tmp_path, "check", tmp_path / "a2.mtx", tmp_path / "b.mtx") == 0


def test_decompose_infeasible(tmp_path):
    write_matrix(tmp_path / "a.mtx", random_general(2, 5, 1))
    write_matrix(tmp_path / "b.mtx", random_general(3, 4, 2))
    code = run(tmp_path, "decompose", tmp_path / "a.mtx", tmp_path / "b.mtx", "--out-prefix", tmp_path / "f")
    assert code == 3
    assert not (tmp_path / "f.H.mtx").exists()


def test_decompose_singular_b(tmp_path, capsys):
    write_matrix(tmp_path / "a.mtx", random_general(3, 3, 1))
    write_matrix(tmp_path / "b.mtx", np.diag([1.0, 0.0]))
    code = run(tmp_path, "decompose", tmp_path / "a.mtx", tmp_path / "b.mtx", "--out-prefix", tmp_path / "f")
    assert code == 3
    assert "B singular within tolerance" in capsys.readouterr().err


def test_decompose_inexact(tmp_path):
    prefix = tmp_path / "t"
    assert run(tmp_path, "generate", "--dims", "4,4,2,2", "--tail", "1,0.5", "--seed", "3", "--out-prefix", prefix) == 0
    a, b = tmp_path / "t.A.mtx", tmp_path / "t.B.mtx"
    rj = tmp_path / "r.json"
    assert run(tmp_path, "decompose", a, b, "--out-prefix", tmp_path / "f", "--report", rj) == 4
    assert (tmp_path / "f.H.mtx").exists()
    assert report(rj)["residual_abs"] == pytest.approx(1.25**0.5, abs=1e-8)
    assert run(tmp_path, "decompose", a, b, "--out-prefix", tmp_path / "s", "--strict") == 4
    assert not (tmp_path / "s.H.mtx").exists()
    assert run(tmp_path, "verify", a, b, tmp_path / "f.H.mtx", tmp_path / "f.M.mtx") == 4


def test_special(tmp_path):
    assert run(tmp_path, "generate", "--psd", "5", "--seed", "7", "--out-prefix", tmp_path / "p") == 0
    rj = tmp_path / "r.json"
    code = run(tmp_path, "special", tmp_path / "p.A.mtx", tmp_path / "p.B.mtx", "--out-prefix", tmp_path / "o", "--report", rj)
    assert code == 0
    assert report(rj)["residual_rel"] <= 1e-8
    h = read_matrix(tmp_path / "o.H.mtx")
    a, b = read_matrix(tmp_path / "p.A.mtx"), read_matrix(tmp_path / "p.B.mtx")
    assert np.linalg.norm(a - h @ b @ h.conj().T) <= 1e-8 * max(1, np.linalg.norm(a))


def test_special_not_psd(tmp_path):
    write_matrix(tmp_path / "a.mtx", -np.eye(2))
    write_matrix(tmp_path / "b.mtx", np.eye(2))
    assert run(tmp_path, "special", tmp_path / "a.mtx", tmp_path / "b.mtx", "--out-prefix", tmp_path / "o") == 3


def test_generate_config(tmp_path):
    cfg = tmp_path / "gen.cfg"
    cfg.write_text("# planted instance\ndims = 6,5,3,4\nseed = 0x2a\ntail = 0.1\n")
    rj = tmp_path / "r.json"
    assert run(tmp_path, "generate", "--config", cfg, "--out-prefix", tmp_path / "g", "--report", rj) == 0
    cert = report(rj)["certificate"]
    assert cert["dims"] == [6, 5, 3, 4] and cert["seed"] == 42
    assert cert["residual"] == pytest.approx(0.1)
    # flags override the file
    assert run(tmp_path, "generate", "--config", cfg, "--seed", "1", "--out-prefix", tmp_path / "h", "--report", rj) == 0
    assert report(rj)["seed"] == 1


def test_generate_refuses_infeasible(tmp_path):
    assert run(tmp_path, "generate", "--dims", "2,5,3,4", "--out-prefix", tmp_path / "x") == 3


def test_generate_is_deterministic(tmp_path):
    for name in ("x", "y"):
        run(tmp_path, "generate", "--dims", "4,3,2,2", "--seed", "5", "--out-prefix", tmp_path / name)
    assert (tmp_path / "x.A.mtx").read_bytes() == (tmp_path / "y.A.mtx").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["decompose", "a.mtx"], ["generate", "--out-prefix", "x"], ["generate", "--dims", "1,2,x,4", "--out-prefix", "x"]],
)
def test_usage_errors(tmp_path, argv):
    assert main(argv) == 1


def test_io_errors(tmp_path):
    assert run(tmp_path, "svd", tmp_path / "missing.mtx", "--out-prefix", tmp_path / "s") == 2
    (tmp_path / "bad.mtx").write_text("%%MatrixMarket matrix array real general\n2 2\n1\n")
    assert run(tmp_path, "svd", tmp_path / "bad.mtx", "--out-prefix", tmp_path / "s") == 2


def test_verify_dim_mismatch(tmp_path):
    for name, arr in [("a", np.eye(3)), ("b", np.eye(2)), ("h", np.eye(3)), ("m", np.eye(2))]:
        write_matrix(tmp_path / f"{name}.mtx", arr)
    code = run(tmp_path, "verify", *(tmp_path / f"{x}.mtx" for x in "abhm"))
    assert code == 2


def test_text_summary(tmp_path, pair, capsys):
    main(["check", str(pair[0]), str(pair[1])])
    out = capsys.readouterr().out
    assert out.startswith("condsvd check: feasible (exit 0)")
    assert "case: Condition1" in out


def test_module_entry_point(tmp_path, pair):
    proc = subprocess.run(
        [sys.executable, "-m", "condsvd", "check", str(pair[0]), str(pair[1]), "-q"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr


def test_numerical_failure_exit_code(tmp_path, pair, monkeypatch):
    from condsvd import cli
    from condsvd.errors import ConvergenceError

    def boom(a):
        raise ConvergenceError("one-sided Jacobi did not converge in 60 sweeps")

    monkeypatch.setattr(cli, "full_svd", boom)
    assert run(tmp_path, "svd", pair[0], "--out-prefix", tmp_path / "s") == 5
