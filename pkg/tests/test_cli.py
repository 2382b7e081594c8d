import re
import subprocess
import sys

import numpy as np
import pytest

from dqlinalg import DQMatrix, matmul
from dqlinalg.cli import FormatError, format_dqm, main, parse_dqm, parse_report, read_dqm, write_dqm
from gen import rand_dq
from worked_examples import pair_one, pair_one_displayed_factors, pair_two


@pytest.fixture
def pair_two_files(tmp_path):
    A, B = pair_two()
    write_dqm(tmp_path / "A.dqm", A)
    write_dqm(tmp_path / "B.dqm", B)
    write_dqm(tmp_path / "C.dqm", DQMatrix.vstack([A, B]))
    return tmp_path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, parse_report(out.out) if code in (0, 4) else {}, out


def test_roundtrip_is_byte_identical(tmp_path):
    rng = np.random.default_rng(71)
    A = rand_dq(rng, 3, 2)
    text = format_dqm(A)
    assert format_dqm(parse_dqm(text)) == text
    write_dqm(tmp_path / "x.dqm", A)
    assert (tmp_path / "x.dqm").read_text() == text
    assert format_dqm(read_dqm(tmp_path / "x.dqm")) == text


@pytest.mark.parametrize("text", [
    "",
    "DQMAT v2 1 1\n0 0 0 0 0 0 0 0\n",
    "DQMAT v1 1 1\n0 0 0 0 0 0 0\n",
    "DQMAT v1 2 1\n0 0 0 0 0 0 0 0\n",
    "DQMAT v1 1 1\n0 0 0 nan 0 0 0 0\n",
    "DQMAT v1 1 1\n0 0 0 inf 0 0 0 0\n",
    "DQMAT v1 1 1\n0 0 0 x 0 0 0 0\n",
    "DQMAT v1 a 1\n",
])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        parse_dqm(text)


def test_parse_error_exit_code(tmp_path, capsys):
    (tmp_path / "bad.dqm").write_text("DQMAT v1 1 1\n1 2 3\n")
    code, _, out = run(["run", "svd", tmp_path / "bad.dqm"], capsys)
    assert code == 2 and "fields" in out.err


def test_run_svd_reports_sigma(pair_two_files, capsys):
    code, rep, _ = run(["run", "svd", pair_two_files / "C.dqm"], capsys)
    assert code == 0 and rep["pass"] == "true"
    sig = [tuple(float(v) for v in re.match(r"(.+?)([+-][^+-]+)eps$", s.strip()).groups())
           for s in rep["sigma"].split(",")]
    s2 = np.sqrt(2) / 2
    assert np.allclose(sig, [(s2, 1), (s2, 0), (s2, -1), (0, 1), (0, 1)], atol=1e-10)
    assert (pair_two_files / "C.svd.U.dqm").exists()
    assert (pair_two_files / "C.svd.report").exists()


def test_run_gsvd2_matches_example(pair_two_files, capsys):
    code, rep, _ = run(["run", "gsvd2", pair_two_files / "A.dqm", pair_two_files / "B.dqm"], capsys)
    assert code == 0 and rep["pass"] == "true"
    SA = read_dqm(rep["factor.SA"]).to_array()
    SB = read_dqm(rep["factor.SB"]).to_array()
    s2 = np.sqrt(2) / 2
    assert np.allclose([(SA[i, i, 0], SA[i, i, 4]) for i in range(3)], [(1, 0), (s2, 0), (0, 1)])
    assert np.allclose([(SB[i, i, 0], SB[i, i, 4]) for i in range(3)], [(0, 1), (s2, 0), (1, 0)])


def test_run_qr_zero_matrix(tmp_path, capsys):
    write_dqm(tmp_path / "empty.dqm", DQMatrix.zeros(3, 3))
    code, _, out = run(["run", "qr", tmp_path / "empty.dqm"], capsys)
    assert code == 3 and "ZeroMatrix" in out.err


def test_run_dimension_mismatch(tmp_path, capsys):
    write_dqm(tmp_path / "a.dqm", DQMatrix.eye(2))
    write_dqm(tmp_path / "b.dqm", DQMatrix.eye(3))
    code, _, out = run(["run", "ccd", tmp_path / "a.dqm", tmp_path / "b.dqm"], capsys)
    assert code == 3 and "DimensionMismatch" in out.err


def test_wrong_input_count(pair_two_files, capsys):
    code, _, _ = run(["run", "gsvd2", pair_two_files / "A.dqm"], capsys)
    assert code == 2


@pytest.mark.parametrize("command", ["qr", "svd", "gsvd1", "gsvd1-regular", "gsvd2", "ccd"])
def test_run_then_verify(pair_two_files, capsys, command, tmp_path):
    inputs = ["A.dqm"] if command in ("qr", "svd") else ["A.dqm", "B.dqm"]
    out_dir = tmp_path / "out"
    code, rep, _ = run(["run", command, *[pair_two_files / i for i in inputs], "--out-dir", out_dir],
                       capsys)
    assert code == 0, rep
    code, ver, _ = run(["verify", out_dir / f"A.{command}.report"], capsys)
    assert code == 0 and ver["pass"] == "true"


def test_run_psvd_and_product(tmp_path, capsys):
    rng = np.random.default_rng(72)
    write_dqm(tmp_path / "A.dqm", rand_dq(rng, 4, 3))
    write_dqm(tmp_path / "B.dqm", rand_dq(rng, 3, 2))
    for command in ("psvd", "product-svd"):
        code, rep, _ = run(["run", command, tmp_path / "A.dqm", tmp_path / "B.dqm"], capsys)
        assert code == 0 and rep["pass"] == "true"
        code, _, _ = run(["verify", tmp_path / f"A.{command}.report"], capsys)
        assert code == 0


def test_run_cs(tmp_path, capsys):
    from gen import householder_unitary
    W = householder_unitary(np.random.default_rng(73), 5)
    write_dqm(tmp_path / "W.dqm", W)
    code, rep, _ = run(["run", "cs", tmp_path / "W.dqm", "--split", 2, "--col-split", 3], capsys)
    assert code == 0 and rep["pass"] == "true"
    code, _, _ = run(["verify", tmp_path / "W.cs.report"], capsys)
    assert code == 0
    code, rep, _ = run(["run", "cs", tmp_path / "W.dqm", "--split", 2], capsys)
    assert code == 0  # without --col-split the unitary is treated as an isometry
    code, _, _ = run(["run", "cs", tmp_path / "W.dqm"], capsys)
    assert code == 2


def test_verify_detects_perturbation(pair_two_files, capsys):
    code, rep, _ = run(["run", "gsvd2", pair_two_files / "A.dqm", pair_two_files / "B.dqm"], capsys)
    assert code == 0
    path = rep["factor.X"]
    X = read_dqm(path).to_array()
    X[0, 0, 0] += 1e-3
    write_dqm(path, DQMatrix.from_array(X))
    code, ver, _ = run(["verify", pair_two_files / "A.gsvd2.report"], capsys)
    assert code == 4 and ver["pass"] == "false"
    assert 5e-4 < float(ver["residual_st"]) < 1e-2


def test_verify_detects_changed_input(pair_two_files, capsys):
    run(["run", "svd", pair_two_files / "C.dqm"], capsys)
    write_dqm(pair_two_files / "C.dqm", rand_dq(np.random.default_rng(74), 6, 5))
    code, ver, _ = run(["verify", pair_two_files / "C.svd.report"], capsys)
    assert code == 4 and ver["inputs_match"] == "false" and ver["pass"] == "false"


def test_verify_hand_written_pair_one_factors(tmp_path, capsys):
    A, B = pair_one()
    U, V, X, SA, SB = pair_one_displayed_factors()
    names = {"A": A, "B": B, "U": U, "V": V, "X": X, "SA": SA, "SB": SB}
    for k, M in names.items():
        write_dqm(tmp_path / f"{k}.dqm", M)
    report = ["command = gsvd1", "input.0 = A.dqm", "input.1 = B.dqm", "block.k = 3"]
    report += [f"factor.{k} = {k}.dqm" for k in ("U", "V", "X", "SA", "SB")]
    (tmp_path / "hand.report").write_text("\n".join(report) + "\n")
    code, ver, _ = run(["verify", tmp_path / "hand.report"], capsys)
    assert code == 0, ver
    assert float(ver["residual_st"]) < 1e-15 and float(ver["pairing"]) < 1e-15


def test_verify_layout_errors(tmp_path, capsys):
    (tmp_path / "r.report").write_text("command = nope\n")
    assert run(["verify", tmp_path / "r.report"], capsys)[0] == 2
    (tmp_path / "r.report").write_text("this is not a report\n")
    assert run(["verify", tmp_path / "r.report"], capsys)[0] == 2
    write_dqm(tmp_path / "A.dqm", DQMatrix.eye(2))
    (tmp_path / "r.report").write_text("command = svd\ninput.0 = A.dqm\nfactor.U = A.dqm\n")
    assert run(["verify", tmp_path / "r.report"], capsys)[0] == 2


def test_tolerance_flags(pair_two_files, capsys):
    code, rep, _ = run(["run", "svd", pair_two_files / "C.dqm", "--residual-tol", "1e-30"], capsys)
    assert code == 4 and rep["pass"] == "false"
    assert (pair_two_files / "C.svd.U.dqm").exists()
    code, _, out = run(["run", "svd", pair_two_files / "C.dqm", "--rank-tol", "-1"], capsys)
    assert code == 2


def test_console_entry_point(pair_two_files):
    proc = subprocess.run([sys.executable, "-m", "dqlinalg", "run", "svd", str(pair_two_files / "C.dqm")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "pass = true" in proc.stdout
