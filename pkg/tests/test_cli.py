import csv
import json
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cspx import fileio
from cspx.cli import main

STATUSES = {"Converged", "MaxItersReached", "InfeasibleInput", "NoRoot", "LineSearchStalled"}


def reports(out: str):
    lines = [ln for ln in out.splitlines() if ln.strip()]
    recs = [json.loads(ln) for ln in lines]
    for rec in recs:
        assert set(fileio.REPORT_KEYS) <= set(rec)
        assert rec["status"] in STATUSES
    return recs


# --- file format ---------------------------------------------------------

@given(arrays(np.float64, st.integers(0, 50), elements=st.floats(allow_nan=True, allow_infinity=True)))
def test_vector_roundtrip_bit_exact(tmp_path_factory, x):
    path = tmp_path_factory.mktemp("rt") / "v.cspx"
    fileio.write_vector(path, x)
    back = fileio.read_vector(path)
    assert back.tobytes() == x.tobytes()


def test_vector_header_layout(tmp_path):
    path = tmp_path / "v.cspx"
    fileio.write_vector(path, [1.5, -2.0])
    raw = path.read_bytes()
    assert raw[:4] == b"CSPX"
    assert struct.unpack("<IQ", raw[4:16]) == (1, 2)
    assert struct.unpack("<2d", raw[16:]) == (1.5, -2.0)


def test_matrix_roundtrip(tmp_path):
    A = np.arange(12.0).reshape(3, 4)
    fileio.write_matrix(tmp_path / "A.cspx", A)
    raw = (tmp_path / "A.cspx").read_bytes()
    assert struct.unpack("<IQQ", raw[4:24]) == (2, 12, 3)
    np.testing.assert_array_equal(fileio.read_matrix(tmp_path / "A.cspx"), A)


@pytest.mark.parametrize("blob", [
    b"CSPX",                                            # truncated header
    b"CSPX" + struct.pack("<IQ", 1, 3) + b"\0" * 16,    # short payload
    b"CSPX" + struct.pack("<IQ", 7, 0),                 # unknown version
    b"",                                                # empty text
    b"0.1\nabc\n",                                      # bad number
])
def test_malformed_inputs(tmp_path, blob):
    path = tmp_path / "bad"
    path.write_bytes(blob)
    with pytest.raises(fileio.FormatError):
        fileio.read_array(path)


def test_text_input_accepts_scientific(tmp_path):
    path = tmp_path / "y.txt"
    path.write_text("1e-1\n-2.5E+0\n  3\n")
    np.testing.assert_array_equal(fileio.read_vector(path), [0.1, -2.5, 3.0])


def test_report_line_nonfinite_to_null():
    rec = json.loads(fileio.report_line("newton", 3, 1.5, "equality", 0, float("nan"), 0.0, None, "InfeasibleInput"))
    assert rec["feasibility_gap"] is None


# --- project -------------------------------------------------------------

def test_project_toy(tmp_path, capsys):
    src = tmp_path / "y.txt"
    src.write_text("0.1\n1.5\n-1\n")
    out = tmp_path / "x.cspx"
    code = main(["project", str(src), "--k", "1.5", "--variant", "equality", "--method", "newton", "--out", str(out)])
    assert code == 0
    np.testing.assert_allclose(fileio.read_vector(out), [0.5, 1.0, 0.0], atol=1e-12)
    (rec,) = reports(capsys.readouterr().out)
    assert rec["method"] == "newton" and rec["n"] == 3 and rec["status"] == "Converged"
    assert rec["feasibility_gap"] <= 1e-12


def test_project_toy_from_gamma0_takes_two_iterations(tmp_path, capsys):
    src = tmp_path / "y.txt"
    src.write_text("0.1\n1.5\n-1\n")
    assert main(["project", str(src), "--k", "1.5", "--gamma0", "-1.1", "--out", str(tmp_path / "x.cspx")]) == 0
    (rec,) = reports(capsys.readouterr().out)
    assert rec["iterations"] == 2
    assert rec["gamma"] == pytest.approx(-0.4, abs=1e-12)


def test_project_methods_agree(tmp_path, capsys):
    src = tmp_path / "y.txt"
    src.write_text("0.1\n1.5\n-1\n")
    for method in ("newton", "sort", "bisect"):
        assert main(["project", str(src), "--k", "1.5", "--method", method, "--out", str(tmp_path / f"{method}.cspx")]) == 0
    recs = reports(capsys.readouterr().out)
    xs = [fileio.read_vector(tmp_path / f"{m}.cspx") for m in ("newton", "sort", "bisect")]
    for x in xs[1:]:
        np.testing.assert_allclose(x, xs[0], atol=1e-12)
    assert [r["method"] for r in recs] == ["newton", "sort", "bisect"]


def test_project_binary_input(tmp_path, capsys):
    fileio.write_vector(tmp_path / "y.cspx", [2.0, 2.0])
    assert main(["project", str(tmp_path / "y.cspx"), "--k", "1", "--variant", "inequality",
                 "--out", str(tmp_path / "x.cspx")]) == 0
    np.testing.assert_allclose(fileio.read_vector(tmp_path / "x.cspx"), [0.5, 0.5])


def test_project_empty_file_exits_1(tmp_path, capsys):
    (tmp_path / "empty").write_text("")
    assert main(["project", str(tmp_path / "empty"), "--k", "1", "--out", str(tmp_path / "x")]) == 1
    assert "empty" in capsys.readouterr().err


def test_project_negative_k_exits_2(tmp_path, capsys):
    (tmp_path / "y.txt").write_text("0.1\n1.5\n-1\n")
    assert main(["project", str(tmp_path / "y.txt"), "--k", "-1", "--out", str(tmp_path / "x")]) == 2
    (rec,) = reports(capsys.readouterr().out)
    assert rec["status"] == "InfeasibleInput"


def test_project_max_iters_exits_3(tmp_path, capsys):
    y = np.random.default_rng(0).uniform(-0.5, 0.5, 5000)
    fileio.write_vector(tmp_path / "y.cspx", y)
    assert main(["project", str(tmp_path / "y.cspx"), "--k", "50", "--max-iters", "1",
                 "--out", str(tmp_path / "x")]) == 3
    (rec,) = reports(capsys.readouterr().out)
    assert rec["status"] == "MaxItersReached"


# --- bench ---------------------------------------------------------------

def test_bench_two_methods(tmp_path, capsys):
    csv_out = tmp_path / "bench.csv"
    code = main(["bench", "--n", "1000", "--k", "10", "--alpha", "0.5", "--trials", "1",
                 "--method", "newton,sort", "--seed", "3", "--out", str(csv_out)])
    assert code == 0
    recs = reports(capsys.readouterr().out)
    assert {r["method"] for r in recs} == {"newton", "sort"}
    assert all(r["feasibility_gap"] <= 1e-8 for r in recs)
    rows = list(csv.DictReader(csv_out.open()))
    assert list(rows[0]) == ["method", "n", "k", "alpha", "trials", "time_mean", "time_std", "iters_mean", "iters_std"]
    assert [r["method"] for r in rows] == ["newton", "sort"]


def test_bench_appends(tmp_path, capsys):
    csv_out = tmp_path / "bench.csv"
    for _ in range(2):
        main(["bench", "--n", "50", "--k", "5", "--trials", "2", "--out", str(csv_out)])
    rows = list(csv.DictReader(csv_out.open()))
    assert len(rows) == 2


def test_bench_single_element(capsys):
    assert main(["bench", "--n", "1", "--k", "0.5", "--trials", "3", "--method", "newton,sort,bisect"]) == 0
    recs = reports(capsys.readouterr().out)
    assert len(recs) == 9


def test_bench_random_k_and_determinism(capsys):
    main(["bench", "--n", "200", "--trials", "4", "--seed", "9"])
    a = reports(capsys.readouterr().out)
    main(["bench", "--n", "200", "--trials", "4", "--seed", "9"])
    b = reports(capsys.readouterr().out)
    strip = lambda rs: [{k: v for k, v in r.items() if k != "wall_time_seconds"} for r in rs]  # noqa: E731
    assert strip(a) == strip(b)
    assert all(1 <= r["k"] <= 199 for r in a)
    assert [r["seed"] for r in a] == [9, 10, 11, 12]


def test_bench_worker_pool_matches_serial(monkeypatch, capsys):
    main(["bench", "--n", "300", "--k", "7", "--trials", "6", "--seed", "1"])
    serial = reports(capsys.readouterr().out)
    monkeypatch.setenv("CSPX_THREADS", "3")
    main(["bench", "--n", "300", "--k", "7", "--trials", "6", "--seed", "1"])
    pooled = reports(capsys.readouterr().out)
    assert [(r["seed"], r["iterations"], r["feasibility_gap"]) for r in serial] == \
        [(r["seed"], r["iterations"], r["feasibility_gap"]) for r in pooled]


def test_bench_unknown_method(capsys):
    assert main(["bench", "--n", "10", "--k", "1", "--trials", "1", "--method", "gurobi"]) == 1


# --- regress -------------------------------------------------------------

def _simulate(tmp_path, **kw):
    args = dict(m=30, n=60, p=0.2, k_true=4, snr=6.0, seed=1)
    args.update(kw)
    d = tmp_path / "data"
    code = main(["regress", "simulate", "--m", str(args["m"]), "--n", str(args["n"]), "--p", str(args["p"]),
                 "--k-true", str(args["k_true"]), "--snr", str(args["snr"]), "--seed", str(args["seed"]),
                 "--out", str(d)])
    assert code == 0
    return d


def test_regress_simulate_then_fit(tmp_path, capsys):
    d = _simulate(tmp_path)
    X = fileio.read_matrix(d / "X.cspx")
    assert X.shape == (30, 60)
    out = tmp_path / "fit"
    code = main(["regress", "fit", "--X", str(d / "X.cspx"), "--y", str(d / "y.cspx"), "--k", "4",
                 "--w-true", str(d / "w_true.cspx"), "--out", str(out)])
    assert code == 0
    (rec,) = reports(capsys.readouterr().out)
    assert 0.0 <= rec["acc"] <= 1.0
    assert rec["rho"] == pytest.approx(1 / np.sqrt(30))
    u = fileio.read_vector(out / "u.cspx")
    w = fileio.read_vector(out / "w.cspx")
    assert np.all((u >= 0) & (u <= 1)) and u.sum() <= 4 + 1e-8
    assert np.count_nonzero(w) <= 4
    support = [int(s) for s in (out / "support.txt").read_text().split()]
    assert support == np.flatnonzero(w).tolist() == rec["support"]
    trace = fileio.read_vector(out / "objective_trace.cspx")
    assert trace.size == rec["iterations"] + 1


def test_regress_cli_deterministic(tmp_path, capsys):
    d1 = _simulate(tmp_path / "a")
    d2 = _simulate(tmp_path / "b")
    for name in ("X.cspx", "y.cspx", "w_true.cspx"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    for tag in ("f1", "f2"):
        main(["regress", "fit", "--X", str(d1 / "X.cspx"), "--y", str(d1 / "y.cspx"), "--k", "4",
              "--out", str(tmp_path / tag)])
    for name in ("u.cspx", "w.cspx", "objective_trace.cspx", "support.txt"):
        assert (tmp_path / "f1" / name).read_bytes() == (tmp_path / "f2" / name).read_bytes()


def test_regress_fit_full_cap(tmp_path, capsys):
    d = _simulate(tmp_path, m=20, n=6, k_true=2)
    code = main(["regress", "fit", "--X", str(d / "X.cspx"), "--y", str(d / "y.cspx"), "--k", "6",
                 "--out", str(tmp_path / "fit")])
    assert code == 0
    (rec,) = reports(capsys.readouterr().out)
    assert rec["support_size"] == 6


def test_regress_fit_dimension_mismatch(tmp_path, capsys):
    d = _simulate(tmp_path)
    fileio.write_vector(tmp_path / "short.cspx", np.ones(29))
    code = main(["regress", "fit", "--X", str(d / "X.cspx"), "--y", str(tmp_path / "short.cspx"), "--k", "4",
                 "--out", str(tmp_path / "fit")])
    assert code == 2


def test_regress_fit_missing_file(tmp_path, capsys):
    assert main(["regress", "fit", "--X", str(tmp_path / "nope"), "--y", str(tmp_path / "nope"), "--k", "1",
                 "--out", str(tmp_path / "fit")]) == 1
