import json
import subprocess
import sys

import numpy as np
import pytest

from tightcs.cli import main
from tightcs.mmio import read_matrix, read_vector, write_vector


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 else None), err


@pytest.fixture
def instance(tmp_path, capsys):
    D, A = tmp_path / "D.mtx", tmp_path / "A.mtx"
    assert run(capsys, "frame", "gen", "--kind", "random_onb", "--n", 12, "--seed", 1, "--out", D)[0] == 0
    assert run(capsys, "sense", "gen", "--kind", "gaussian", "--m", 8, "--n", 12, "--seed", 2, "--out", A)[0] == 0
    f = np.zeros(12)
    f[[2, 7]] = [1.0, -1.0]
    f = read_matrix(str(D)) @ f
    y = tmp_path / "y.mtx"
    write_vector(str(y), read_matrix(str(A)) @ f)
    return {"A": A, "D": D, "y": y, "f": f, "dir": tmp_path}


def test_frame_gen_is_tight(instance):
    D = read_matrix(str(instance["D"]))
    assert np.linalg.norm(D @ D.T - np.eye(12)) <= 1e-10


def test_drip_exact_and_mc(instance, capsys):
    code, exact, _ = run(capsys, "drip", "--A", instance["A"], "--D", instance["D"], "--s", 2)
    assert code == 0 and exact["delta"] >= 0
    code, mc, _ = run(capsys, "drip", "--A", instance["A"], "--D", instance["D"], "--s", 2,
                      "--mode", "mc", "--trials", 200)
    assert code == 0 and mc["delta"] <= exact["delta"] + 1e-12


@pytest.mark.parametrize("method,flag", [("abp", "--eps"), ("ads", "--lambda"), ("alasso", "--mu")])
def test_recover_noiseless(instance, capsys, method, flag):
    out = instance["dir"] / f"{method}.mtx"
    code, rep, _ = run(capsys, "recover", "--method", method, "--A", instance["A"], "--D", instance["D"],
                       "--y", instance["y"], flag, "1e-7" if method != "abp" else 0, "--engine", "pdhg",
                       "--max-iter", 100000,
                       "--out", out)
    assert code == 0 and rep["converged"]
    assert np.linalg.norm(read_vector(str(out)) - instance["f"]) <= 1e-3


def test_recover_separation_writes_both(instance, capsys):
    out, e_out = instance["dir"] / "f.mtx", instance["dir"] / "e.mtx"
    code, rep, _ = run(capsys, "recover", "--method", "sabp", "--A", instance["A"], "--D", instance["D"],
                       "--y", instance["y"], "--eps", 0.0, "--out", out, "--e-out", e_out)
    assert code == 0
    assert read_vector(str(out)).shape == (12,) and read_vector(str(e_out)).shape == (8,)


def test_recover_paper_formula(instance, capsys):
    code, rep, _ = run(capsys, "recover", "--method", "ads", "--A", instance["A"], "--D", instance["D"],
                       "--y", instance["y"], "--paper-formula", "--sigma", 0.01,
                       "--out", instance["dir"] / "f.mtx")
    assert code == 0
    assert rep["param"] == pytest.approx(2 * 0.01 * np.sqrt(2 * np.log(12)))


def test_recover_missing_parameter(instance, capsys):
    code, _, err = run(capsys, "recover", "--method", "ads", "--A", instance["A"], "--D", instance["D"],
                       "--y", instance["y"], "--out", instance["dir"] / "f.mtx")
    assert code == 2 and "--lambda" in err


def test_bound_commands(capsys):
    assert run(capsys, "bound", "--which", "ads", "--s", 1, "--lambda", 1)[1]["bound"] == pytest.approx(4 * np.sqrt(2))
    assert run(capsys, "bound", "--which", "alasso", "--mu", 1)[1]["bound"] == pytest.approx(6 * np.sqrt(2))
    rep = run(capsys, "bound", "--which", "separation", "--variant", "sads", "--lambda", 1, "--s-prime", 3)[1]
    assert rep["bound"] == pytest.approx(8 * np.sqrt(2))
    assert run(capsys, "bound", "--which", "abp", "--tail", 2, "--s", 4, "--eps", 0.5,
               "--C2", 1, "--C3", 1)[1]["bound"] == pytest.approx(1.5)
    mm = run(capsys, "bound", "--which", "minimax", "--s", 4, "--sigma", 1, "--delta", 0.2)[1]
    assert mm["lower"] == pytest.approx(10 / 3)
    pl = run(capsys, "bound", "--which", "powerlaw", "--R", 2, "--p", 1, "--sigma", 1,
             "--d", np.e, "--s", 3)[1]
    assert pl["k_star"] == 2 and pl["bound"] == pytest.approx(4.0)


def test_bound_hypothesis_error(capsys):
    code, _, err = run(capsys, "bound", "--which", "ads", "--delta", 0.5)
    assert code == 2 and "hypothesis violated" in err


def test_minimax_unbounded(tmp_path, capsys):
    from tightcs.mmio import write_matrix

    write_matrix(str(tmp_path / "P.mtx"), np.array([[1.0, 0.0], [2.0, 0.0]]))
    rep = run(capsys, "bound", "--which", "minimax", "--phi", tmp_path / "P.mtx", "--s", 2)[1]
    assert rep["unbounded"] and rep["trace_risk"] is None


def test_probe(capsys):
    code, rep, _ = run(capsys, "probe", "--event", "gn", "--sigma", 0, "--m", 50, "--trials", 1000)
    assert code == 0 and rep["rate"] == 1.0 and rep["consistent"]


def test_experiment_and_report(tmp_path, capsys):
    plan = {
        "frame": {"kind": "random_onb", "n": 10}, "sensing": {"kind": "gaussian", "m": 7},
        "signal": {"model": "exact_analysis_sparse", "s": 1}, "noise": {"model": "none"},
        "methods": [{"name": "abp", "value": 0.0}], "sweep": {"m": [5, 7]},
        "trials_per_cell": 2, "master_seed": 1, "outputs": {},
    }
    (tmp_path / "plan.json").write_text(json.dumps(plan))
    code, rep, _ = run(capsys, "experiment", "run", tmp_path / "plan.json", "--out-dir", tmp_path / "a")
    assert code == 0 and rep["records"] == 4
    code, _, _ = run(capsys, "experiment", "run", tmp_path / "plan.json", "--out-dir", tmp_path / "b",
                     "--workers", 2)
    assert (tmp_path / "a" / "records.csv").read_bytes() == (tmp_path / "b" / "records.csv").read_bytes()
    code, rep, _ = run(capsys, "report", "--format", "plotdata", "--out", tmp_path / "p.dat",
                       "--records", tmp_path / "a" / "records.json")
    assert code == 0 and (tmp_path / "p.dat").read_text().startswith("# method=abp x=m")
    code, _, _ = run(capsys, "report", "--format", "csv", "--out", tmp_path / "c.csv",
                     "--records", tmp_path / "a" / "records.csv")
    assert (tmp_path / "c.csv").read_bytes() == (tmp_path / "a" / "records.csv").read_bytes()


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "drip", "--A", tmp_path / "nope.mtx", "--D", tmp_path / "nope.mtx", "--s", 1)
    assert code == 2 and err.startswith("error:")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tightcs", "bound", "--which", "ads", "--lambda", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["k_star"] == 1
