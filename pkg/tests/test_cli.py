"""End-to-end tests of the command-line interface.

Everything runs through ``main(argv)`` so exit codes and output files are
exercised exactly as a shell user would see them.
"""

import json
import math

import numpy as np
import pytest

from sparselimits.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = [l for l in text.strip().split("\n") if l]
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


# ------------------------------------------------------------------- bound

def test_bound_single_row(capsys):
    code, out, _ = run_cli(capsys, "bound", "--n", "1024", "--d", "512",
                           "--k", "32", "--snr", "900")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["value", "clamped"]
    assert 0.0 <= float(rows[0][0]) <= 1.0


def test_bound_noisy_path_via_nu(capsys):
    code, out, _ = run_cli(capsys, "bound", "--n", "1024", "--d", "512",
                           "--k", "32", "--snr", "900", "--nu", "1")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][0]) == pytest.approx(5.3280293734555e-9, rel=1e-6)


def test_bound_sweep(capsys, tmp_path):
    out_file = str(tmp_path / "sweep.csv")
    code, _, _ = run_cli(capsys, "bound", "--n", "256", "--d", "64", "--k", "4",
                         "--snr", "100", "--sweep", "rho=0:0.2:0.8",
                         "--out", out_file)
    assert code == 0
    header, rows = parse_csv(open(out_file).read())
    assert header == ["rho", "value", "clamped"]
    assert len(rows) == 5
    values = [float(r[1]) for r in rows]
    assert values == sorted(values)  # bound worsens with correlation


def test_bound_partial_alpha(capsys):
    code, out, _ = run_cli(capsys, "bound", "--n", "256", "--d", "64", "--k", "8",
                           "--snr", "40", "--alpha", "0.5")
    assert code == 0


def test_bad_parameter_exits_2(capsys):
    code, _, err = run_cli(capsys, "bound", "--n", "128", "--d", "64",
                           "--k", "4", "--snr", "100", "--rho", "1.5")
    assert code == 2
    assert "rho" in err


# ------------------------------------------------------ mi / complexity / snr

def test_mi_row(capsys):
    code, out, _ = run_cli(capsys, "mi", "--n", "100", "--d", "8", "--k", "1",
                           "--snr", "100", "--i", "1")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][0]) == pytest.approx(0.5, rel=1e-12)


def test_sample_complexity_necessary(capsys):
    code, out, _ = run_cli(capsys, "sample-complexity", "--d", "512", "--k", "32",
                           "--snr", str(100 * math.log2(512)))
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["feasible", "n_required", "binding_i"]
    assert rows[0][0] == "1"
    assert int(rows[0][1]) > 0


def test_sample_complexity_sufficient_infeasible(capsys):
    code, out, _ = run_cli(capsys, "sample-complexity", "--d", "64", "--k", "4",
                           "--snr", "100", "--rho", "1", "--criterion",
                           "sufficient", "--target-pe", "0.001")
    assert code == 0
    _, rows = parse_csv(out)
    assert rows[0][0] == "0" and rows[0][1] == "-1"


def test_snr_cutoff_row(capsys):
    code, out, _ = run_cli(capsys, "snr-cutoff", "--d", "512", "--k", "32",
                           "--snr", "1")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][0]) == pytest.approx(9.986, rel=1e-3)


# ---------------------------------------------------------------- exponent

def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"channel": "group_testing", "k": 2, "p": 0.5}))
    return str(path)


def test_exponent_single_delta(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "exponent", "--model", model_file(tmp_path),
                           "--i", "1", "--delta", "0.5")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][1]) == pytest.approx(0.228446696836388, rel=1e-9)


def test_exponent_delta_sweep(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "exponent", "--model", model_file(tmp_path),
                           "--i", "1", "--delta-sweep", "0:0.25:1")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["delta", "eo_bits"]
    assert len(rows) == 5
    assert float(rows[0][1]) == pytest.approx(0.0, abs=1e-10)


def test_exponent_check_derivative(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "exponent", "--model", model_file(tmp_path),
                           "--i", "1", "--check-derivative", "1e-3")
    assert code == 0
    _, rows = parse_csv(out)
    lhs, rhs = float(rows[0][0]), float(rows[0][1])
    assert abs(lhs - rhs) <= 1e-2 * max(1.0, rhs)


def test_exponent_general_bound(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "exponent", "--model", model_file(tmp_path),
                           "--bound-n", "40", "--bound-d", "8")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][0]) == pytest.approx(1.2078165610451778e-4, rel=1e-9)


def test_exponent_explicit_model_json(capsys, tmp_path):
    doc = {
        "x_alphabet": [0, 1], "y_alphabet": [0, 1], "k": 1,
        "x_pmf": [0.5, 0.5],
        "y_given_xs": [[1.0, 0.0], [0.0, 1.0]],
    }
    path = tmp_path / "explicit.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run_cli(capsys, "exponent", "--model", str(path),
                           "--i", "1", "--delta", "1")
    assert code == 0
    _, rows = parse_csv(out)
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-12)


def test_exponent_bad_model_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"channel": "group_testing", "k": 2, "p": 0.5,
                                "bogus": 1}))
    code, _, err = run_cli(capsys, "exponent", "--model", str(path))
    assert code == 2 and "bogus" in err


# ------------------------------------------------------------------- decode

def test_decode_omp_one_shot(capsys, tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((30, 10))
    beta = np.zeros(10)
    beta[[2, 5]] = (1.0, -2.0)
    y = x @ beta
    np.savetxt(tmp_path / "x.csv", x, fmt="%.17g", delimiter=",")
    np.savetxt(tmp_path / "y.csv", y, fmt="%.17g", delimiter=",")
    code, out, _ = run_cli(capsys, "decode", "--x", str(tmp_path / "x.csv"),
                           "--y", str(tmp_path / "y.csv"),
                           "--decoder", "omp", "--k", "2")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["support", "iterations", "converged", "objective"]
    assert rows[0][0] == "2;5"


def test_decode_lasso_needs_snr_or_lambda(capsys, tmp_path):
    np.savetxt(tmp_path / "x.csv", np.eye(3), fmt="%g", delimiter=",")
    np.savetxt(tmp_path / "y.csv", np.ones(3), fmt="%g", delimiter=",")
    code, _, err = run_cli(capsys, "decode", "--x", str(tmp_path / "x.csv"),
                           "--y", str(tmp_path / "y.csv"),
                           "--decoder", "lasso", "--k", "1")
    assert code == 2 and "snr" in err.lower()


def test_decode_missing_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "decode", "--x", "/nope.csv", "--y", "/nope.csv",
                           "--decoder", "omp", "--k", "1")
    assert code == 2 and "nope" in err


# ----------------------------------------------------------------- simulate

def write_config(tmp_path, **overrides):
    raw = {
        "base": {"dimension": 10, "sparsity": 2, "snr": 500.0, "seed": 42},
        "sweep_var": "normalized_n",
        "sweep_values": [2.0, 4.0],
        "decoders": ["ml_ls"],
        "trials": 4,
    }
    raw.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_simulate_end_to_end(capsys, tmp_path):
    out_csv = str(tmp_path / "out.csv")
    code, _, _ = run_cli(capsys, "simulate", "--config", write_config(tmp_path),
                         "--out", out_csv, "--threads", "2")
    assert code == 0
    header, rows = parse_csv(open(out_csv).read())
    assert header == ["normalized_n", "ml_ls_success", "ml_ls_stderr",
                      "bound_success"]
    assert len(rows) == 2


def test_simulate_dump_dataset(capsys, tmp_path):
    out_csv = str(tmp_path / "out.csv")
    dump = tmp_path / "dump"
    code, _, _ = run_cli(capsys, "simulate", "--config", write_config(tmp_path),
                         "--out", out_csv, "--dump-dataset", str(dump))
    assert code == 0
    from sparselimits import load_dataset
    ds = load_dataset(str(dump))
    assert ds.x.shape[1] == 10 and len(ds.support) == 2


def test_simulate_bad_config_exits_2(capsys, tmp_path):
    path = write_config(tmp_path, sweep_var="volume")
    code, _, err = run_cli(capsys, "simulate", "--config", path,
                           "--out", str(tmp_path / "o.csv"))
    assert code == 2 and "sweep_var" in err


def test_simulate_capacity_exits_3(capsys, tmp_path):
    path = write_config(tmp_path,
                        base={"dimension": 400, "sparsity": 10, "snr": 100.0})
    code, _, err = run_cli(capsys, "simulate", "--config", path,
                           "--out", str(tmp_path / "o.csv"))
    assert code == 3 and "capacity" in err.lower()
