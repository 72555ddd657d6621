import csv
import json

import numpy as np
import pytest

from stochtrans.cli import main
from stochtrans.core import read_matrix_csv, validate_probability_matrix
from stochtrans.generators import gen_bad_matrix, gen_noiseless
from stochtrans.observation import read_observation_csv


@pytest.fixture
def bad4(tmp_path):
    path = tmp_path / "bad4.csv"
    np.savetxt(path, np.asarray(gen_bad_matrix(4)), delimiter=",", fmt="%.17g")
    return path


def test_generate_kinds(tmp_path):
    for kind in ("uniform", "high_snr", "noiseless", "independent_bands", "bad_matrix"):
        out = tmp_path / f"{kind}.csv"
        assert main(["generate", "--kind", kind, "--n", "8", "--seed", "1", "--out", str(out)]) == 0
        assert read_matrix_csv(out).n == 8


def test_generate_parametric_writes_weights(tmp_path):
    out, wout = tmp_path / "m.csv", tmp_path / "w.csv"
    assert main(["generate", "--kind", "thurstone", "--n", "6", "--seed", "2",
                 "--out", str(out), "--weights-out", str(wout)]) == 0
    w = np.loadtxt(wout, delimiter=",")
    assert w.shape == (6,) and abs(w.sum()) < 1e-9 and np.abs(w).max() <= 1
    from scipy.stats import norm
    M = np.loadtxt(out, delimiter=",")
    assert np.allclose(M, norm.cdf(w[:, None] - w[None, :]))


def test_generate_fixture(tmp_path):
    out = tmp_path / "c3.csv"
    assert main(["generate", "--kind", "construction3_7x7", "--out", str(out)]) == 0
    assert read_matrix_csv(out).n == 7


def test_generate_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["generate", "--kind", "uniform", "--n", "10", "--seed", "4", "--out", str(p)])
    assert a.read_text() == b.read_text()


def test_generate_invalid_level_exit_code(tmp_path, capsys):
    code = main(["generate", "--kind", "high_snr", "--n", "6", "--level", "0.3", "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_sample_partial_has_empty_fields(tmp_path, bad4):
    big = tmp_path / "big.csv"
    main(["generate", "--kind", "uniform", "--n", "20", "--seed", "0", "--out", str(big)])
    out = tmp_path / "y.csv"
    assert main(["sample", "--matrix", str(big), "--pobs", "0.3", "--seed", "5", "--out", str(out)]) == 0
    with open(out) as fh:
        cells = [c for row in csv.reader(fh) for c in row]
    assert "" in cells
    assert set(cells) <= {"", "0", "1", "0.5"}
    Y = read_observation_csv(out, 0.3)
    assert Y.mode == "partial" and Y.p_obs == 0.3


def test_sample_full(tmp_path, bad4):
    out = tmp_path / "y.csv"
    assert main(["sample", "--matrix", str(bad4), "--seed", "1", "--out", str(out)]) == 0
    y = np.loadtxt(out, delimiter=",")
    off = ~np.eye(4, dtype=bool)
    assert set(np.unique(y[off])) <= {0.0, 1.0}
    assert np.array_equal(y + y.T - np.diag(np.diag(y + y.T)), off.astype(float))


@pytest.fixture
def noiseless_obs(tmp_path):
    m = tmp_path / "m.csv"
    np.savetxt(m, np.asarray(gen_noiseless(7)), delimiter=",", fmt="%.17g")
    y = tmp_path / "y.csv"
    main(["sample", "--matrix", str(m), "--seed", "0", "--out", str(y)])
    return m, y


def test_estimate_svt(tmp_path, noiseless_obs):
    _, y = noiseless_obs
    out, info = tmp_path / "est.csv", tmp_path / "info.json"
    assert main(["estimate", "svt", "--in", str(y), "--out", str(out), "--info", str(info)]) == 0
    validate_probability_matrix(np.loadtxt(out, delimiter=","))
    d = json.loads(info.read_text())
    assert d["lambda"] == pytest.approx(2.1 * np.sqrt(7))


def test_estimate_svt_explicit_lambda_unclipped(tmp_path, noiseless_obs):
    _, y = noiseless_obs
    out = tmp_path / "est.csv"
    assert main(["estimate", "svt", "--in", str(y), "--lambda", "0", "--no-clip", "--out", str(out)]) == 0
    # lambda = 0 and no clipping reproduces the skew-averaged observation
    Y = np.loadtxt(y, delimiter=",")
    np.fill_diagonal(Y, 0.5)
    assert np.allclose(np.loadtxt(out, delimiter=","), (Y + 1 - Y.T) / 2)


@pytest.mark.parametrize("strategy", ["bruteforce", "two-stage"])
def test_estimate_lse_recovers_noiseless(tmp_path, noiseless_obs, strategy):
    m, y = noiseless_obs
    out, info = tmp_path / "est.csv", tmp_path / "info.json"
    args = ["estimate", "lse", "--strategy", strategy, "--in", str(y), "--out", str(out), "--info", str(info)]
    assert main(args) == 0
    assert np.allclose(np.loadtxt(out, delimiter=","), np.loadtxt(m, delimiter=","), atol=1e-7)
    assert json.loads(info.read_text())["permutation"] == list(range(1, 8))


def test_estimate_lse_partial_two_stage_rejected(tmp_path, bad4, capsys):
    y = tmp_path / "y.csv"
    main(["sample", "--matrix", str(bad4), "--pobs", "0.5", "--seed", "3", "--out", str(y)])
    code = main(["estimate", "lse", "--in", str(y), "--pobs", "0.5", "--out", str(tmp_path / "o.csv")])
    assert code == 2


def test_estimate_mle_and_low_pobs_warning(tmp_path, capsys):
    m = tmp_path / "m.csv"
    main(["generate", "--kind", "thurstone", "--n", "12", "--seed", "0", "--out", str(m)])
    y = tmp_path / "y.csv"
    main(["sample", "--matrix", str(m), "--pobs", "0.4", "--seed", "0", "--out", str(y)])
    out, info = tmp_path / "est.csv", tmp_path / "info.json"
    code = main(["estimate", "mle", "--in", str(y), "--pobs", "0.4", "--out", str(out), "--info", str(info)])
    assert code == 0
    assert "warning" in capsys.readouterr().err
    d = json.loads(info.read_text())
    assert d["converged"] and len(d["weights"]) == 12


def test_metric_prints_json(tmp_path, bad4, capsys):
    main(["metric", str(bad4), str(bad4)])
    d = json.loads(capsys.readouterr().out)
    assert d == {"normalized_mse": 0.0, "frobenius_sq": 0.0, "kl": 0.0}


def test_classify_bad_matrix(bad4, capsys):
    assert main(["classify", "--matrix", str(bad4), "--gamma", "0.1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["sst"]["holds"] and d["mst"]["holds"] and d["wst"]["holds"]
    assert not d["parametric_necessary"]["holds"]
    assert "high_snr" in d


def test_classify_rejects_invalid_matrix(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("0.5,0.7\n0.7,0.5\n")
    assert main(["classify", "--matrix", str(p)]) == 2
    assert "error" in capsys.readouterr().err


def test_run_and_summarize(tmp_path):
    spec = {
        "generator": {"kind": "uniform"},
        "n_grid": [6, 9],
        "estimators": [{"id": "svt", "kind": "svt"}, {"id": "bf", "kind": "lse"}],
        "trials": 2,
        "base_seed": 1,
    }
    sp = tmp_path / "spec.json"
    sp.write_text(json.dumps(spec))
    out = tmp_path / "run"
    assert main(["run", "--spec", str(sp), "--out", str(out), "--workers", "2"]) == 0
    lines = (out / "records.jsonl").read_text().splitlines()
    assert len(lines) == 8
    assert sum(json.loads(line)["status"] == "skipped" for line in lines) == 2
    first = (out / "summary.csv").read_text()
    assert first.splitlines()[0] == "generator,estimator,n,mean_mse,stderr,slope_overall"
    (out / "summary.csv").unlink()
    assert main(["summarize", "--records", str(out / "records.jsonl"), "--out", str(out)]) == 0
    assert (out / "summary.csv").read_text() == first
