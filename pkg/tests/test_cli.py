"""CLI contract: artifacts, exit codes, config handling, reproducibility."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

BASE = [sys.executable, "-m", "lenslab.cli"]


def run_cli(args, cwd):
    return subprocess.run(
        BASE + args, cwd=cwd, capture_output=True, text=True, timeout=600
    )


def read_all(out_dir):
    blobs = {}
    for name in sorted(os.listdir(out_dir)):
        with open(os.path.join(out_dir, name), "rb") as fh:
            blobs[name] = fh.read()
    return blobs


def test_selftest_passes(tmp_path):
    res = run_cli(["selftest", "--out", "st"], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "st" / "selftest_summary.json").read_text())
    assert summary["pass"] is True


def test_bourgain_values(tmp_path):
    res = run_cli(["bourgain", "--kappa", "2", "--c", "1", "--R", "10", "--out", "b"], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "b" / "bourgain_summary.json").read_text())
    assert summary["tau"] == pytest.approx(0.01, rel=1e-12)
    assert summary["T"] == pytest.approx(148.4132, abs=1e-4)
    assert summary["config"]["kappa"] == 2.0


def test_monotonicity_verdict(tmp_path):
    res = run_cli(
        ["monotonicity", "--p", "7", "--t", "0.3", "--modes", "8",
         "--samples", "1000", "--seed", "42", "--out", "m"],
        tmp_path,
    )
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "m" / "monotonicity_summary.json").read_text())
    assert summary["verdict"] == "holds"
    assert summary["config"]["seed"] == 42


def test_equivalence_trio(tmp_path):
    for law_b, verdict in (("mu0", "equivalent"), ("scaled(2)", "singular"), ("shifted", "equivalent")):
        res = run_cli(
            ["equivalence", "--law-a", "mu0", "--law-b", law_b, "--out", f"e_{verdict}_{law_b[:4]}"],
            tmp_path,
        )
        assert res.returncode == 0, res.stderr
        outdir = tmp_path / f"e_{verdict}_{law_b[:4]}"
        assert json.loads((outdir / "equivalence_summary.json").read_text())["verdict"] == verdict


def test_usage_error_exit_code(tmp_path):
    assert run_cli(["no-such-command"], tmp_path).returncode == 1
    assert run_cli(["rn-discrete"], tmp_path).returncode == 1
    res = run_cli(["evolve", "--picture", "harmonic", "--t1", "2.0"], tmp_path)
    assert res.returncode == 1  # beyond the harmonic window


def test_numerical_failure_exit_code(tmp_path):
    # box passes the initial-support check but dispersion escapes it mid-run
    res = run_cli(
        ["scatter", "--p", "5", "--box-l", "10", "--box-n", "512", "--s-max", "10",
         "--amplitude", "1.0", "--out", "sc"],
        tmp_path,
    )
    assert res.returncode == 2, res.stderr
    # partial artifacts are removed on failure
    assert not os.path.exists(tmp_path / "sc") or not os.listdir(tmp_path / "sc")


def test_rn_discrete_from_csv(tmp_path):
    (tmp_path / "mu.csv").write_text("0.2\n0.8\n")
    (tmp_path / "nu.csv").write_text("0.5\n0.5\n")
    res = run_cli(
        ["rn-discrete", "--mu", "mu.csv", "--nu", "nu.csv", "--weak-p", "2", "--out", "rn"],
        tmp_path,
    )
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "rn" / "rn_summary.json").read_text())
    assert summary["sup"] == pytest.approx(1.6)


def test_power_scan_from_csv(tmp_path):
    (tmp_path / "mu.csv").write_text("0.2\n0.8\n")
    (tmp_path / "nu.csv").write_text("0.5\n0.5\n")
    res = run_cli(
        ["power-scan", "--mu", "mu.csv", "--nu", "nu.csv", "--alpha", "1.0", "--out", "ps"],
        tmp_path,
    )
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "ps" / "power_scan_summary.json").read_text())
    assert summary["best_C"] == pytest.approx(1.6)
    assert summary["witness"] == [1]


def test_config_file_and_flag_override(tmp_path):
    (tmp_path / "cfg.json").write_text(json.dumps({"kappa": 3.0, "c": 1.0, "radius": 10.0}))
    res = run_cli(["bourgain", "--config", "cfg.json", "--out", "b1"], tmp_path)
    assert res.returncode == 0, res.stderr
    s1 = json.loads((tmp_path / "b1" / "bourgain_summary.json").read_text())
    assert s1["tau"] == pytest.approx(10.0**-3)
    res = run_cli(["bourgain", "--config", "cfg.json", "--kappa", "2", "--out", "b2"], tmp_path)
    s2 = json.loads((tmp_path / "b2" / "bourgain_summary.json").read_text())
    assert s2["tau"] == pytest.approx(0.01)  # flag beats config file


def test_classical_subcommand(tmp_path):
    res = run_cli(
        ["classical", "--experiment", "poincare", "--flow", "rotation",
         "--alpha", str(1 / 7), "--n-max", "50", "--out", "cl"],
        tmp_path,
    )
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "cl" / "classical_summary.json").read_text())
    assert summary["min_return_time"] == 7
    assert summary["max_return_time"] == 7


def test_sample_artifacts(tmp_path):
    res = run_cli(
        ["sample", "--law", "mu0", "--modes", "6", "--samples", "200", "--seed", "9", "--out", "s"],
        tmp_path,
    )
    assert res.returncode == 0, res.stderr
    from lenslab.io import read_ensemble

    header, indices, coeffs = read_ensemble(tmp_path / "s" / "sample_ensemble.bin")
    assert header.n_modes == 6 and header.seed == 9
    assert coeffs.shape == (200, 6)
    from lenslab.randomfield import SampleStream, mu0_law, sample

    direct = sample(mu0_law(), 6, SampleStream(seed=9, index=3)).coeffs
    assert np.array_equal(coeffs[3], direct)


@pytest.mark.parametrize("threads", ["1", "2", "8"])
def test_reproducibility_across_threads(tmp_path, threads):
    args = [
        "monotonicity", "--p", "3", "--t", "0.1", "--modes", "8",
        "--samples", "400", "--seed", "7", "--threads", threads,
    ]
    run_cli(args + ["--out", "r1"], tmp_path)
    run_cli(args + ["--out", "r2"], tmp_path)
    b1 = read_all(tmp_path / "r1")
    b2 = read_all(tmp_path / "r2")
    assert b1 == b2
    # stash against the single-thread reference
    if threads != "1":
        ref_args = args[:-1] + ["1", "--out", "ref"]
        run_cli(ref_args, tmp_path)
        assert read_all(tmp_path / "ref") == b1
