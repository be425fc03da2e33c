"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  Criterion 13 is implemented exactly as specified and is a
known-red check: with tau = R^-kappa, T = exp(cR/2), steps = 2*floor(T/tau)+1,
the union_bound/target ratio equals (2*floor(exp(cR/2)*R^kappa)+1)*exp(-cR/2)
~ 2 R^kappa, which increases in R; the union bound itself does vanish.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from lenslab.basis import (
    GridState, SpectralState, analyze, box_grid, build_basis, evaluate_modes, synthesize,
)
from lenslab.classical import Arc, CircleRotation, liouville_check, poincare_recurrence
from lenslab.evolution import (
    QUARTER_PI, SolverConfig, energy_derivative_check, linear_free, linear_harmonic,
    solve_flat_path, solve_harmonic, solve_harmonic_path,
)
from lenslab.experiments import decay_experiment, scattering_experiment
from lenslab.lens import lens_inverse, time_map
from lenslab.measures import (
    DiscreteMeasure, bourgain_budget, monotonicity_experiment,
    power_inequality_scan, rn_discrete,
)
from lenslab.randomfield import (
    SampleStream, equivalence_diagnostic, mu0_law, scaled_law, shifted_law,
    smoothing_tail_experiment,
)


def report(num, name, ok, detail, budget, elapsed):
    line = (
        f"ACCEPTANCE {num:>2} [{name}] {'PASS' if ok else 'FAIL'}: "
        f"{detail} ({elapsed:.1f}s / budget {budget:.0f}s)"
    )
    print(line)
    assert elapsed < budget, f"runtime budget exceeded: {line}"
    assert ok, line


def test_c01_basis_fidelity():
    tic = time.time()
    build_basis.cache_clear()
    basis = build_basis(128, 256)
    gram_err = float(np.abs(basis.analysis_matrix @ basis.values.T - np.eye(128)).max())
    rng = np.random.default_rng(0)
    c = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    rt_err = float(np.abs(analyze(synthesize(SpectralState(c), basis), basis).coeffs - c).max())
    ok = gram_err <= 1e-10 and rt_err <= 1e-10
    report(1, "basis fidelity", ok, f"gram {gram_err:.2e}, roundtrip {rt_err:.2e} (tol 1e-10)",
           5.0, time.time() - tic)


def test_c02_half_period_inversion():
    tic = time.time()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(5):
        c = rng.standard_normal(128) + 1j * rng.standard_normal(128)
        out = linear_harmonic(SpectralState(c), math.pi).coeffs
        worst = max(worst, float(np.abs(out + c).max() / np.abs(c).max()))
    report(2, "exp(-i pi H) = -Id", worst <= 1e-12, f"max rel err {worst:.2e} (tol 1e-12)",
           1.0, time.time() - tic)


def test_c03_free_gaussian_oracle():
    tic = time.time()
    y = box_grid(40.0, 4096)
    U0 = GridState(math.pi**-0.25 * np.exp(-(y**2) / 2) + 0j, "box", 40.0)
    worst = 0.0
    for s in (0.5, 1.0, 2.0):
        a = 1 + 2j * s
        exact = math.pi**-0.25 * a**-0.5 * np.exp(-(y**2) / (2 * a))
        worst = max(worst, float(np.abs(linear_free(U0, s).values - exact).max()))
    report(3, "free-gaussian closed form", worst <= 1e-8, f"max err {worst:.2e} (tol 1e-8)",
           5.0, time.time() - tic)


def test_c04_strang_order_and_mass():
    tic = time.time()
    rng = np.random.default_rng(7)
    c0 = np.zeros(64, dtype=complex)
    c0[:48] = (rng.standard_normal(48) + 1j * rng.standard_normal(48)) * np.exp(-0.12 * np.arange(48))
    u0 = SpectralState(c0 / np.linalg.norm(c0))
    ratios, drifts = [], []
    for p in (3.0, 5.0):
        terminals = {}
        for dt in (4e-3, 2e-3, 1e-3, 1e-3 / 8):
            traj = solve_harmonic(u0, 0.0, 0.5, SolverConfig(p=p, dt=dt, record_every=10**9))
            terminals[dt] = traj.states[-1].coeffs
            drifts.append(traj.meta["mass_drift"])
        errs = [np.linalg.norm(terminals[dt] - terminals[1e-3 / 8]) for dt in (4e-3, 2e-3, 1e-3)]
        ratios += [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(3.5 <= r <= 4.5 for r in ratios) and max(drifts) <= 1e-10
    report(4, "strang order + mass", ok,
           f"ratios {[f'{r:.2f}' for r in ratios]} in [3.5,4.5], drift {max(drifts):.1e} <= 1e-10",
           30.0, time.time() - tic)


def test_c05_energy_identity():
    tic = time.time()
    rng = np.random.default_rng(3)
    c0 = np.zeros(64, dtype=complex)
    c0[:48] = (rng.standard_normal(48) + 1j * rng.standard_normal(48)) * np.exp(-0.15 * np.arange(48))
    c0 /= np.linalg.norm(c0)
    u0 = SpectralState(c0)

    def residual(p, dt, t1):
        traj = solve_harmonic(u0, 0.0, t1, SolverConfig(p=p, dt=dt, record_every=1))
        return energy_derivative_check(traj, p).max_residual

    r1 = residual(3.0, 1e-3, 0.5)
    r2 = residual(3.0, 5e-4, 0.5)
    c5 = np.zeros(64, dtype=complex)
    c5[:24] = (rng.standard_normal(24) + 1j * rng.standard_normal(24)) * np.exp(-0.3 * np.arange(24))
    smooth = SpectralState(0.8 * c5 / np.linalg.norm(c5))
    traj5 = solve_harmonic(smooth, 0.0, 0.3, SolverConfig(p=5.0, dt=1e-3, record_every=1))
    residual_p5 = energy_derivative_check(traj5, 5.0).max_residual
    ok = r1 <= 5e-4 and r2 <= 1.4e-4 and 2.0 <= r1 / r2 <= 6.0 and residual_p5 <= 1e-6
    report(5, "energy rate identity", ok,
           f"p=3: {r1:.2e} (<=5e-4), {r2:.2e} (<=1.4e-4), ratio {r1/r2:.2f}; p=5: {residual_p5:.2e} (<=1e-6)",
           60.0, time.time() - tic)


def test_c06_dual_route_lens_consistency():
    tic = time.time()
    rng = np.random.default_rng(11)
    n_low = 16
    c = (rng.standard_normal(n_low) + 1j * rng.standard_normal(n_low)) * np.exp(-0.3 * np.arange(n_low))
    c *= 1.3 / np.linalg.norm(c)
    N, L, n_box = 128, 80.0, 8192
    y = box_grid(L, n_box)
    c0 = np.zeros(N, dtype=complex)
    c0[:n_low] = c
    U0 = GridState(evaluate_modes(c0, y), "box", L)
    s_end = 2.0
    t_end = time_map(s_end, "to_harmonic")
    worst = 0.0
    for p in (3.0, 5.0, 7.0):
        trf = solve_flat_path(U0, [0.0, s_end], SolverConfig(p=p, dt=5e-4))
        trh = solve_harmonic_path(
            SpectralState(c0), [0.0, t_end], SolverConfig(p=p, dt=5e-4, t_cap=t_end + 1e-3)
        )
        Uh = lens_inverse(trh.states[-1], t_end, L, n_box)
        diff = trf.states[-1].values - Uh.values
        worst = max(worst, math.sqrt(2 * L / n_box * float(np.sum(np.abs(diff) ** 2))))
    report(6, "dual-route lens consistency", worst <= 1e-4,
           f"max L2 gap {worst:.2e} over p in {{3,5,7}} at s=2, N=128 (tol 1e-4)",
           120.0, time.time() - tic)


def test_c07_monotonicity_grid():
    tic = time.time()
    stream = SampleStream(seed=42)
    rep0 = monotonicity_experiment(5.0, 0.0, 8, 1000, stream)
    exact0 = rep0.lhs.value == rep0.rhs
    verdicts = {}
    for p in (3.0, 5.0, 7.0):
        for t in (0.1, 0.3, math.pi / 8):
            rep = monotonicity_experiment(p, t, 8, 10_000, stream)
            verdicts[(p, round(t, 4))] = rep.verdict
    ok = exact0 and all(v == "holds" for v in verdicts.values())
    report(7, "measure monotonicity 3x3", ok,
           f"t=0 exact equality {exact0}; verdicts {sorted(set(verdicts.values()))} at M=1e4, 2-sigma",
           600.0, time.time() - tic)


def test_c08_decay_exponent():
    tic = time.time()
    cfg = SolverConfig(p=5.0, dt=1e-3, t_cap=QUARTER_PI - 1e-4)
    rep = decay_experiment(
        mu0_law(), 5.0, np.geomspace(5.0, 50.0, 16), 64, 8, SampleStream(seed=7), cfg
    )
    err = abs(rep.exponent + 1.0 / 3.0)
    ok = err <= 0.1 and rep.failed == 0
    report(8, "decay exponent p=5", ok,
           f"fitted {rep.exponent:.4f} vs -1/3 (err {err:.3f} <= 0.1), {rep.failed} failures",
           600.0, time.time() - tic)


def test_c09_scattering():
    tic = time.time()
    L, n = 60.0, 4096
    y = box_grid(L, n)
    U0 = GridState(1.1 * math.pi**-0.25 * np.exp(-(y**2) / 2) * (1 + 0.2 * np.exp(1j * y)), "box", L)
    s_grid = np.linspace(0.5, 8.0, 14)
    rep = scattering_experiment(U0, 5.0, s_grid, SolverConfig(p=5.0, dt=1e-3))
    tail = rep.residuals[len(rep.residuals) // 2 :]
    monotone = bool(np.all(np.diff(tail) < 0))
    lin = scattering_experiment(U0, 5.0, s_grid, SolverConfig(p=5.0, dt=1e-3, nonlinear=False))
    ok = monotone and lin.wave_operator_norm <= 1e-10
    report(9, "scattering", ok,
           f"tail residuals monotone {monotone}; linear-control |W+| {lin.wave_operator_norm:.1e} <= 1e-10",
           600.0, time.time() - tic)


def test_c10_radon_nikodym_enumeration():
    tic = time.time()
    rng = np.random.default_rng(2024)
    eq_fail = weak_fail = 0
    for _ in range(1000):
        m = int(rng.integers(2, 13))
        mu = DiscreteMeasure(tuple(rng.uniform(0.0, 1.0, m)))
        nu = DiscreteMeasure(tuple(rng.uniform(0.01, 1.0, m)))
        if power_inequality_scan(mu, nu, 1.0).best_constant != rn_discrete(mu, nu).sup:
            eq_fail += 1
        alpha = float(rng.uniform(0.3, 0.9))
        p_w = 1.0 / (1.0 - alpha)
        best = power_inequality_scan(mu, nu, alpha).best_constant
        c_weak = rn_discrete(mu, nu, weak_ps=(p_w,)).weak_constants[p_w]
        if c_weak > best**p_w * (1 + 1e-12):
            weak_fail += 1
    ok = eq_fail == 0 and weak_fail == 0
    report(10, "density toolkit enumeration", ok,
           f"1000 instances: alpha=1 sup mismatches {eq_fail}, weak-tail violations {weak_fail}",
           60.0, time.time() - tic)


def test_c11_equivalence_trio():
    tic = time.time()
    got = (
        equivalence_diagnostic(mu0_law(), mu0_law(), 256).verdict,
        equivalence_diagnostic(mu0_law(), scaled_law(2.0), 256).verdict,
        equivalence_diagnostic(mu0_law(), shifted_law(), 256).verdict,
    )
    ok = got == ("equivalent", "singular", "equivalent")
    report(11, "equivalence criterion", ok, f"verdicts {got}", 1.0, time.time() - tic)


def test_c12_large_deviation_shape():
    tic = time.time()
    rep = smoothing_tail_experiment(0.1, 64, 10_000, SampleStream(seed=11))
    strength = abs(rep.slope) * rep.radii[-1] ** 2
    ok = rep.slope < 0 and strength > 3.0
    report(12, "large-deviation tail shape", ok,
           f"slope {rep.slope:.3f} < 0, |slope| R_max^2 = {strength:.2f} > 3",
           300.0, time.time() - tic)


def test_c13_budget_ratio_decreasing():
    # Known-red: the pinned formulas force ratio ~ 2 R^kappa (increasing).
    # The union bound itself does decrease; see the module docstring.
    tic = time.time()
    ratios = [bourgain_budget(2.0, 1.0, 1.0, r).ratio for r in (10.0, 20.0, 40.0)]
    decreasing = ratios[0] > ratios[1] > ratios[2]
    report(13, "budget union/target ratio decreasing", decreasing,
           f"ratios at R=10/20/40: {[f'{r:.1f}' for r in ratios]}",
           1.0, time.time() - tic)


def test_c14_classical_lab():
    tic = time.time()
    ham = liouville_check("harmonic-oscillator", "uniform")
    exp_field = liouville_check("expanding", "uniform")
    rot = poincare_recurrence(CircleRotation(1.0 / 7.0), Arc(0.0, 0.1), 50)
    ok = (
        ham.max_divergence_residual <= 1e-6
        and ham.volume_drift <= 1e-6
        and abs(exp_field.volume_factor - math.e**2) <= 0.01 * math.e**2
        and bool(np.all(rot.return_times == 7))
    )
    report(14, "classical lab", ok,
           f"residual {ham.max_divergence_residual:.1e}, factor {exp_field.volume_factor:.4f} "
           f"vs e^2, return times all 7: {bool(np.all(rot.return_times == 7))}",
           10.0, time.time() - tic)


def test_c15_reproducibility(tmp_path):
    tic = time.time()
    base = [sys.executable, "-m", "lenslab.cli", "monotonicity", "--p", "3", "--t", "0.1",
            "--modes", "8", "--samples", "400", "--seed", "7"]
    blobs = {}
    for threads in ("1", "2", "8"):
        out = tmp_path / f"t{threads}"
        res = subprocess.run(
            base + ["--threads", threads, "--out", str(out)],
            capture_output=True, text=True, timeout=300,
        )
        assert res.returncode == 0, res.stderr
        blobs[threads] = {
            name: (out / name).read_bytes() for name in sorted(os.listdir(out))
        }
    ok = blobs["1"] == blobs["2"] == blobs["8"]
    report(15, "byte-identical reruns", ok,
           f"artifacts identical across threads 1/2/8: {ok}",
           120.0, time.time() - tic)
