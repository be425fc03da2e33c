"""Command-line front end: experiment orchestration and artifact emission.

Every run writes CSV data plus one JSON summary embedding the fully resolved
configuration into ``--out``.  Exit codes: 0 success, 1 usage error,
2 numerical failure, 3 failed self-check.  Outputs are byte-identical for a
fixed seed and config at any ``--threads`` value.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import backend
from .basis import (
    GridState, SpectralState, analyze, box_grid, build_basis, evaluate_modes,
    lp_norm, synthesize, tail_mass_fraction,
)
from .classical import (
    Arc, CircleRotation, OscillatorMap, PhaseBox, liouville_check, poincare_recurrence,
)
from .errors import InvalidArgument, LenslabError, NumericalFailure
from .evolution import (
    QUARTER_PI, SolverConfig, linear_free, linear_harmonic, solve_flat, solve_harmonic,
)
from .experiments import (
    decay_experiment, dispersion_check, localized_decay_experiment,
    norm_growth_experiment, scattering_experiment,
)
from .io import EnsembleWriter, write_csv, write_json
from .lens import lens_forward, lens_inverse, time_map
from .measures import (
    DiscreteMeasure, bourgain_budget, monotonicity_experiment,
    power_inequality_scan, rn_discrete,
)
from .randomfield import (
    SampleStream, equivalence_diagnostic, law_by_name, sample, sample_matrix,
    smoothing_tail_experiment,
)

COMMANDS = (
    "selftest", "sample", "evolve", "decay", "scatter", "dispersion",
    "localized-decay", "monotonicity", "equivalence", "tails", "rn-discrete",
    "power-scan", "bourgain", "classical", "norm-growth",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; the contract says 1
        raise UsageError(message)


class Artifacts:
    """Tracks written files so a failing run leaves no partial output behind."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.paths = []

    def path(self, name):
        os.makedirs(self.out_dir, exist_ok=True)
        p = os.path.join(self.out_dir, name)
        self.paths.append(p)
        return p

    def cleanup(self):
        for p in self.paths:
            if os.path.exists(p):
                os.remove(p)


def _add_common(parser):
    parser.add_argument("--out", help="output directory (default $LENSLAB_OUT or ./runs)")
    parser.add_argument("--seed", type=int, help="global RNG seed (default 0)")
    parser.add_argument("--threads", type=int, help="worker cap for ensembles (default 1)")
    parser.add_argument("--config", help="flat JSON config file; flags override its values")


def build_parser():
    parser = _Parser(prog="lenslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        _add_common(p)
        return p

    cmd("selftest", help="run the basis/transform/propagator invariant battery")

    p = cmd("sample", help="draw a coefficient ensemble and write it to disk")
    p.add_argument("--law", help="mu0 | shifted | scaled(c)")
    p.add_argument("--modes", type=int)
    p.add_argument("--samples", type=int)

    p = cmd("evolve", help="integrate one state and export the trajectory")
    p.add_argument("--picture", choices=("harmonic", "flat"))
    p.add_argument("--p", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--t1", type=float, help="harmonic stop time")
    p.add_argument("--s1", type=float, help="flat stop time")
    p.add_argument("--dt", type=float)
    p.add_argument("--record-every", type=int)
    p.add_argument("--box-l", type=float)
    p.add_argument("--box-n", type=int)
    p.add_argument("--linear", action="store_true", help="disable the nonlinearity")

    p = cmd("decay", help="fit the flat-picture L^(p+1) decay exponent")
    p.add_argument("--p", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--s-points", type=int)
    p.add_argument("--dt", type=float)

    p = cmd("scatter", help="Cauchy test for the free scattering profile")
    p.add_argument("--p", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--s-points", type=int)
    p.add_argument("--box-l", type=float)
    p.add_argument("--box-n", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--linear", action="store_true")

    p = cmd("dispersion", help="free-propagator dispersion ratio curve")
    p.add_argument("--p", type=float)
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--s-points", type=int)
    p.add_argument("--box-l", type=float)
    p.add_argument("--box-n", type=int)
    p.add_argument("--width", type=float, help="gaussian width of the test profile")

    p = cmd("localized-decay", help="decay of the cutoff Sobolev norm under free flow")
    p.add_argument("--sigma", type=float)
    p.add_argument("--s-min", type=float)
    p.add_argument("--s-max", type=float)
    p.add_argument("--s-points", type=int)
    p.add_argument("--box-l", type=float)
    p.add_argument("--box-n", type=int)

    p = cmd("monotonicity", help="pullback-vs-envelope measure inequality experiment")
    p.add_argument("--p", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--dt", type=float)

    p = cmd("equivalence", help="Gaussian-law equivalence diagnostic")
    p.add_argument("--law-a")
    p.add_argument("--law-b")
    p.add_argument("--terms", type=int)

    p = cmd("tails", help="large-deviation tail of the linear-flow sup norm")
    p.add_argument("--sigma", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--t-points", type=int)

    p = cmd("rn-discrete", help="discrete Radon-Nikodym density and weak tails")
    p.add_argument("--mu", help="CSV file, one mass per line")
    p.add_argument("--nu", help="CSV file, one mass per line")
    p.add_argument("--weak-p", type=float, action="append")

    p = cmd("power-scan", help="exact subset scan for mu(A) <= C nu(A)^alpha")
    p.add_argument("--mu")
    p.add_argument("--nu")
    p.add_argument("--alpha", type=float)

    p = cmd("bourgain", help="globalization budget arithmetic")
    p.add_argument("--kappa", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--C", dest="prefactor", type=float)
    p.add_argument("--R", dest="radius", type=float)

    p = cmd("classical", help="Liouville / Poincare finite-dimensional lab")
    p.add_argument("--experiment", choices=("liouville", "poincare"))
    p.add_argument("--field", choices=("harmonic-oscillator", "rotation", "expanding"))
    p.add_argument("--density", choices=("uniform", "gibbs"))
    p.add_argument("--flow", choices=("rotation", "oscillator"))
    p.add_argument("--alpha", type=float, help="circle rotation amount (fraction of the circle)")
    p.add_argument("--arc-length", type=float)
    p.add_argument("--n-max", type=int)

    p = cmd("norm-growth", help="weak-norm growth along the nonlinear flow")
    p.add_argument("--p", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--t-max", type=float)
    p.add_argument("--eps", type=float)

    return parser


DEFAULTS = {
    "seed": 0, "threads": 1, "law": "mu0", "modes": 64, "samples": 1000,
    "p": 5.0, "t": 0.3, "t1": 0.5, "s1": 1.0, "dt": 1e-3, "record_every": 8,
    "box_l": 40.0, "box_n": 4096, "s_min": 1.0, "s_max": 20.0, "s_points": 16,
    "sigma": 0.1, "t_points": 32, "alpha": 0.5, "terms": 256,
    "law_a": "mu0", "law_b": "shifted", "weak_p": [2.0],
    "kappa": 2.0, "c": 1.0, "prefactor": 1.0, "radius": 10.0,
    "experiment": "liouville", "field": "harmonic-oscillator", "density": "uniform",
    "flow": "rotation", "arc_length": 0.1, "n_max": 1000,
    "t_max": 50.0, "eps": 0.1, "picture": "harmonic", "amplitude": 1.0,
    "width": 1.0, "linear": False,
}


def resolve_config(args) -> dict:
    """Merge defaults, config-file values, and explicit flags (highest wins)."""
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a flat JSON object")
        for k, v in loaded.items():
            cfg[k.replace("-", "_")] = v
    for k, v in vars(args).items():
        if k in ("command", "config", "out") or v is None or v is False:
            continue
        cfg[k] = v
    cfg["command"] = args.command
    cfg["backend"] = backend.BACKEND
    return cfg


def echo(cfg: dict) -> dict:
    """Config as embedded in artifacts: full resolved values, minus scheduling.

    The worker count only partitions deterministic per-sample work, so leaving
    it out keeps artifacts byte-identical across ``--threads`` settings.
    """
    return {k: v for k, v in cfg.items() if k != "threads"}


# ---------------------------------------------------------------------------
# Subcommand bodies


def _selftest_checks():
    checks = []

    def check(name, err, tol):
        checks.append({"name": name, "max_error": float(err), "tol": tol, "pass": bool(err <= tol)})

    basis = build_basis(64, 128)
    gram = basis.analysis_matrix @ basis.values.T
    check("basis-orthonormality", np.abs(gram - np.eye(64)).max(), 1e-10)

    rng = np.random.default_rng(0)
    c = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    u = SpectralState(c)
    round_trip = analyze(synthesize(u, basis), basis).coeffs
    check("analyze-synthesize-roundtrip", np.abs(round_trip - c).max(), 1e-10)
    grid = synthesize(u, basis)
    check("parseval", abs(lp_norm(grid, 2, basis) - np.linalg.norm(c)), 1e-9)
    signs = (-1.0) ** np.arange(64)
    check("parity", np.abs(basis.values[:, ::-1] - signs[:, None] * basis.values).max(), 1e-10)

    flipped = linear_harmonic(u, math.pi).coeffs
    check("half-period-inversion", np.abs(flipped + c).max() / np.abs(c).max(), 1e-12)

    y = box_grid(40.0, 2048)
    g0 = GridState(np.pi**-0.25 * np.exp(-(y**2) / 2) + 0j, "box", 40.0)
    a = 1 + 2j
    exact = np.pi**-0.25 * a**-0.5 * np.exp(-(y**2) / (2 * a))
    check("free-gaussian", np.abs(linear_free(g0, 1.0).values - exact).max(), 1e-8)

    cfg = SolverConfig(p=5.0, dt=1e-3)
    traj = solve_harmonic(SpectralState(c * 0.1), 0.0, 0.3, cfg)
    check("harmonic-mass-drift", traj.meta["mass_drift"], 1e-10)

    s, t = 0.5, math.pi / 8
    check("time-map", abs(time_map(time_map(s, "to_harmonic"), "to_flat") - s), 1e-12)
    lens_basis = build_basis(96, 192)
    coeffs = np.zeros(96, dtype=complex)
    coeffs[:12] = (rng.standard_normal(12) + 1j * rng.standard_normal(12)) * np.exp(-0.4 * np.arange(12))
    U = GridState(evaluate_modes(coeffs, y), "box", 40.0)
    back = lens_inverse(lens_forward(U, t, lens_basis), t, 40.0, 2048, lens_basis)
    check("lens-roundtrip", np.abs(back.values - U.values).max(), 1e-8)
    return checks


def run_selftest(cfg, art: Artifacts) -> int:
    checks = _selftest_checks()
    ok = all(ch["pass"] for ch in checks)
    write_json(art.path("selftest_summary.json"), {"config": echo(cfg), "checks": checks, "pass": ok})
    for ch in checks:
        print(f"{'PASS' if ch['pass'] else 'FAIL'} {ch['name']}: {ch['max_error']:.3e} (tol {ch['tol']:g})")
    return 0 if ok else 3


def run_sample(cfg, art):
    law = law_by_name(cfg["law"])
    n, m = cfg["modes"], cfg["samples"]
    stream = SampleStream(cfg["seed"])
    mat = sample_matrix(law, n, m, stream)
    with EnsembleWriter(art.path("sample_ensemble.bin"), n, law.name, cfg["seed"]) as w:
        for i in range(m):
            w.append(i, mat[i])
    e2 = (np.abs(mat) ** 2).mean(axis=0)
    se = (np.abs(mat) ** 2).std(ddof=1, axis=0) / math.sqrt(m)
    alphas = law.alphas(n)
    write_csv(
        art.path("sample_mode_stats.csv"),
        ["mode", "target_variance", "empirical_variance", "stderr"],
        [np.arange(n), alphas**2, e2, se],
    )
    write_json(art.path("sample_summary.json"), {
        "config": echo(cfg),
        "max_deviation_sigmas": float(np.abs(e2 - alphas**2).max() / se.max()),
    })
    return 0


def run_evolve(cfg, art):
    scfg = SolverConfig(
        p=cfg["p"], dt=cfg["dt"], record_every=cfg["record_every"],
        box_half_width=cfg["box_l"], box_points=cfg["box_n"],
        nonlinear=not cfg["linear"],
        t_cap=max(QUARTER_PI - 0.05, min(abs(cfg["t1"]) + 1e-6, QUARTER_PI - 1e-9)),
    )
    stream = SampleStream(cfg["seed"])
    if cfg["picture"] == "harmonic":
        u0 = sample(law_by_name(cfg["law"]), cfg["modes"], stream)
        traj = solve_harmonic(u0, 0.0, cfg["t1"], scfg)
        if tail_mass_fraction(traj.states[-1].coeffs) > 1e-6:
            print(
                "warning: last 10% of modes carry > 1e-6 of the mass; "
                "grid L^p norms may be underresolved",
                file=sys.stderr,
            )
    else:
        y = box_grid(cfg["box_l"], cfg["box_n"])
        coeffs = sample(law_by_name(cfg["law"]), min(cfg["modes"], 32), stream).coeffs
        U0 = GridState(evaluate_modes(coeffs, y), "box", cfg["box_l"])
        traj = solve_flat(U0, 0.0, cfg["s1"], scfg)
    write_csv(
        art.path("evolve_trajectory.csv"),
        ["time", "mass", "energy", "lp"],
        [traj.times, traj.diagnostics["mass"], traj.diagnostics["energy"], traj.diagnostics["lp"]],
    )
    with EnsembleWriter(
        art.path("evolve_states.bin"),
        traj.states[0].coeffs.size if cfg["picture"] == "harmonic" else traj.states[0].values.size,
        cfg["law"], cfg["seed"],
    ) as w:
        for i, st in enumerate(traj.states):
            w.append(i, st.coeffs if cfg["picture"] == "harmonic" else st.values)
    write_json(art.path("evolve_summary.json"), {"config": echo(cfg), "meta": traj.meta})
    return 0


def run_decay(cfg, art):
    s_grid = np.geomspace(cfg["s_min"], cfg["s_max"], cfg["s_points"])
    t_need = time_map(cfg["s_max"], "to_harmonic")
    scfg = SolverConfig(p=cfg["p"], dt=cfg["dt"], t_cap=min(t_need + 1e-4, QUARTER_PI - 1e-9))
    rep = decay_experiment(
        law_by_name(cfg["law"]), cfg["p"], s_grid, cfg["modes"], cfg["samples"],
        SampleStream(cfg["seed"]), scfg, threads=cfg["threads"],
    )
    med = np.median(rep.norms[~np.isnan(rep.norms[:, 0])], axis=0)
    write_csv(art.path("decay_curve.csv"), ["s", "median_norm"], [rep.s_grid, med])
    write_json(art.path("decay_summary.json"), {
        "config": echo(cfg), "exponent": rep.exponent, "exponent_stderr": rep.exponent_stderr,
        "target_exponent": rep.target_exponent, "log_power": rep.log_power,
        "failed_samples": rep.failed,
    })
    return 0


def _scatter_data(cfg):
    y = box_grid(cfg["box_l"], cfg["box_n"])
    vals = cfg["amplitude"] * np.pi**-0.25 * np.exp(-(y**2) / 2) * (1 + 0.2 * np.exp(1j * y))
    return GridState(vals, "box", cfg["box_l"])


def run_scatter(cfg, art):
    s_grid = np.linspace(0.5, cfg["s_max"], cfg["s_points"])
    scfg = SolverConfig(
        p=cfg["p"], dt=cfg["dt"], box_half_width=cfg["box_l"], box_points=cfg["box_n"],
        nonlinear=not cfg["linear"],
    )
    rep = scattering_experiment(_scatter_data(cfg), cfg["p"], s_grid, scfg)
    write_csv(art.path("scatter_residuals.csv"), ["s", "cauchy_residual"],
              [rep.s_grid[:-1], rep.residuals])
    tail = rep.residuals[len(rep.residuals) // 2:]
    write_json(art.path("scatter_summary.json"), {
        "config": echo(cfg), "eta_fit": rep.eta_fit, "wave_operator_norm": rep.wave_operator_norm,
        "scattering_expected": rep.scattering_expected,
        "tail_monotone": bool(np.all(np.diff(tail) < 0)),
    })
    return 0


def run_dispersion(cfg, art):
    y = box_grid(cfg["box_l"], cfg["box_n"])
    phi = GridState(np.exp(-(y**2) / (2 * cfg["width"] ** 2)), "box", cfg["box_l"])
    s_grid = np.geomspace(cfg["s_min"], cfg["s_max"], cfg["s_points"])
    rep = dispersion_check(phi, cfg["p"], s_grid)
    write_csv(art.path("dispersion_curve.csv"), ["s", "ratio"], [rep.s_grid, rep.ratios])
    write_json(art.path("dispersion_summary.json"), {
        "config": echo(cfg), "max_ratio": float(rep.ratios.max()), "plateau_slope": rep.plateau_slope,
    })
    return 0


def run_localized_decay(cfg, art):
    y = box_grid(cfg["box_l"], cfg["box_n"])
    u = GridState(np.exp(-(y**2) / 2), "box", cfg["box_l"])
    s_grid = np.geomspace(cfg["s_min"], cfg["s_max"], cfg["s_points"])
    rep = localized_decay_experiment(u, cfg["sigma"], s_grid)
    write_csv(art.path("localized_decay_curve.csv"), ["s", "localized_norm", "global_l2"],
              [rep.s_grid, rep.localized_norms, rep.global_l2])
    write_json(art.path("localized_decay_summary.json"), {
        "config": echo(cfg), "slope": rep.slope, "reference_slope": rep.reference_slope,
    })
    return 0


def run_monotonicity(cfg, art):
    rep = monotonicity_experiment(
        cfg["p"], cfg["t"], cfg["modes"], cfg["samples"], SampleStream(cfg["seed"]),
        threads=cfg["threads"],
    )
    write_json(art.path("monotonicity_summary.json"), {
        "config": echo(cfg),
        "lhs": rep.lhs.value, "stderr_lhs": rep.lhs.stderr,
        "rhs": rep.rhs, "stderr_rhs": rep.rhs_stderr,
        "event_radius": rep.event.radius, "bound_exponent": rep.exponent,
        "failed_samples": rep.lhs.failed, "verdict": rep.verdict,
    })
    print(f"verdict: {rep.verdict} (lhs={rep.lhs.value:.5f}, rhs={rep.rhs:.5f})")
    return 0


def run_equivalence(cfg, art):
    rep = equivalence_diagnostic(law_by_name(cfg["law_a"]), law_by_name(cfg["law_b"]), cfg["terms"])
    write_csv(art.path("equivalence_partial_sums.csv"),
              ["k", "ratio_criterion", "log_criterion"],
              [np.arange(cfg["terms"]), rep.partial_sums_ratio, rep.partial_sums_log])
    write_json(art.path("equivalence_summary.json"), {
        "config": echo(cfg), "verdict": rep.verdict, "tail_slope": rep.tail_slope,
        "ratio_sum": float(rep.partial_sums_ratio[-1]),
    })
    print(f"verdict: {rep.verdict}")
    return 0


def run_tails(cfg, art):
    rep = smoothing_tail_experiment(
        cfg["sigma"], cfg["modes"], cfg["samples"], SampleStream(cfg["seed"]),
        t_points=cfg["t_points"],
    )
    write_csv(art.path("tails_curve.csv"), ["radius", "tail", "censored"],
              [rep.radii, rep.tails, rep.censored.astype(int)])
    write_json(art.path("tails_summary.json"), {
        "config": echo(cfg), "slope_vs_r_squared": rep.slope,
        "gaussian_like": bool(rep.slope < 0),
    })
    return 0


def run_rn_discrete(cfg, art):
    if not cfg.get("mu") or not cfg.get("nu"):
        raise UsageError("rn-discrete needs --mu and --nu CSV paths")
    mu = DiscreteMeasure.from_csv(cfg["mu"])
    nu = DiscreteMeasure.from_csv(cfg["nu"])
    rep = rn_discrete(mu, nu, weak_ps=tuple(cfg["weak_p"]))
    write_csv(art.path("rn_density.csv"), ["atom", "density"],
              [np.arange(rep.density.size), rep.density])
    write_json(art.path("rn_summary.json"), {
        "config": echo(cfg), "sup": rep.sup,
        "weak_constants": {str(k): v for k, v in rep.weak_constants.items()},
    })
    return 0


def run_power_scan(cfg, art):
    if not cfg.get("mu") or not cfg.get("nu"):
        raise UsageError("power-scan needs --mu and --nu CSV paths")
    mu = DiscreteMeasure.from_csv(cfg["mu"])
    nu = DiscreteMeasure.from_csv(cfg["nu"])
    rep = power_inequality_scan(mu, nu, cfg["alpha"])
    write_json(art.path("power_scan_summary.json"), {
        "config": echo(cfg), "best_C": rep.best_constant, "witness": list(rep.witness),
    })
    return 0


def run_bourgain(cfg, art):
    rep = bourgain_budget(cfg["kappa"], cfg["c"], cfg["prefactor"], cfg["radius"])
    ts = np.geomspace(1.0, max(rep.horizon, 2.0), 16)
    write_csv(art.path("bourgain_growth_curve.csv"), ["t", "norm_ceiling"],
              [ts, rep.growth_curve(ts)])
    write_json(art.path("bourgain_summary.json"), {
        "config": echo(cfg), "tau": rep.tau, "T": rep.horizon, "steps": rep.steps,
        "union_bound": rep.union_bound, "target": rep.target, "ratio": rep.ratio,
        "degenerate": rep.degenerate, "norm_level": rep.norm_level,
    })
    print(f"tau={rep.tau:g} T={rep.horizon:.4f} steps={rep.steps} union={rep.union_bound:.4e}")
    return 0


def run_classical(cfg, art):
    if cfg["experiment"] == "liouville":
        rep = liouville_check(cfg["field"], cfg["density"], seed=cfg["seed"])
        payload = {
            "config": echo(cfg), "max_divergence_residual": rep.max_divergence_residual,
            "volume_factor": rep.volume_factor, "volume_drift": rep.volume_drift,
        }
    else:
        if cfg["flow"] == "rotation":
            flow = CircleRotation(cfg["alpha"])
            region = Arc(0.0, cfg["arc_length"])
        else:
            flow = OscillatorMap()
            region = PhaseBox((0.2, 0.2), (0.7, 0.7))
        rep = poincare_recurrence(flow, region, cfg["n_max"], seed=cfg["seed"])
        payload = {
            "config": echo(cfg), "fraction_returned": rep.fraction_returned,
            "max_return_time": int(rep.return_times.max()),
            "min_return_time": int(rep.return_times[rep.return_times > 0].min())
            if (rep.return_times > 0).any() else 0,
        }
    write_json(art.path("classical_summary.json"), payload)
    return 0


def run_norm_growth(cfg, art):
    t_need = time_map(cfg["t_max"], "to_harmonic")
    scfg = SolverConfig(p=cfg["p"], dt=cfg["dt"], t_cap=min(t_need + 1e-4, QUARTER_PI - 1e-9))
    rep = norm_growth_experiment(
        law_by_name(cfg["law"]), cfg["p"], cfg["t_max"], cfg["modes"], cfg["samples"],
        SampleStream(cfg["seed"]), scfg, sigma=-abs(cfg["eps"]), threads=cfg["threads"],
    )
    write_csv(art.path("norm_growth_curve.csv"), ["s", "median_norm"], [rep.s_grid, rep.median])
    write_json(art.path("norm_growth_summary.json"), {
        "config": echo(cfg), "slope": rep.slope, "intercept": rep.intercept,
        "r_squared": rep.r_squared,
    })
    return 0


RUNNERS = {
    "selftest": run_selftest,
    "sample": run_sample,
    "evolve": run_evolve,
    "decay": run_decay,
    "scatter": run_scatter,
    "dispersion": run_dispersion,
    "localized-decay": run_localized_decay,
    "monotonicity": run_monotonicity,
    "equivalence": run_equivalence,
    "tails": run_tails,
    "rn-discrete": run_rn_discrete,
    "power-scan": run_power_scan,
    "bourgain": run_bourgain,
    "classical": run_classical,
    "norm-growth": run_norm_growth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out or os.environ.get("LENSLAB_OUT", "runs")
    art = Artifacts(out_dir)
    try:
        return RUNNERS[args.command](cfg, art)
    except (UsageError, InvalidArgument) as exc:
        art.cleanup()
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, LenslabError) as exc:
        art.cleanup()
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
