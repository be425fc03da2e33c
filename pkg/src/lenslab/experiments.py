"""Long-time experiments: decay, scattering, dispersion, localized decay,
weak-norm growth.

Asymptotic fits follow one convention throughout: least squares in log-log on
the largest-s half of the grid, with ``<s> = sqrt(1 + s^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import GridState, box_grid, sobolev_norm
from .errors import InvalidArgument, NumericalFailure
from .evolution import SolverConfig, collocation_system, linear_free, solve_flat_path, solve_harmonic_path
from .lens import flat_lp_norm, time_map
from .parallel import map_indexed
from .randomfield import CoefficientLaw, SampleStream, sample

def japanese_bracket(s):
    return np.sqrt(1.0 + np.square(s))


def _fit_window(s_grid: np.ndarray) -> np.ndarray:
    """Boolean mask of the largest-s half of the grid (asymptotic fits only)."""
    return np.arange(s_grid.size) >= s_grid.size // 2


def _loglog_slope(x: np.ndarray, y: np.ndarray):
    """Least-squares slope and its standard error for ``log y`` against ``log x``."""
    lx, ly = np.log(x), np.log(y)
    if lx.size < 2:
        return math.nan, math.nan
    if lx.size < 4:  # too few points for a covariance estimate
        return float(np.polyfit(lx, ly, 1)[0]), math.nan
    coeffs, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coeffs[0]), float(math.sqrt(max(cov[0, 0], 0.0)))


def _check_s_grid(s_grid: np.ndarray, cfg: SolverConfig):
    if not np.all(np.diff(s_grid) > 0):
        raise InvalidArgument("s_grid must be strictly increasing")
    s_reach = math.tan(2.0 * cfg.t_cap) / 2.0
    if s_grid[-1] > s_reach:
        raise InvalidArgument(
            f"s = {s_grid[-1]:g} is beyond the reach of t_cap = {cfg.t_cap:g} "
            f"(max s = {s_reach:g})"
        )


# ---------------------------------------------------------------------------
# Decay of the flat-picture L^(p+1) norm


@dataclass
class DecayReport:
    s_grid: np.ndarray
    norms: np.ndarray  # (samples, len(s_grid)); NaN rows mark failed samples
    exponent: float
    exponent_stderr: float
    log_power: float
    target_exponent: float
    failed: int


def decay_experiment(
    law: CoefficientLaw, p: float, s_grid, n_modes: int, n_samples: int,
    stream: SampleStream, cfg: SolverConfig, threads: int = 1,
) -> DecayReport:
    """Track ``||U(s)||_{p+1}`` for random data evolved through the harmonic picture.

    Each sample is integrated in harmonic time; the flat-picture norm comes
    from the exact lens change of variables
    (``||U(s)||_q = cos(2t)^(1/2-1/q) ||u(t)||_q``), which stays valid at
    values of ``s`` far beyond what any finite box could hold.  The fitted
    log-log slope on the largest-s half is compared with the dispersive
    exponent ``-(1/2 - 1/(p+1))``.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if n_samples < 1:
        raise InvalidArgument("need at least one sample")
    _check_s_grid(s_grid, cfg)
    t_grid = np.array([time_map(s, "to_harmonic") for s in s_grid])
    knots = np.concatenate([[0.0], t_grid]) if s_grid[0] > 0 else t_grid
    work = collocation_system(n_modes, cfg.dealias)
    q = p + 1.0

    def one(i):
        u0 = sample(law, n_modes, stream.at(stream.index + i))
        try:
            traj = solve_harmonic_path(u0, knots, cfg)
        except NumericalFailure:
            return np.full(s_grid.size, np.nan)
        states = traj.states[1:] if s_grid[0] > 0 else traj.states
        return np.array(
            [flat_lp_norm(u, t, q, work) for u, t in zip(states, t_grid)]
        )

    norms = np.array(map_indexed(one, n_samples, threads))
    ok = ~np.isnan(norms[:, 0])
    failed = int(n_samples - ok.sum())
    if not ok.any():
        raise NumericalFailure("every decay sample failed")

    window = _fit_window(s_grid)
    median = np.median(norms[ok], axis=0)
    brack = japanese_bracket(s_grid[window])
    exponent, _ = _loglog_slope(brack, median[window])
    slopes = [
        _loglog_slope(brack, row[window])[0] for row in norms[ok]
    ]
    stderr = float(np.std(slopes, ddof=1) / math.sqrt(len(slopes))) if len(slopes) > 1 else 0.0

    # secondary fit with a free log-correction factor (1 + log<s>)^beta
    lx = np.log(japanese_bracket(s_grid[window]))
    llog = np.log1p(lx)
    design = np.column_stack([np.ones_like(lx), lx, llog])
    sol, *_ = np.linalg.lstsq(design, np.log(median[window]), rcond=None)
    return DecayReport(
        s_grid=s_grid, norms=norms, exponent=exponent, exponent_stderr=stderr,
        log_power=float(sol[2]), target_exponent=-(0.5 - 1.0 / q), failed=failed,
    )


# ---------------------------------------------------------------------------
# Scattering


@dataclass
class ScatteringReport:
    s_grid: np.ndarray
    residuals: np.ndarray  # ||V(s_j) - V(s_last)||_L2, last entry excluded
    wave_operator_norm: float
    eta_fit: float
    scattering_expected: bool
    profile: GridState


def scattering_experiment(
    U0: GridState, p: float, s_grid, cfg: SolverConfig
) -> ScatteringReport:
    """Cauchy-in-s test for the free-profile limit ``V(s) = exp(-is d^2) U(s) - U0``.

    Residuals against the largest computed ``s`` should decrease on the tail
    of the grid when scattering holds (p > 3); the extrapolated profile at
    ``s_last`` approximates the wave-operator correction.  For ``p <= 3`` the
    report is flagged: no scattering is expected there.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size < 3 or not np.all(np.diff(s_grid) > 0):
        raise InvalidArgument("need an increasing s grid with at least 3 points")
    knots = np.concatenate([[0.0], s_grid]) if s_grid[0] > 0 else s_grid
    traj = solve_flat_path(U0, knots, cfg)
    states = traj.states[1:] if s_grid[0] > 0 else traj.states
    dy = U0.dy
    profiles = []
    for s, state in zip(s_grid, states):
        back = linear_free(state, -s)
        profiles.append(back.values - U0.values)
    w_plus = profiles[-1]
    resid = np.array(
        [math.sqrt(dy * np.sum(np.abs(v - w_plus) ** 2)) for v in profiles[:-1]]
    )
    tail = _fit_window(s_grid[:-1])
    positive = resid[tail] > 0
    if positive.sum() >= 2:
        slope, _ = _loglog_slope(japanese_bracket(s_grid[:-1][tail][positive]), resid[tail][positive])
        eta = -slope
    else:
        eta = math.inf
    return ScatteringReport(
        s_grid=s_grid, residuals=resid,
        wave_operator_norm=math.sqrt(dy * np.sum(np.abs(w_plus) ** 2)),
        eta_fit=eta, scattering_expected=p > 3.0,
        profile=GridState(w_plus, "box", U0.box_half_width),
    )


# ---------------------------------------------------------------------------
# Dispersion estimate


@dataclass
class DispersionReport:
    s_grid: np.ndarray
    ratios: np.ndarray
    plateau_slope: float


def dispersion_check(phi: GridState, p: float, s_grid) -> DispersionReport:
    """Ratio ``||exp(is d^2) phi||_{p+1} |s|^(1/2-1/(p+1)) / ||phi||_{(p+1)'}``.

    Bounded ratios (flat in log-log at large s) witness the free dispersion
    estimate; the plateau slope is fitted on the last decade of the grid.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if (s_grid <= 0).any() or not np.all(np.diff(s_grid) > 0):
        raise InvalidArgument("s_grid must be positive and increasing")
    q = p + 1.0
    qprime = q / (q - 1.0)
    dy = phi.dy
    denom = (dy * np.sum(np.abs(phi.values) ** qprime)) ** (1.0 / qprime)
    rate = 0.5 - 1.0 / q
    ratios = np.array(
        [
            (dy * np.sum(np.abs(linear_free(phi, s).values) ** q)) ** (1.0 / q)
            * s**rate / denom
            for s in s_grid
        ]
    )
    decade = s_grid >= s_grid[-1] / 10.0
    slope, _ = _loglog_slope(s_grid[decade], ratios[decade])
    return DispersionReport(s_grid=s_grid, ratios=ratios, plateau_slope=slope)


# ---------------------------------------------------------------------------
# Localized decay of the free flow


def smooth_cutoff(y: np.ndarray, plateau: float = 2.0, width: float = 1.0) -> np.ndarray:
    """C-infinity bump: 1 on ``[-plateau, plateau]``, 0 beyond ``plateau + width``."""

    def ramp(z):
        out = np.zeros_like(z)
        pos = z > 0
        out[pos] = np.exp(-1.0 / z[pos])
        return out

    up = ramp((plateau + width - np.abs(y)) / width)
    down = ramp((np.abs(y) - plateau) / width)
    return up / (up + down + np.finfo(float).tiny)


@dataclass
class LocalizedDecayReport:
    s_grid: np.ndarray
    localized_norms: np.ndarray
    global_l2: np.ndarray
    slope: float
    reference_slope: float


def localized_decay_experiment(
    u: GridState, sigma: float, s_grid, plateau: float = 2.0, width: float = 1.0
) -> LocalizedDecayReport:
    """``||chi exp(is d^2) u||_{H^sigma}`` along the free flow, with decay fit.

    The unlocalized L^2 norm rides along as the unitarity control.  The fitted
    tail slope is reported against the dispersive reference ``-1/4`` (an upper
    bound; smooth localized data decays faster).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if u.geometry != "box":
        raise InvalidArgument("localized decay experiment expects a box state")
    y = box_grid(u.box_half_width, u.values.size)
    chi = smooth_cutoff(y, plateau, width)
    k = 2.0 * math.pi * np.fft.fftfreq(u.values.size, d=u.dy)
    sob = (1.0 + k * k) ** sigma
    dy = u.dy
    loc = np.empty(s_grid.size)
    glob = np.empty(s_grid.size)
    for i, s in enumerate(s_grid):
        evolved = linear_free(u, s) if s != 0.0 else u
        glob[i] = math.sqrt(dy * np.sum(np.abs(evolved.values) ** 2))
        hat = np.fft.fft(chi * evolved.values)
        loc[i] = math.sqrt(dy / u.values.size * np.sum(sob * np.abs(hat) ** 2))
    window = _fit_window(s_grid) & (s_grid > 0)
    slope, _ = _loglog_slope(s_grid[window], loc[window])
    return LocalizedDecayReport(
        s_grid=s_grid, localized_norms=loc, global_l2=glob,
        slope=slope, reference_slope=-0.25,
    )


# ---------------------------------------------------------------------------
# Weak-norm growth along the nonlinear flow


@dataclass
class NormGrowthReport:
    s_grid: np.ndarray
    norms: np.ndarray  # (samples, len(s_grid))
    median: np.ndarray
    slope: float
    intercept: float
    r_squared: float
    sigma: float


def norm_growth_experiment(
    law: CoefficientLaw, p: float, t_max_flat: float, n_modes: int, n_samples: int,
    stream: SampleStream, cfg: SolverConfig, sigma: float = -0.1, threads: int = 1,
) -> NormGrowthReport:
    """Track a weak Sobolev norm of the harmonic-picture state out to flat time ``T``.

    Fits ``norm^2`` against ``1 + ln s`` on the largest-s half (the claimed
    long-time ceiling grows like ``(ln s)^(1/2)``); purely diagnostic, no
    pass/fail attached.
    """
    if t_max_flat <= 1.0:
        raise InvalidArgument("need a horizon beyond s = 1")
    s_grid = np.geomspace(0.5, t_max_flat, 24)
    _check_s_grid(s_grid, cfg)
    t_grid = np.array([time_map(s, "to_harmonic") for s in s_grid])
    knots = np.concatenate([[0.0], t_grid])

    def one(i):
        u0 = sample(law, n_modes, stream.at(stream.index + i))
        try:
            traj = solve_harmonic_path(u0, knots, cfg)
        except NumericalFailure:
            return np.full(s_grid.size, np.nan)
        return np.array([sobolev_norm(st.coeffs, sigma) for st in traj.states[1:]])

    norms = np.array(map_indexed(one, n_samples, threads))
    ok = ~np.isnan(norms[:, 0])
    if not ok.any():
        raise NumericalFailure("every growth sample failed")
    median = np.median(norms[ok], axis=0)
    window = _fit_window(s_grid)
    x = 1.0 + np.log(s_grid[window])
    ysq = median[window] ** 2
    coeffs = np.polyfit(x, ysq, 1)
    fitted = np.polyval(coeffs, x)
    ss_res = float(np.sum((ysq - fitted) ** 2))
    ss_tot = float(np.sum((ysq - ysq.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return NormGrowthReport(
        s_grid=s_grid, norms=norms, median=median,
        slope=float(coeffs[0]), intercept=float(coeffs[1]), r_squared=r2, sigma=sigma,
    )
