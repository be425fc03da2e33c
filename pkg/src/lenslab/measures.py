"""Weighted Gaussian measures on the mode truncation and their transport.

The reference ensemble is the Gaussian law of :mod:`randomfield`; the weighted
measure at time ``t`` attaches the density ``exp(-a(t,u))`` with
``a(t,u) = cos(2t)^((p-5)/2)/(p+1) ||u||_{p+1}^{p+1}`` to each sample.  Event
probabilities under the weighted measure and under its pullback through the
nonlinear flow are then plain Monte Carlo averages, which is what the
monotonicity experiment compares against the Hoelder-envelope bound.

Also here: the discrete Radon-Nikodym toolkit (exact subset enumeration on
small atom sets) and the globalization budget calculator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import BasisTable, SpectralState, build_basis, lp_norm, sobolev_norm, synthesize
from .errors import InvalidArgument, NotAbsolutelyContinuous, NumericalFailure
from .evolution import QUARTER_PI, SolverConfig, advance_state, cos_coefficient
from .parallel import map_indexed
from .randomfield import CoefficientLaw, SampleStream, mu0_law, sample

CALIBRATION_INDEX_BASE = 1 << 40  # calibration draws live far from estimate draws


# ---------------------------------------------------------------------------
# Events


@dataclass(frozen=True)
class NormBall:
    """``{u : ||u||_q <= radius}`` with the grid L^q norm."""

    q: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("ball radius must be positive")

    def contains(self, state: SpectralState, basis: BasisTable) -> bool:
        if math.isinf(self.radius):
            return True
        return lp_norm(synthesize(state, basis), self.q, basis) <= self.radius


@dataclass(frozen=True)
class SobolevBall:
    """``{u : ||u||_{H^sigma} <= radius}`` on the coefficient side."""

    sigma: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidArgument("ball radius must be positive")

    def contains(self, state: SpectralState, basis: BasisTable) -> bool:
        if math.isinf(self.radius):
            return True
        return sobolev_norm(state.coeffs, self.sigma) <= self.radius


@dataclass(frozen=True)
class CoeffBox:
    """``{u : |c_n| <= bounds[n] for n < len(bounds)}``; phase-rotation invariant."""

    bounds: tuple

    def __post_init__(self):
        if any(b <= 0 for b in self.bounds):
            raise InvalidArgument("box bounds must be positive")

    def contains(self, state: SpectralState, basis: BasisTable) -> bool:
        k = min(len(self.bounds), state.coeffs.size)
        return bool(np.all(np.abs(state.coeffs[:k]) <= np.asarray(self.bounds[:k])))


# ---------------------------------------------------------------------------
# Weights and Monte Carlo estimates


@dataclass
class WeightedEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    censored: bool = False
    failed: int = 0


def interaction_weight(t: float, u: SpectralState, p: float, basis: BasisTable) -> float:
    """Density ``exp(-cos(2t)^((p-5)/2)/(p+1) ||u||_{p+1}^{p+1})`` in ``(0, 1]``."""
    q = p + 1.0
    a = cos_coefficient(t, p) / q * lp_norm(synthesize(u, basis), q, basis) ** q
    return math.exp(-a)


def _measure_system(n_modes: int) -> BasisTable:
    # Unpadded square system: the flow, the weight functional and the event
    # norms then share one finite-dimensional Hamiltonian structure.
    return build_basis(n_modes, n_modes)


def _mean_estimate(values: np.ndarray, stream: SampleStream, failed: int = 0) -> WeightedEstimate:
    m = values.size
    mean = float(values.mean()) if m else 0.0
    stderr = float(values.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    return WeightedEstimate(
        value=mean, stderr=stderr, samples=m, seed=stream.seed,
        censored=bool(m and mean == 0.0), failed=failed,
    )


def estimate_event(
    t: float, event, p: float, n_modes: int, n_samples: int, stream: SampleStream,
    law: CoefficientLaw | None = None, threads: int = 1,
) -> WeightedEstimate:
    """Monte Carlo estimate of the weighted measure of ``event`` at time ``t``."""
    if n_samples < 100:
        raise InvalidArgument(f"need at least 100 samples, got {n_samples}")
    law = law or mu0_law()
    basis = _measure_system(n_modes)

    def one(i):
        u = sample(law, n_modes, stream.at(stream.index + i))
        if not event.contains(u, basis):
            return 0.0
        return interaction_weight(t, u, p, basis)

    values = np.array(map_indexed(one, n_samples, threads))
    return _mean_estimate(values, stream)


def estimate_pullback(
    t: float, event, p: float, n_modes: int, n_samples: int, stream: SampleStream,
    cfg: SolverConfig | None = None, law: CoefficientLaw | None = None, threads: int = 1,
) -> WeightedEstimate:
    """Estimate of the time-0 weighted measure of the flow preimage of ``event``.

    Each sample is weighted at time 0 and the event is tested on its nonlinear
    evolution to time ``t``.  At ``t = 0`` this reproduces
    :func:`estimate_event` sample for sample (identical stream, identical
    arithmetic).  Per-sample solver failures are excluded and counted.
    """
    if n_samples < 100:
        raise InvalidArgument(f"need at least 100 samples, got {n_samples}")
    law = law or mu0_law()
    cfg = cfg or measure_solver_config(p)
    basis = _measure_system(n_modes)

    def one(i):
        u0 = sample(law, n_modes, stream.at(stream.index + i))
        w0 = interaction_weight(0.0, u0, p, basis)
        if t == 0.0:
            return (w0 if event.contains(u0, basis) else 0.0, False)
        try:
            u_t = advance_state(u0, 0.0, t, cfg, work=basis)
        except NumericalFailure:
            return (0.0, True)
        return (w0 if event.contains(u_t, basis) else 0.0, False)

    results = map_indexed(one, n_samples, threads)
    ok = np.array([v for v, bad in results if not bad])
    failed = sum(1 for _, bad in results if bad)
    est = _mean_estimate(ok, stream, failed=failed)
    if failed > 0.01 * n_samples:
        est.censored = True
    return est


def measure_solver_config(p: float, dt: float = 2e-3) -> SolverConfig:
    """Solver settings for measure transport: unpadded flow on the measure's modes."""
    return SolverConfig(p=p, dt=dt, theta=0.1, t_cap=QUARTER_PI - 0.01, dealias=False)


# ---------------------------------------------------------------------------
# Monotonicity bound and experiment


def monotonicity_bound(p: float, t: float, x: float) -> float:
    """``x^(cos(2t)^((5-p)/2))`` for ``1 <= p <= 5``; the identity for ``p >= 5``."""
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"bound input must lie in [0,1], got {x}")
    if abs(t) >= QUARTER_PI:
        raise InvalidArgument(f"|t| must be < pi/4, got {t}")
    if p >= 5.0:
        return x
    return x ** (math.cos(2.0 * t) ** (0.5 * (5.0 - p)))


def holder_envelope(f_value: float):
    """Minimize ``(k/e) F^(1-1/k)`` over ``k >= 1``.

    Interior optimum ``k* = -log F`` with value ``-F log F`` once
    ``F <= 1/e``; otherwise the constraint ``k = 1`` binds with value ``1/e``.
    Returns ``(k_star, value)``.
    """
    if not 0.0 < f_value < 1.0:
        raise InvalidArgument(f"need F in (0,1), got {f_value}")
    if f_value <= math.exp(-1.0):
        k_star = -math.log(f_value)
        return k_star, -f_value * math.log(f_value)
    return 1.0, math.exp(-1.0)


@dataclass
class MonotonicityReport:
    lhs: WeightedEstimate
    rhs_raw: WeightedEstimate
    rhs: float
    rhs_stderr: float
    exponent: float
    verdict: str
    event: object
    p: float
    t: float

    def combined_stderr(self) -> float:
        return math.hypot(self.lhs.stderr, self.rhs_stderr)


def calibrate_event(
    p: float, n_modes: int, stream: SampleStream, n_calibration: int = 512,
    law: CoefficientLaw | None = None,
) -> NormBall:
    """Median-radius L^(p+1) ball, so indicator hit rates sit far from 0 and 1."""
    law = law or mu0_law()
    basis = _measure_system(n_modes)
    q = p + 1.0
    cal = SampleStream(stream.seed, CALIBRATION_INDEX_BASE)
    norms = [
        lp_norm(synthesize(sample(law, n_modes, cal.at(cal.index + i)), basis), q, basis)
        for i in range(n_calibration)
    ]
    return NormBall(q=q, radius=float(np.median(norms)))


def monotonicity_experiment(
    p: float, t: float, n_modes: int, n_samples: int, stream: SampleStream,
    event=None, cfg: SolverConfig | None = None, threads: int = 1,
) -> MonotonicityReport:
    """Compare the pullback estimate against the envelope of the event estimate.

    ``lhs <= rhs + 2 sigma`` passes, beyond ``4 sigma`` fails, in between is
    flagged; the rhs error bar goes through the exponent by the delta method.
    Estimates too close to zero are censored rather than judged.
    """
    cfg = cfg or measure_solver_config(p)
    if event is None:
        event = calibrate_event(p, n_modes, stream)
    lhs = estimate_pullback(t, event, p, n_modes, n_samples, stream, cfg, threads=threads)
    rhs_raw = estimate_event(t, event, p, n_modes, n_samples, stream, threads=threads)

    if p >= 5.0:
        exponent = 1.0
        rhs = rhs_raw.value
        rhs_stderr = rhs_raw.stderr
    else:
        exponent = math.cos(2.0 * t) ** (0.5 * (5.0 - p))
        rhs = monotonicity_bound(p, t, rhs_raw.value)
        rhs_stderr = (
            exponent * rhs_raw.value ** (exponent - 1.0) * rhs_raw.stderr
            if rhs_raw.value > 0 else 0.0
        )

    if (
        lhs.censored or rhs_raw.censored
        or rhs_raw.value < 10.0 * rhs_raw.stderr
        or lhs.value < 10.0 * lhs.stderr
    ):
        verdict = "censored"
    else:
        sigma = math.hypot(lhs.stderr, rhs_stderr)
        if lhs.value <= rhs + 2.0 * sigma:
            verdict = "holds"
        elif lhs.value > rhs + 4.0 * sigma:
            verdict = "violated"
        else:
            verdict = "violated-within-noise"
    return MonotonicityReport(
        lhs=lhs, rhs_raw=rhs_raw, rhs=rhs, rhs_stderr=rhs_stderr,
        exponent=exponent, verdict=verdict, event=event, p=p, t=t,
    )


# ---------------------------------------------------------------------------
# Discrete Radon-Nikodym toolkit


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite measure on atoms, given by nonnegative masses."""

    atoms: tuple

    def __post_init__(self):
        arr = np.asarray(self.atoms, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidArgument("need a one-dimensional nonempty mass vector")
        if not np.isfinite(arr).all() or (arr < 0).any():
            raise InvalidArgument("masses must be finite and nonnegative")

    @property
    def masses(self) -> np.ndarray:
        return np.asarray(self.atoms, dtype=float)

    @staticmethod
    def from_csv(path) -> "DiscreteMeasure":
        vals = [float(line) for line in open(path) if line.strip()]
        return DiscreteMeasure(tuple(vals))


MAX_ATOMS = 24


@dataclass
class DensityReport:
    density: np.ndarray
    sup: float
    weak_constants: dict


def rn_discrete(mu: DiscreteMeasure, nu: DiscreteMeasure, weak_ps=()) -> DensityReport:
    """Atomwise density ``f = mu/nu`` with sup and weak-L^p tail constants.

    ``weak_constants[p]`` is the smallest ``C`` with
    ``nu({f >= lam}) <= C lam^{-p}`` over the attained levels ``lam in {f_i}``.
    """
    m = mu.masses
    n = nu.masses
    if m.size != n.size:
        raise InvalidArgument("measures must share their atom set")
    if ((m > 0) & (n == 0)).any():
        raise NotAbsolutelyContinuous("mass on a null atom: no density exists")
    f = np.divide(m, n, out=np.zeros_like(m), where=n > 0)
    weak = {}
    for pw in weak_ps:
        consts = [
            float(n[f >= lam].sum() * lam**pw) for lam in np.unique(f[f > 0])
        ]
        weak[pw] = max(consts) if consts else 0.0
    return DensityReport(density=f, sup=float(f.max()), weak_constants=weak)


def _subset_sums(masses: np.ndarray) -> np.ndarray:
    """Sums over all 2^m subsets, indexed by bitmask."""
    m = masses.size
    sums = np.zeros(1 << m)
    for b in range(m):
        block = 1 << b
        sums[block : 2 * block] = sums[:block] + masses[b]
    return sums


@dataclass
class PowerScanReport:
    best_constant: float
    witness: tuple
    alpha: float


def power_inequality_scan(mu: DiscreteMeasure, nu: DiscreteMeasure, alpha: float) -> PowerScanReport:
    """Exact ``max_A mu(A)/nu(A)^alpha`` over nonempty subsets by enumeration."""
    if not 0.0 < alpha <= 1.0:
        raise InvalidArgument(f"need alpha in (0,1], got {alpha}")
    m = mu.masses
    n = nu.masses
    if m.size != n.size:
        raise InvalidArgument("measures must share their atom set")
    if m.size > MAX_ATOMS:
        raise InvalidArgument(f"enumeration is limited to {MAX_ATOMS} atoms")
    mu_sums = _subset_sums(m)[1:]
    nu_sums = _subset_sums(n)[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(
            nu_sums > 0, mu_sums / nu_sums**alpha,
            np.where(mu_sums > 0, math.inf, 0.0),
        )
    best = int(np.argmax(ratios))
    mask = best + 1
    witness = tuple(i for i in range(m.size) if mask >> i & 1)
    return PowerScanReport(best_constant=float(ratios[best]), witness=witness, alpha=alpha)


# ---------------------------------------------------------------------------
# Globalization budget


@dataclass
class BudgetReport:
    kappa: float
    c: float
    prefactor: float
    radius: float
    tau: float
    horizon: float
    steps: int
    union_bound: float
    target: float
    ratio: float
    degenerate: bool
    norm_level: float

    def growth_curve(self, t: np.ndarray) -> np.ndarray:
        """Implied long-time norm ceiling ``C (ln|t| + 1)^(1/2)``."""
        return self.prefactor * (np.log(np.abs(t)) + 1.0) ** 0.5


def bourgain_budget(kappa: float, c: float, prefactor: float, radius: float) -> BudgetReport:
    """Arithmetic of the globalization budget.

    Local existence time ``tau = R^-kappa``, horizon ``T = exp(cR/2)``,
    ``steps = 2 floor(T/tau) + 1`` time slots, union bound
    ``steps * C exp(-cR)`` against the target level ``C exp(-cR/2)``; the
    guaranteed norm level on the surviving set is ``(R+1)^(1/2)``.
    """
    if min(kappa, c, prefactor, radius) <= 0:
        raise InvalidArgument("all budget parameters must be positive")
    tau = radius**-kappa
    horizon = math.exp(c * radius / 2.0)
    steps = 2 * int(math.floor(horizon / tau)) + 1
    union_bound = steps * prefactor * math.exp(-c * radius)
    target = prefactor * math.exp(-c * radius / 2.0)
    return BudgetReport(
        kappa=kappa, c=c, prefactor=prefactor, radius=radius,
        tau=tau, horizon=horizon, steps=steps,
        union_bound=union_bound, target=target, ratio=union_bound / target,
        degenerate=steps <= 1, norm_level=math.sqrt(radius + 1.0),
    )
