"""Gaussian ensembles on coefficient space: sampling, equivalence, tail shape.

The reference law ``mu0`` puts independent complex Gaussians ``alpha_n g_n``
on the modes with ``alpha_n = (2n+1)^{-1/2}`` and ``E|g_n|^2 = 1``; it is the
thermal-equilibrium law of the linear oscillator flow, whose phases
``exp(-i(2n+1)t)`` leave every mode law invariant.

Support note: the expected squared mass of an N-mode truncation is the
harmonic-like sum ``sum_{n<N} 1/(2n+1) ~ log(N)/2``, which diverges as
``N -> infinity`` — the untruncated law lives strictly below L^2 (it charges
every H^{-eps} instead).  Finite truncations are of course square-summable,
so no invariant of this module tests the divergence; it is a modeling fact
to keep in mind when extrapolating ensemble statistics in N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import ks_2samp

from .basis import SpectralState, build_basis
from .errors import InvalidArgument

GAUSSIANS_PER_INDEX = 1 << 64  # counter-space stride between sample indices


@dataclass(frozen=True)
class CoefficientLaw:
    """Positive mode amplitudes ``alpha_n`` defining a diagonal Gaussian law."""

    name: str
    alpha_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def alphas(self, n_modes: int) -> np.ndarray:
        n = np.arange(n_modes)
        a = np.asarray(self.alpha_fn(n), dtype=float)
        if not np.isfinite(a).all() or (a <= 0).any():
            raise InvalidArgument(f"law {self.name!r} produced non-positive amplitudes")
        return a


def mu0_law() -> CoefficientLaw:
    """Oscillator equilibrium amplitudes ``(2n+1)^{-1/2}``."""
    return CoefficientLaw("mu0", lambda n: (2.0 * n + 1.0) ** -0.5)


def shifted_law() -> CoefficientLaw:
    """Index-shifted amplitudes ``(2n+3)^{-1/2}`` (equivalent to mu0)."""
    return CoefficientLaw("shifted", lambda n: (2.0 * n + 3.0) ** -0.5)


def scaled_law(c: float) -> CoefficientLaw:
    """Uniformly rescaled amplitudes ``c (2n+1)^{-1/2}`` (singular vs mu0 for c != 1)."""
    if not (c > 0 and math.isfinite(c)):
        raise InvalidArgument(f"scale must be positive and finite, got {c}")
    return CoefficientLaw(f"scaled({c:g})", lambda n: c * (2.0 * n + 1.0) ** -0.5)


def custom_law(table: np.ndarray, name: str = "custom") -> CoefficientLaw:
    table = np.asarray(table, dtype=float)

    def alpha_fn(n):
        if n.size > table.size:
            raise InvalidArgument(f"law {name!r} only tabulates {table.size} modes")
        return table[: n.size]

    return CoefficientLaw(name, alpha_fn)


_BUILTIN_LAWS = {"mu0": mu0_law, "shifted": shifted_law}


def law_by_name(name: str) -> CoefficientLaw:
    """Resolve a CLI-style law name: ``mu0``, ``shifted`` or ``scaled(c)``."""
    if name in _BUILTIN_LAWS:
        return _BUILTIN_LAWS[name]()
    if name.startswith("scaled(") and name.endswith(")"):
        return scaled_law(float(name[len("scaled(") : -1]))
    raise InvalidArgument(f"unknown law {name!r}")


@dataclass(frozen=True)
class SampleStream:
    """Counter-based RNG position: a pure function of ``(seed, index)``.

    Each index owns a disjoint 2^64 block of the Philox counter space, so
    ensembles are reproducible and order-independent however the per-sample
    work is scheduled.
    """

    seed: int
    index: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=self.seed, counter=self.index * GAUSSIANS_PER_INDEX)
        )

    def at(self, index: int) -> "SampleStream":
        return SampleStream(self.seed, index)

    def gaussians(self, n_modes: int) -> np.ndarray:
        """Standard complex Gaussians ``(g1 + i g2)/sqrt(2)`` with ``E|g|^2 = 1``."""
        flat = self.generator().standard_normal(2 * n_modes)
        return (flat[0::2] + 1j * flat[1::2]) / math.sqrt(2.0)


def sample(law: CoefficientLaw, n_modes: int, stream: SampleStream) -> SpectralState:
    """Draw one state with ``c_n = alpha_n g_n``; deterministic per (seed, index)."""
    if n_modes < 1:
        raise InvalidArgument(f"need n_modes >= 1, got {n_modes}")
    return SpectralState(law.alphas(n_modes) * stream.gaussians(n_modes))


def sample_matrix(law: CoefficientLaw, n_modes: int, n_samples: int, stream: SampleStream) -> np.ndarray:
    """Stack samples for indices ``stream.index .. stream.index + n_samples - 1``."""
    alphas = law.alphas(n_modes)
    out = np.empty((n_samples, n_modes), dtype=complex)
    for i in range(n_samples):
        out[i] = alphas * stream.at(stream.index + i).gaussians(n_modes)
    return out


# ---------------------------------------------------------------------------
# Equivalence diagnostic


@dataclass
class EquivalenceReport:
    partial_sums_ratio: np.ndarray
    partial_sums_log: np.ndarray
    tail_slope: float
    verdict: str


def equivalence_diagnostic(
    law_a: CoefficientLaw, law_b: CoefficientLaw, terms: int = 256
) -> EquivalenceReport:
    """Classify the pair as equivalent/singular from the ratio criterion.

    Computes partial sums of ``(alpha_n/beta_n - 1)^2`` (and of the symmetric
    log form) and fits the decay exponent ``q`` of the increments on the tail
    half: summable increments (q >= 1.2) mean the sum converges and the laws
    are equivalent; q <= 0.8 or increments bounded below mean divergence.
    """
    if terms < 16:
        raise InvalidArgument(f"need terms >= 16, got {terms}")
    a = law_a.alphas(terms)
    b = law_b.alphas(terms)
    inc_ratio = (a / b - 1.0) ** 2
    inc_log = (np.log(a) - np.log(b)) ** 2
    sums_ratio = np.cumsum(inc_ratio)
    sums_log = np.cumsum(inc_log)

    tail = inc_ratio[terms // 2 :]
    n_tail = np.arange(terms // 2, terms) + 1.0
    pos = tail > 0
    if not pos.any():
        return EquivalenceReport(sums_ratio, sums_log, math.inf, "equivalent")
    slope = -float(np.polyfit(np.log(n_tail[pos]), np.log(tail[pos]), 1)[0])
    if slope >= 1.2:
        verdict = "equivalent"
    elif slope <= 0.8:
        verdict = "singular"
    else:
        verdict = "inconclusive"
    return EquivalenceReport(sums_ratio, sums_log, slope, verdict)


# ---------------------------------------------------------------------------
# Phase-rotation invariance


@dataclass
class RotationReport:
    statistic: float
    p_value: float
    p_value_moduli: float


def rotation_invariance_test(
    t: float,
    n_modes: int,
    n_samples: int,
    stream: SampleStream,
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
) -> RotationReport:
    """Two-sample KS test that mode-wise phase rotation preserves the Gaussian law.

    Draws two independent ensembles of standard complex Gaussians, applies the
    phases ``exp(-i(2n+1)t)`` to the second one, and compares the pooled real
    parts (rotation-sensitive channel) plus the pooled moduli (control channel,
    identical in law by construction).  ``transform`` lets tests inject a
    non-invariant corruption such as ``abs`` to confirm the test has power.
    """
    if n_samples < 1000:
        raise InvalidArgument(f"need at least 10^3 samples, got {n_samples}")
    lam = 2.0 * np.arange(n_modes) + 1.0
    phases = np.exp(-1j * lam * t)
    ref = np.empty((n_samples, n_modes), dtype=complex)
    rot = np.empty((n_samples, n_modes), dtype=complex)
    for i in range(n_samples):
        ref[i] = stream.at(stream.index + i).gaussians(n_modes)
        g = stream.at(stream.index + n_samples + i).gaussians(n_modes)
        if transform is not None:
            g = transform(g)
        rot[i] = phases * g
    ks_real = ks_2samp(ref.real.ravel(), rot.real.ravel(), method="asymp")
    ks_mod = ks_2samp(np.abs(ref).ravel(), np.abs(rot).ravel(), method="asymp")
    return RotationReport(
        statistic=float(ks_real.statistic),
        p_value=float(ks_real.pvalue),
        p_value_moduli=float(ks_mod.pvalue),
    )


# ---------------------------------------------------------------------------
# Smoothing / large-deviation tail experiment


@dataclass
class TailReport:
    radii: np.ndarray
    tails: np.ndarray
    log_tails: np.ndarray
    censored: np.ndarray
    slope: float
    sup_norms: np.ndarray


def smoothing_tail_experiment(
    sigma: float,
    n_modes: int,
    n_samples: int,
    stream: SampleStream,
    radii: np.ndarray | None = None,
    t_points: int = 32,
    law: CoefficientLaw | None = None,
) -> TailReport:
    """Empirical tail of ``sup_t ||exp(-itH) u0||_{W^{sigma,inf}}`` over the ensemble.

    The linear flow is a diagonal phase, so each sample's trajectory is scanned
    on a ``t_points`` grid over ``(-pi, pi)`` and the sup-norm maximum recorded.
    Returns the exceedance curve on ``radii`` (auto-calibrated to ensemble
    quantiles when omitted) and the least-squares slope of ``log tail`` against
    ``R^2``, which should be negative with Gaussian concentration.
    """
    if not sigma < 1.0 / 6.0:
        raise InvalidArgument(f"sigma must be < 1/6, got {sigma}")
    if t_points < 8:
        raise InvalidArgument(f"need t_points >= 8, got {t_points}")
    law = law or mu0_law()
    basis = build_basis(n_modes, 2 * n_modes)
    lam = basis.eigenvalues
    ts = np.linspace(-math.pi, math.pi, t_points, endpoint=False)
    weight = lam ** (sigma / 2.0)

    sup_norms = np.empty(n_samples)
    coeffs = sample_matrix(law, n_modes, n_samples, stream)
    # max_t max_x |sum_n (2n+1)^{sigma/2} e^{-i(2n+1)t} c_n e_n(x)|, batched over samples
    best = np.zeros(n_samples)
    for t in ts:
        rotated = coeffs * (weight * np.exp(-1j * lam * t))
        grids = rotated @ basis.values
        np.maximum(best, np.abs(grids).max(axis=1), out=best)
    sup_norms = best

    if radii is None:
        qs = np.array([0.5, 0.7, 0.85, 0.93, 0.97, 0.99, 0.997])
        radii = np.quantile(sup_norms, qs)
    radii = np.asarray(radii, dtype=float)
    tails = np.array([(sup_norms >= r).mean() for r in radii])
    censored = tails == 0.0
    log_tails = np.where(censored, np.nan, np.log(np.where(censored, 1.0, tails)))
    ok = ~censored
    slope = float(np.polyfit(radii[ok] ** 2, log_tails[ok], 1)[0]) if ok.sum() >= 2 else math.nan
    return TailReport(radii, tails, log_tails, censored, slope, sup_norms)
