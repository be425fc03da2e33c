"""Hermite eigenbasis of the 1D oscillator -d^2/dx^2 + x^2, quadrature and norms.

The basis functions ``e_n`` are the L^2-normalized Hermite functions with
``(-d^2/dx^2 + x^2) e_n = (2n+1) e_n``.  All grid-side inner products use
Gauss-Hermite quadrature with the Gaussian weight absorbed into the stored
weights, so that products of two basis functions integrate exactly (up to
rounding) whenever the node count is at least the mode count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_hermite

from .errors import InvalidArgument, NumericalFailure

MAX_NODES = 4096

# Rescaling bounds for the overflow-protected recurrence.
_RESCALE_LIMIT = 1e150
_RESCALE_FACTOR = 1e-150
_RESCALE_LOG = -math.log(_RESCALE_FACTOR)


def hermite_function_table(n_modes: int, x: np.ndarray) -> np.ndarray:
    """Evaluate the first ``n_modes`` Hermite functions at the points ``x``.

    Uses the normalized three-term recurrence on exponent-compensated values:
    the recurrence runs on ``phi_n = e_n(x) * exp(-logscale)`` with a per-point
    ``logscale`` that starts at ``-x^2/2`` and is bumped whenever ``phi``
    threatens to overflow.  Rows are materialized through ``exp(log|phi| +
    logscale)`` so huge/tiny intermediates never meet in one product.

    Returns an ``(n_modes, len(x))`` float array.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_modes, x.size))
    phi_prev = np.zeros(x.size)
    phi = np.full(x.size, math.pi ** -0.25)
    logscale = -0.5 * x * x
    for n in range(n_modes):
        if n > 0:
            phi_next = np.sqrt(2.0 / n) * x * phi - np.sqrt((n - 1.0) / n) * phi_prev
            phi_prev, phi = phi, phi_next
            big = np.abs(phi) > _RESCALE_LIMIT
            if big.any():
                phi[big] *= _RESCALE_FACTOR
                phi_prev[big] *= _RESCALE_FACTOR
                logscale[big] += _RESCALE_LOG
        row = out[n]
        row.fill(0.0)
        nz = phi != 0.0
        row[nz] = np.sign(phi[nz]) * np.exp(np.log(np.abs(phi[nz])) + logscale[nz])
    if not np.isfinite(out).all():
        raise NumericalFailure(f"Hermite recurrence lost stability at n_modes={n_modes}")
    return out


def _recurrence_top(n_top: int, x: np.ndarray):
    """Run the compensated recurrence up to degree ``n_top``.

    Returns ``(phi_top, phi_below)`` sharing one hidden scale per point, which
    is all Newton's method needs: the scale cancels in the ratio
    ``e_N / e_N'`` with ``e_N' = sqrt(2N) e_{N-1} - x e_N``.
    """
    phi_prev = np.zeros(x.size)
    phi = np.full(x.size, math.pi ** -0.25)
    for n in range(1, n_top + 1):
        phi_next = np.sqrt(2.0 / n) * x * phi - np.sqrt((n - 1.0) / n) * phi_prev
        phi_prev, phi = phi, phi_next
        big = np.abs(phi) > _RESCALE_LIMIT
        if big.any():
            phi[big] *= _RESCALE_FACTOR
            phi_prev[big] *= _RESCALE_FACTOR
    return phi, phi_prev


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes with Gaussian-compensated weights.

    ``weights[j]`` already contains the factor ``exp(x_j^2)``, i.e.
    ``sum_j weights[j] * f(x_j)`` approximates ``int f(x) dx`` exactly for
    ``f = P(x) exp(-x^2)`` with ``deg P <= 2*count - 1``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    count: int


@dataclass(frozen=True)
class BasisTable:
    """Immutable table of basis values on a quadrature grid.

    ``values[n, j] = e_n(nodes[j])`` and ``eigenvalues[n] = 2n+1``.  Safe to
    share across threads; every operation here is a pure function of it.
    """

    n_modes: int
    rule: QuadratureRule
    values: np.ndarray
    eigenvalues: np.ndarray
    _analysis: np.ndarray = field(repr=False, default=None)

    @property
    def analysis_matrix(self) -> np.ndarray:
        """Weighted values, so ``analysis_matrix @ grid`` gives coefficients."""
        return self._analysis


@dataclass
class SpectralState:
    """Complex coefficient vector in the oscillator eigenbasis."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1:
            raise InvalidArgument("coefficients must be one-dimensional")
        if not np.isfinite(self.coeffs).all():
            raise InvalidArgument("coefficients contain NaN/Inf")

    def __len__(self):
        return self.coeffs.size


@dataclass
class GridState:
    """Complex samples on a spatial grid.

    ``geometry`` is ``"hermite"`` (Gauss-Hermite nodes of a companion
    :class:`BasisTable`) or ``"box"`` (uniform periodic grid on ``[-L, L)``).
    """

    values: np.ndarray
    geometry: str
    box_half_width: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.geometry not in ("hermite", "box"):
            raise InvalidArgument(f"unknown geometry {self.geometry!r}")
        if self.geometry == "box" and not (self.box_half_width and self.box_half_width > 0):
            raise InvalidArgument("box geometry requires a positive half-width")
        if not np.isfinite(self.values).all():
            raise InvalidArgument("grid values contain NaN/Inf")

    @property
    def dy(self) -> float:
        if self.geometry != "box":
            raise InvalidArgument("dy is only defined for box geometry")
        return 2.0 * self.box_half_width / self.values.size


def box_grid(half_width: float, n: int) -> np.ndarray:
    """Uniform periodic grid on ``[-L, L)`` with ``n`` points."""
    return -half_width + 2.0 * half_width * np.arange(n) / n


@lru_cache(maxsize=32)
def build_basis(n_modes: int, n_quad: int) -> BasisTable:
    """Build the basis table with ``n_modes`` modes on ``n_quad`` quadrature nodes.

    Nodes start from scipy's Golub-Welsch values and get two Newton polish
    sweeps against ``e_{n_quad}``; weights come from the Christoffel identity
    ``w_j * exp(x_j^2) = 1 / sum_{k<n_quad} e_k(x_j)^2``, which never touches
    the underflowing bare Gauss-Hermite weights.  Deterministic: identical
    arguments produce a bit-identical (cached, read-only) table.
    """
    if not (1 <= n_modes <= n_quad <= MAX_NODES):
        raise InvalidArgument(
            f"need 1 <= n_modes <= n_quad <= {MAX_NODES}, got ({n_modes}, {n_quad})"
        )
    nodes = roots_hermite(n_quad)[0]
    for _ in range(2):
        top, below = _recurrence_top(n_quad, nodes)
        deriv = np.sqrt(2.0 * n_quad) * below - nodes * top
        nodes = nodes - top / deriv
    nodes = 0.5 * (nodes - nodes[::-1])  # enforce exact symmetry about 0

    # One combined pass: materialize the first n_modes rows and accumulate the
    # Christoffel sum over all n_quad rows.
    table = hermite_function_table(n_quad, nodes)
    christoffel = np.einsum("nj,nj->j", table, table)
    weights = 1.0 / christoffel
    values = np.ascontiguousarray(table[:n_modes])

    eigenvalues = 2.0 * np.arange(n_modes) + 1.0
    analysis = values * weights
    for arr in (nodes, weights, values, eigenvalues, analysis):
        arr.setflags(write=False)
    rule = QuadratureRule(nodes=nodes, weights=weights, count=n_quad)
    return BasisTable(
        n_modes=n_modes,
        rule=rule,
        values=values,
        eigenvalues=eigenvalues,
        _analysis=analysis,
    )


def synthesize(state: SpectralState, basis: BasisTable) -> GridState:
    """Sum the coefficient series on the quadrature nodes."""
    coeffs = state.coeffs
    if coeffs.size > basis.n_modes:
        raise InvalidArgument(
            f"state has {coeffs.size} modes but basis holds {basis.n_modes}"
        )
    grid = coeffs @ basis.values[: coeffs.size]
    return GridState(values=grid, geometry="hermite")


def analyze(grid: GridState, basis: BasisTable) -> SpectralState:
    """Project node samples back onto the basis (left-inverse of synthesize)."""
    if grid.geometry != "hermite":
        raise InvalidArgument("analyze expects samples on hermite nodes")
    if grid.values.size != basis.rule.count:
        raise InvalidArgument(
            f"grid has {grid.values.size} samples, rule has {basis.rule.count} nodes"
        )
    return SpectralState(coeffs=basis.analysis_matrix @ grid.values)


def evaluate_modes(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate ``sum_n coeffs[n] e_n`` at arbitrary points."""
    coeffs = np.asarray(coeffs, dtype=complex)
    table = hermite_function_table(coeffs.size, np.asarray(points, dtype=float))
    return coeffs @ table


# ---------------------------------------------------------------------------
# Norms


def sobolev_norm(coeffs: np.ndarray, sigma: float) -> float:
    """Coefficient-side harmonic Sobolev norm ``(sum (2n+1)^sigma |c_n|^2)^(1/2)``."""
    coeffs = np.asarray(coeffs)
    lam = 2.0 * np.arange(coeffs.size) + 1.0
    return float(np.sqrt(np.sum(lam**sigma * np.abs(coeffs) ** 2)))


def lp_norm(grid: GridState, p: float, basis: BasisTable | None = None) -> float:
    """L^p norm of grid samples by quadrature (hermite) or rectangle rule (box)."""
    if p < 1:
        raise InvalidArgument(f"need p >= 1, got {p}")
    absu = np.abs(grid.values)
    if np.isinf(p):
        return float(absu.max(initial=0.0))
    if grid.geometry == "hermite":
        if basis is None:
            raise InvalidArgument("hermite-node L^p norms need the basis table")
        if grid.values.size != basis.rule.count:
            raise InvalidArgument("grid length does not match the basis rule")
        return float(np.sum(basis.rule.weights * absu**p) ** (1.0 / p))
    return float((grid.dy * np.sum(absu**p)) ** (1.0 / p))


def wsp_norm(coeffs: np.ndarray, sigma: float, p: float, basis: BasisTable) -> float:
    """Harmonic Sobolev W^{sigma,p} norm: apply H^{sigma/2} mode-wise, then grid L^p."""
    coeffs = np.asarray(coeffs, dtype=complex)
    lam = 2.0 * np.arange(coeffs.size) + 1.0
    scaled = SpectralState(coeffs * lam ** (sigma / 2.0))
    return lp_norm(synthesize(scaled, basis), p, basis)


def norm(state, kind: str, *, sigma: float = 0.0, p: float = 2.0, basis=None) -> float:
    """Dispatch on ``kind`` in {"sobolev", "wsp", "lp"}.

    ``sobolev`` takes a :class:`SpectralState`; ``wsp`` takes a spectral state
    plus a basis; ``lp`` takes either a :class:`GridState` or a spectral state
    that is synthesized first.
    """
    if not -2.0 <= sigma <= 2.0:
        raise InvalidArgument(f"sigma must lie in [-2, 2], got {sigma}")
    if kind == "sobolev":
        if not isinstance(state, SpectralState):
            raise InvalidArgument("sobolev norms are coefficient-side")
        return sobolev_norm(state.coeffs, sigma)
    if kind == "wsp":
        if not isinstance(state, SpectralState) or basis is None:
            raise InvalidArgument("wsp norms need a spectral state and a basis")
        return wsp_norm(state.coeffs, sigma, p, basis)
    if kind == "lp":
        if isinstance(state, SpectralState):
            if basis is None:
                raise InvalidArgument("lp norm of a spectral state needs a basis")
            state = synthesize(state, basis)
        return lp_norm(state, p, basis)
    raise InvalidArgument(f"unknown norm kind {kind!r}")


def tail_mass_fraction(coeffs: np.ndarray, tail: float = 0.1) -> float:
    """Fraction of the squared-l2 mass carried by the last ``tail`` of the modes.

    Used to warn when quadrature L^p norms are evaluated on underresolved
    states (rough tails are where Gauss-Hermite accuracy dies first).
    """
    coeffs = np.asarray(coeffs)
    total = float(np.sum(np.abs(coeffs) ** 2))
    if total == 0.0:
        return 0.0
    k = max(1, int(math.ceil(tail * coeffs.size)))
    return float(np.sum(np.abs(coeffs[-k:]) ** 2) / total)
