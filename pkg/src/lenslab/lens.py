"""Change of variables between flat NLS on the line and the weighted
oscillator equation on ``|t| < pi/4``.

Forward map (flat solution ``U`` at ``s = tan(2t)/2`` to harmonic picture):
``u(t,x) = cos(2t)^(-1/2) U(s, x/cos(2t)) exp(-i x^2 tan(2t)/2)``.
The map is an L^2 isometry in both directions and compactifies flat time
``s in R`` into ``t in (-pi/4, pi/4)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import (
    BasisTable,
    GridState,
    SpectralState,
    analyze,
    box_grid,
    evaluate_modes,
    lp_norm,
    synthesize,
)
from .errors import DomainEscape, InvalidArgument

QUARTER_PI = math.pi / 4.0
TWO_PI = 2.0 * math.pi


def time_map(value: float, direction: str) -> float:
    """Convert between the harmonic clock t and the flat clock s.

    ``to_flat`` maps ``|t| < pi/4`` to ``s = tan(2t)/2``; ``to_harmonic`` maps
    any ``s`` to ``t = arctan(2s)/2``.  Near the cap the bare float round trip
    degrades like ``4|s| eps`` (t quantization); :class:`TimePair` carries both
    clocks when exact pairing matters.
    """
    if direction == "to_flat":
        if abs(value) >= QUARTER_PI:
            raise InvalidArgument(f"|t| must be < pi/4, got {value}")
        return math.tan(2.0 * value) / 2.0
    if direction == "to_harmonic":
        return math.atan(2.0 * value) / 2.0
    raise InvalidArgument(f"direction must be to_flat or to_harmonic, got {direction!r}")


@dataclass(frozen=True)
class TimePair:
    """A consistent (harmonic, flat) clock pair ``s = tan(2t)/2``."""

    t: float
    s: float

    @staticmethod
    def from_flat(s: float) -> "TimePair":
        return TimePair(t=time_map(s, "to_harmonic"), s=s)

    @staticmethod
    def from_harmonic(t: float) -> "TimePair":
        return TimePair(t=t, s=time_map(t, "to_flat"))


def _chirp(theta: np.ndarray) -> np.ndarray:
    # argument reduction mod 2*pi before exp; |x|^2 tan(2t) grows near the cap
    return np.exp(-1j * np.remainder(theta, TWO_PI))


def trig_interpolate(grid: GridState, targets: np.ndarray) -> np.ndarray:
    """Band-limited (trigonometric) evaluation of box samples at arbitrary points."""
    if grid.geometry != "box":
        raise InvalidArgument("trigonometric interpolation needs box geometry")
    n = grid.values.size
    L = grid.box_half_width
    hat = np.fft.fft(grid.values) / n
    modes = np.fft.fftfreq(n, d=1.0 / n)  # signed integer mode numbers
    phases = np.exp(1j * math.pi / L * np.outer(targets + L, modes))
    return phases @ hat


def lens_forward(U: GridState, t: float, basis: BasisTable) -> GridState:
    """Map a flat-picture box state at ``s = tan(2t)/2`` onto hermite nodes at ``t``."""
    if abs(t) >= QUARTER_PI:
        raise InvalidArgument(f"|t| must be < pi/4, got {t}")
    if U.geometry != "box":
        raise InvalidArgument("lens_forward expects a box state")
    cos2t = math.cos(2.0 * t)
    x = basis.rule.nodes
    targets = x / cos2t
    worst = float(np.abs(targets).max())
    if worst > U.box_half_width:
        raise DomainEscape(
            f"lens evaluation needs |y| up to {worst:.4g} beyond the box half-width "
            f"{U.box_half_width:g}",
            abscissa=worst,
        )
    vals = trig_interpolate(U, targets)
    u = cos2t**-0.5 * vals * _chirp(x * x * math.tan(2.0 * t) / 2.0)
    return GridState(u, "hermite")


def lens_inverse(
    u, t: float, half_width: float, n_points: int, basis: BasisTable | None = None
) -> GridState:
    """Map a harmonic-picture state at ``t`` onto a flat box grid at ``s = tan(2t)/2``.

    Accepts a :class:`SpectralState` (evaluated exactly through the basis
    recurrence) or hermite-node samples plus their basis (analyzed first).
    """
    if abs(t) >= QUARTER_PI:
        raise InvalidArgument(f"|t| must be < pi/4, got {t}")
    if isinstance(u, GridState):
        if basis is None:
            raise InvalidArgument("grid input needs the matching basis table")
        u = analyze(u, basis)
    cos2t = math.cos(2.0 * t)
    sin2t = math.sin(2.0 * t)
    y = box_grid(half_width, n_points)
    vals = evaluate_modes(u.coeffs, y * cos2t)
    U = cos2t**0.5 * vals / _chirp(y * y * (cos2t * sin2t / 2.0))
    return GridState(U, "box", half_width)


def flat_lp_norm(u: SpectralState, t: float, q: float, basis: BasisTable) -> float:
    """L^q norm of the flat-picture state through the exact change of variables.

    ``||U(s)||_q = cos(2t)^(1/2 - 1/q) ||u(t)||_q`` — this evaluates the flat
    norm over all of R from hermite-node quadrature alone, so it stays valid
    at large s where no finite box could hold the dispersed state.
    """
    if abs(t) >= QUARTER_PI:
        raise InvalidArgument(f"|t| must be < pi/4, got {t}")
    cos2t = math.cos(2.0 * t)
    return cos2t ** (0.5 - 1.0 / q) * lp_norm(synthesize(u, basis), q, basis)
