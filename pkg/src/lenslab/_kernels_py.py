"""NumPy implementation of the harmonic split-step inner loop.

Drop-in twin of the compiled ``_kernels`` extension: identical stepping
sequence and substep control, so the two backends agree to rounding.
"""

from __future__ import annotations

import math

import numpy as np

# Largest admissible substep count before we declare the state unphysical.
MAX_SUBSTEPS = 1 << 24


def harmonic_advance(coeffs, values, analysis, t0, h_out, n_steps, theta, p, nonlinear):
    """Advance collocation coefficients through ``n_steps`` Strang steps of ``h_out``.

    One step is: half linear phase, pointwise nonlinear phase
    ``exp(-i lam(t_mid) |u|^(p-1) h)`` on the nodes, half linear phase.  Each
    outer step is split into enough substeps that the nonlinear phase per
    substep stays below ``theta``.  ``values`` is the square collocation table
    (modes x nodes) and ``analysis`` its weighted inverse.

    Returns ``(coeffs, substeps, fail_time)`` with ``fail_time = nan`` on
    success; the caller turns a finite ``fail_time`` into an exception.
    """
    c = np.array(coeffs, dtype=complex)
    m = c.size
    lam_exp = 0.5 * (p - 5.0)
    pm1_half = 0.5 * (p - 1.0)
    eigs = 2.0 * np.arange(m) + 1.0
    substeps = 0

    for k in range(n_steps):
        t_k = t0 + k * h_out
        if nonlinear:
            g = c @ values
            umax = float(np.abs(g).max(initial=0.0))
            if not math.isfinite(umax):
                return c, substeps, t_k
            lam_mid = 1.0 if lam_exp == 0.0 else math.cos(2.0 * (t_k + 0.5 * h_out)) ** lam_exp
            n_sub = max(1, math.ceil(lam_mid * umax ** (p - 1.0) * abs(h_out) / theta))
            if n_sub > MAX_SUBSTEPS:
                return c, substeps, t_k
        else:
            n_sub = 1
        h = h_out / n_sub
        half_phase = np.exp(-0.5j * eigs * h)
        for j in range(n_sub):
            c *= half_phase
            if nonlinear:
                g = c @ values
                t_mid = t_k + (j + 0.5) * h
                lam = 1.0 if lam_exp == 0.0 else math.cos(2.0 * t_mid) ** lam_exp
                a2 = g.real**2 + g.imag**2
                if p == 5.0:
                    amp = a2 * a2
                elif p == 3.0:
                    amp = a2
                else:
                    amp = a2**pm1_half
                g *= np.exp(-1j * (lam * h) * amp)
                c = analysis @ g
            c *= half_phase
        substeps += n_sub
        if not np.isfinite(c[0]):
            return c, substeps, t_k + h_out
    return c, substeps, math.nan
