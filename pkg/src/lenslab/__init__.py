"""Numerical laboratory for 1D defocusing NLS under the lens transform.

Hermite-spectral solvers for the oscillator picture, Fourier split-step for
the flat picture, Gaussian coefficient ensembles, and Monte Carlo experiments
for measure transport, decay, and scattering.
"""

from .backend import BACKEND, available_backends
from .basis import (
    BasisTable,
    GridState,
    QuadratureRule,
    SpectralState,
    analyze,
    box_grid,
    build_basis,
    evaluate_modes,
    lp_norm,
    norm,
    sobolev_norm,
    synthesize,
    tail_mass_fraction,
    wsp_norm,
)
from .classical import liouville_check, poincare_recurrence
from .errors import (
    DomainEscape,
    InvalidArgument,
    LenslabError,
    NotAbsolutelyContinuous,
    NumericalFailure,
)
from .evolution import (
    SolverConfig,
    TrajectoryRecord,
    energy,
    energy_derivative_check,
    linear_free,
    linear_harmonic,
    solve_flat,
    solve_flat_path,
    solve_harmonic,
    solve_harmonic_path,
)
from .experiments import (
    decay_experiment,
    dispersion_check,
    localized_decay_experiment,
    norm_growth_experiment,
    scattering_experiment,
)
from .lens import TimePair, flat_lp_norm, lens_forward, lens_inverse, time_map
from .measures import (
    CoeffBox,
    DiscreteMeasure,
    NormBall,
    SobolevBall,
    WeightedEstimate,
    bourgain_budget,
    estimate_event,
    estimate_pullback,
    holder_envelope,
    interaction_weight,
    monotonicity_bound,
    monotonicity_experiment,
    power_inequality_scan,
    rn_discrete,
)
from .randomfield import (
    CoefficientLaw,
    SampleStream,
    equivalence_diagnostic,
    law_by_name,
    mu0_law,
    rotation_invariance_test,
    sample,
    scaled_law,
    shifted_law,
    smoothing_tail_experiment,
)

__version__ = "0.1.0"
