"""Filtered splitting integrators for the cubic NLS on the torus, with
discrete Bourgain-space diagnostics and convergence experiments."""
from .errors import DivergenceError, InputShapeError, ParameterError
from .spectral import (
    SpectralField,
    analyze,
    derivative,
    linear_flow,
    project_pi_tau,
    projection_mask,
    sobolev_norm,
    synthesize,
    wavenumbers,
)
from .initial_data import RoughDataSpec, load_field, plane_wave, rough_field, save_field
from .integrators import (
    Scheme,
    StepperConfig,
    TimeSeries,
    commutator_residual,
    evolve,
    export_trajectory,
    mass,
    nonlinear_flow,
    step,
    telescopic_residual,
)
from .bourgain import (
    BourgainParams,
    dtau,
    lptau_lp_norm,
    parseval_gap,
    spacetime_transform,
    xsb_norm,
    xsb_norm_series,
)
from .probes import CATALOG, Ensemble, ProbeReport, inequality_probe
from .convergence import (
    ConvergenceReport,
    ExperimentConfig,
    fit_order,
    load_config,
    measure_error,
    projection_gap,
    reference_solution,
    run_ladder,
)

__version__ = "0.1.0"
