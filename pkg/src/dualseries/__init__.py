"""Adiabatic perturbation theory as the strong-coupling dual of the Dyson series.

Two-level models (Jaynes-Cummings, a precessing spin, a driven two-level
system, or user-supplied Hamiltonians), their instantaneous eigenframes, the
Dyson and adiabatic series order by order, reference propagators, and
diagnostics that compare the usual adiabaticity condition with the growth of
the series itself.
"""
from .diagnostics import (
    DiagnosticsReport,
    SlopeFit,
    Verdict,
    adiabaticity_lhs,
    first_order_secularity_schwinger,
    jacobi_anger_coeffs,
    jc_resummed_propagator,
    resum_jc_shift,
    secular_slope,
    validity_report,
)
from .errors import ConfigError, DualSeriesError, NumericError
from .expansion import SeriesKind, SeriesPropagator, adiabatic_u0, dual_dyson_expand, dyson_expand, partial_sum
from .models import (
    HamiltonianModel,
    ModelKind,
    eval_hamiltonian,
    make_driven_tls,
    make_generic,
    make_generic_sampled,
    make_jaynes_cummings,
    make_schwinger_spin,
)
from .numerics import TimeGrid, mat_exp_su2
from .oracle import OracleKind, exact_jc_propagator, exact_schwinger_propagator, numeric_propagate, oracle_path
from .spectral import FramePath, frame_path, instantaneous_eigensystem

__version__ = "0.1.0"
