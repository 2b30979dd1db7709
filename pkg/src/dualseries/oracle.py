"""Reference propagators used to judge the series.

The Jaynes-Cummings and Schwinger closed forms are coded straight from their
amplitude formulas and never touch the spectral module. Everything else goes
through :func:`numeric_propagate`, a structure-preserving exponential
integrator (each step is an exact unitary exponential).
"""
from __future__ import annotations

import enum
import math

import numpy as np

from .bessel import bessel_j0
from .errors import InvalidParam, StepTooLarge, WrongModelKind
from .models import HamiltonianModel, ModelKind, eval_hamiltonian
from .numerics import SIGMA_X, SIGMA_Z, TimeGrid, cumulative_left_product, exp_antihermitian, mat_exp_su2, polar_correct
from .spectral import eigensystem

MAX_PHASE_PER_STEP = 0.1


class OracleKind(str, enum.Enum):
    CLOSED_FORM_JC = "ClosedFormJC"
    CLOSED_FORM_SCHWINGER = "ClosedFormSchwinger"
    RESUMMED_DRIVEN_TLS = "ResummedDrivenTLS"
    NUMERIC_MIDPOINT = "NumericMidpoint"


_CLOSED_FORM_KIND = {
    OracleKind.CLOSED_FORM_JC: ModelKind.JAYNES_CUMMINGS,
    OracleKind.CLOSED_FORM_SCHWINGER: ModelKind.SCHWINGER_SPIN,
    OracleKind.RESUMMED_DRIVEN_TLS: ModelKind.DRIVEN_TLS,
}


def _stack(t: np.ndarray, u00, u01, u10, u11) -> np.ndarray:
    out = np.empty(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = u00
    out[..., 0, 1] = u01
    out[..., 1, 0] = u10
    out[..., 1, 1] = u11
    return out


def _require(model: HamiltonianModel, kind: ModelKind):
    if model.kind is not kind:
        raise WrongModelKind(f"expected a {kind.value} model, got {model.kind.value}")


def exact_jc_propagator(model: HamiltonianModel, t) -> np.ndarray:
    """Interaction-picture JC propagator on ``{|1,n+1>, |2,n>}``; column j evolves basis state j."""
    _require(model, ModelKind.JAYNES_CUMMINGS)
    t = np.asarray(t, dtype=float)
    delta = model.params["delta"]
    rabi = model.rabi
    om = model.omega_n
    c = np.cos(om * t / 2)
    if om == 0.0:
        s_over = 0.5 * t  # sin(om t/2)/om at om -> 0
        s = np.zeros_like(t)
    else:
        s = np.sin(om * t / 2)
        s_over = s / om
    em = np.exp(-0.5j * delta * t)
    ep = np.conj(em)
    return _stack(
        t,
        (c + 1j * delta * s_over) * em,
        -1j * rabi * s_over * em,
        -1j * rabi * s_over * ep,
        (c - 1j * delta * s_over) * ep,
    )


def exact_schwinger_propagator(model: HamiltonianModel, t) -> np.ndarray:
    _require(model, ModelKind.SCHWINGER_SPIN)
    t = np.asarray(t, dtype=float)
    p = model.params
    w0, w, th = p["omega0"], p["omega"], p["theta"]
    wb = model.omega_bar
    c = np.cos(wb * t / 2)
    s = np.sin(wb * t / 2)
    diag = (w + w0 * math.cos(th)) / wb
    off = w0 * math.sin(th) / wb
    em = np.exp(-0.5j * w * t)
    ep = np.conj(em)
    return _stack(t, (c + 1j * diag * s) * em, 1j * off * s * em, 1j * off * s * ep, (c - 1j * diag * s) * ep)


def renormalized_splitting_factor(model: HamiltonianModel) -> float:
    """``J0(2V / (hbar w0))``: time average of the drive-frame splitting operator."""
    p = model.params
    return bessel_j0(2.0 * p["V"] / (model.hbar * p["omega0"]))


def resummed_driven_tls_propagator(model: HamiltonianModel, t) -> np.ndarray:
    """``exp(i (V/(hbar w0)) sin(w0 t) sx) exp(i (eps/(2 hbar)) J0(2V/(hbar w0)) t sz)``."""
    _require(model, ModelKind.DRIVEN_TLS)
    t = np.asarray(t, dtype=float)
    p = model.params
    hb = model.hbar
    drive = (p["V"] / (hb * p["omega0"])) * np.sin(p["omega0"] * t)
    split = 0.5 * p["epsilon"] / hb * renormalized_splitting_factor(model) * t
    return mat_exp_su2(1j * drive[..., None, None] * SIGMA_X) @ mat_exp_su2(1j * split[..., None, None] * SIGMA_Z)


def _max_abs_eigenvalue(h: np.ndarray) -> float:
    energies, _ = eigensystem(h)
    return float(np.abs(energies).max())


def numeric_propagate(
    model: HamiltonianModel,
    grid: TimeGrid,
    method: str = "magnus4",
    substeps: int = 1,
) -> np.ndarray:
    """Propagator ``U(t_k)`` on every grid point by exponential stepping.

    ``method="midpoint"``: ``exp(-(i/hbar) h H(t + h/2))`` per step, second order.
    ``method="magnus4"``: two Gauss-point samples plus their commutator, fourth order.
    Each grid interval is split into ``substeps`` steps ``h``. Raises StepTooLarge
    if ``max|E| h / hbar`` exceeds 0.1 anywhere.
    """
    if method not in ("midpoint", "magnus4"):
        raise InvalidParam(f"unknown method {method!r}")
    if int(substeps) != substeps or substeps < 1:
        raise InvalidParam("substeps must be a positive integer")
    n = grid.steps * substeps
    h = grid.dt / substeps
    starts = grid.t0 + h * np.arange(n)
    hb = model.hbar
    if method == "midpoint":
        hm = eval_hamiltonian(model, starts + 0.5 * h)
        worst = _max_abs_eigenvalue(hm)
        gen = (-1j * h / hb) * hm
    else:
        off = math.sqrt(3.0) / 6.0
        h1 = eval_hamiltonian(model, starts + (0.5 - off) * h)
        h2 = eval_hamiltonian(model, starts + (0.5 + off) * h)
        worst = max(_max_abs_eigenvalue(h1), _max_abs_eigenvalue(h2))
        a1 = (-1j / hb) * h1
        a2 = (-1j / hb) * h2
        gen = 0.5 * h * (a1 + a2) + (math.sqrt(3.0) / 12.0) * h * h * (a2 @ a1 - a1 @ a2)
    if worst * h / hb > MAX_PHASE_PER_STEP:
        raise StepTooLarge(
            f"max|E| h / hbar = {worst * h / hb:.3g} exceeds {MAX_PHASE_PER_STEP}; use more steps or substeps"
        )
    steps = exp_antihermitian(gen)
    path = np.empty((n + 1, model.dim, model.dim), dtype=complex)
    path[0] = np.eye(model.dim)
    # products of exact unitaries still collect ~eps of drift per step
    path[1:] = polar_correct(cumulative_left_product(steps))
    return path[::substeps]


def required_substeps(model: HamiltonianModel, grid: TimeGrid) -> int:
    """Smallest substep count meeting the per-step phase bound (checked on grid and midpoints)."""
    t = np.linspace(grid.t0, grid.t1, 2 * grid.steps + 1)
    worst = _max_abs_eigenvalue(eval_hamiltonian(model, t))
    return max(1, int(math.ceil(worst * grid.dt / (model.hbar * MAX_PHASE_PER_STEP) * 1.05)))


def default_oracle_kind(model: HamiltonianModel) -> OracleKind:
    if model.kind is ModelKind.JAYNES_CUMMINGS:
        return OracleKind.CLOSED_FORM_JC
    if model.kind is ModelKind.SCHWINGER_SPIN:
        return OracleKind.CLOSED_FORM_SCHWINGER
    return OracleKind.NUMERIC_MIDPOINT


def oracle_path(model: HamiltonianModel, grid: TimeGrid, kind: OracleKind | str = "auto") -> np.ndarray:
    """Reference propagator on every grid point for the requested oracle."""
    if kind == "auto":
        kind = default_oracle_kind(model)
    elif kind == "numeric":
        kind = OracleKind.NUMERIC_MIDPOINT
    kind = OracleKind(kind)
    if kind in _CLOSED_FORM_KIND:
        _require(model, _CLOSED_FORM_KIND[kind])
    t = grid.points
    if kind is OracleKind.CLOSED_FORM_JC:
        return exact_jc_propagator(model, t)
    if kind is OracleKind.CLOSED_FORM_SCHWINGER:
        return exact_schwinger_propagator(model, t)
    if kind is OracleKind.RESUMMED_DRIVEN_TLS:
        return resummed_driven_tls_propagator(model, t)
    return numeric_propagate(model, grid, substeps=required_substeps(model, grid))
