"""Validity diagnostics for the adiabatic series.

The textbook criterion (gap-weighted matrix elements of dH/dt) is evaluated
next to what the series itself says: whether its correction terms grow
without bound, how far a truncated sum drifts from a reference propagator,
and whether the two explicit resummations remove that drift.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j_range
from .errors import NotAtResonance, WindowTooShort, WrongModelKind, ZeroDetuning
from .expansion import (
    SeriesPropagator,
    correction_hamiltonian,
    driven_tls_series,
    dual_dyson_expand,
)
from .models import HamiltonianModel, ModelKind, eval_hamiltonian, hamiltonian_derivative
from .numerics import SIGMA_Z, TimeGrid, cumulative_quadrature, dagger
from .oracle import oracle_path, resummed_driven_tls_propagator
from .spectral import DEFAULT_GAP_TOL, _check_gaps, eigensystem

RESONANCE_TOL = 0.01
SIGNIFICANCE = 3.0
MATERIALITY = 0.1


class Verdict(str, enum.Enum):
    CONDITION_RELIABLE = "ConditionReliable"
    SECULAR_GROWTH_DETECTED = "SecularGrowthDetected"
    INCONCLUSIVE = "Inconclusive"


def adiabaticity_lhs(model: HamiltonianModel, t, gap_tol: float = DEFAULT_GAP_TOL, deriv_step: float = 1e-5):
    """``sum_{n != m} hbar/|E_n - E_m| * |<n|dH/dt|m> / (E_n - E_m)|`` at ``t`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    energies, vectors = eigensystem(eval_hamiltonian(model, t_arr))
    _check_gaps(t_arr, energies, gap_tol)
    hdot = hamiltonian_derivative(model, t_arr, deriv_step)
    elems = np.abs(dagger(vectors) @ hdot @ vectors)
    gaps = np.abs(energies[..., :, None] - energies[..., None, :])
    n = energies.shape[-1]
    off = ~np.eye(n, dtype=bool)
    safe = np.where(off, gaps, 1.0)
    terms = np.where(off, model.hbar * elems / (safe * safe), 0.0)
    total = terms.sum(axis=(-1, -2))
    return float(total) if total.ndim == 0 else total


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    intercept: float
    windows: int
    span: float

    @property
    def detected(self) -> bool:
        """Slope significant at 3 sigma and worth at least 10% of the baseline over the span."""
        return self.slope > SIGNIFICANCE * self.stderr and self.slope * self.span > MATERIALITY * abs(self.intercept)

    @property
    def verdict(self) -> Verdict:
        return Verdict.SECULAR_GROWTH_DETECTED if self.detected else Verdict.INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "windows": self.windows,
            "detected": self.detected,
        }


def secular_slope(magnitudes, times, period_hint: float, min_windows: int = 10) -> SlopeFit:
    """Least-squares line through per-window maxima of ``magnitudes``.

    Windows have length ``period_hint``; the envelope point of each window is
    its largest sample, placed at the time where that sample occurs.
    """
    y = np.asarray(magnitudes, dtype=float)
    t = np.asarray(times, dtype=float)
    if y.shape != t.shape or y.ndim != 1:
        raise ValueError("magnitudes and times must be 1-d arrays of equal length")
    if not period_hint > 0:
        raise ValueError("period_hint must be positive")
    span = float(t[-1] - t[0])
    count = int(math.floor(span / period_hint + 1e-9))
    if count < min_windows:
        raise WindowTooShort(f"{count} windows of length {period_hint:.4g} in a span of {span:.4g}; need {min_windows}")
    slot = np.minimum(((t - t[0]) / period_hint + 1e-9).astype(int), count - 1)
    env_t = np.empty(count)
    env_y = np.empty(count)
    for w in range(count):
        idx = np.flatnonzero(slot == w)
        j = idx[np.argmax(y[idx])]
        env_t[w] = t[j]
        env_y[w] = y[j]
    design = np.column_stack([np.ones(count), env_t])
    coef, *_ = np.linalg.lstsq(design, env_y, rcond=None)
    resid = env_y - design @ coef
    dof = max(count - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return SlopeFit(float(coef[1]), float(math.sqrt(max(cov[1, 1], 0.0))), float(coef[0]), count, span)


@dataclass(frozen=True)
class SecularityEstimate:
    branch: str  # "resonance" or "off-resonance"
    rate: float
    detuning: float  # omega0 + omega cos(theta)


def first_order_secularity_schwinger(
    model: HamiltonianModel, resonance_tol: float = RESONANCE_TOL, require_resonance: bool = False
) -> SecularityEstimate:
    """Growth rate of the leading secular term of the Schwinger adiabatic series.

    At resonance (``|omega0 + omega cos(theta)| < tol * omega0``) the first-order
    generator grows like ``(omega/2)|sin(theta)| t``; off resonance the first
    secular piece sits at second order with rate
    ``(1/4) omega^2 sin^2(theta) / (omega0 + omega cos(theta))``.
    """
    if model.kind is not ModelKind.SCHWINGER_SPIN:
        raise WrongModelKind("Schwinger secularity needs a SchwingerSpin model")
    p = model.params
    w0, w, th = p["omega0"], p["omega"], p["theta"]
    detuning = model.omega_tilde
    if abs(detuning) < resonance_tol * w0:
        return SecularityEstimate("resonance", 0.5 * abs(w * math.sin(th)), detuning)
    if require_resonance:
        raise NotAtResonance(f"omega0 + omega cos(theta) = {detuning:.4g} is not within {resonance_tol} omega0 of 0")
    return SecularityEstimate("off-resonance", 0.25 * (w * math.sin(th)) ** 2 / abs(detuning), detuning)


def first_order_generator_norm(model: HamiltonianModel, grid: TimeGrid, gap_tol: float = DEFAULT_GAP_TOL) -> np.ndarray:
    """Operator 2-norm of ``(1/hbar) int_0^t H'`` on every grid point."""
    hp = correction_hamiltonian(model, grid, gap_tol=gap_tol).operator()
    gen = cumulative_quadrature(hp, grid.dt) / model.hbar
    return np.linalg.norm(gen, ord=2, axis=(-2, -1))


def resum_jc_shift(model: HamiltonianModel) -> HamiltonianModel:
    """Same JC model annotated with the shifted detuning ``delta + R_n^2 / (2 delta)``."""
    if model.kind is not ModelKind.JAYNES_CUMMINGS:
        raise WrongModelKind("detuning shift applies to JaynesCummings models only")
    delta = model.params["delta"]
    if delta == 0:
        raise ZeroDetuning("detuning shift needs a nonzero detuning")
    params = dict(model.params)
    params["resummed_delta"] = delta + model.rabi**2 / (2.0 * delta)
    return HamiltonianModel(model.kind, params, hbar=model.hbar)


def jc_resummed_propagator(model: HamiltonianModel, t) -> np.ndarray:
    """Second-order small-coupling JC propagator with the secular phase resummed.

    The secular factor ``1 + i (lam^2/4) delta t`` is the start of
    ``exp(i (delta' - delta) t / 2)``; the oscillating exponentials carry
    ``delta'`` instead of ``delta``.
    """
    if "resummed_delta" not in model.params:
        model = resum_jc_shift(model)
    t = np.asarray(t, dtype=float)
    delta = model.params["delta"]
    shifted = model.params["resummed_delta"]
    lam = model.lam
    half_shift = 0.5 * (shifted - delta)
    rot = np.exp(1j * half_shift * t)
    em = np.exp(-1j * shifted * t)
    out = np.empty(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = rot * (1 - 0.25 * lam**2 * (1 - em))
    out[..., 0, 1] = -0.5 * lam * rot * (1 - em)
    out[..., 1, 0] = -0.5 * lam * np.conj(rot) * (np.conj(em) - 1)
    out[..., 1, 1] = np.conj(rot) * (1 - 0.25 * lam**2 * (1 - np.conj(em)))
    return out


def jacobi_anger_coeffs(z: float, n_max: int) -> np.ndarray:
    """``J_n(z)`` for ``n = -n_max .. n_max`` (index ``n + n_max``)."""
    pos = bessel_j_range(z, n_max)
    neg = pos[:0:-1] * np.where(np.arange(n_max, 0, -1) % 2 == 0, 1.0, -1.0)
    return np.concatenate([neg, pos])


def jacobi_anger_sum(z: float, phi, n_max: int):
    """Truncated ``sum_n J_n(z) e^{i n phi}``, which tends to ``e^{i z sin(phi)}``."""
    coeffs = jacobi_anger_coeffs(z, n_max)
    n = np.arange(-n_max, n_max + 1)
    phi = np.asarray(phi, dtype=float)
    return np.exp(1j * np.multiply.outer(phi, n)) @ coeffs


def driven_tls_secular_generator(model: HamiltonianModel) -> np.ndarray:
    """Constant part ``-(eps/2) J0(2V/(hbar w0)) sz`` of the drive-frame correction."""
    if model.kind is not ModelKind.DRIVEN_TLS:
        raise WrongModelKind("needs a Schroedinger-picture DrivenTLS model")
    p = model.params
    j0 = bessel_j_range(2.0 * p["V"] / (model.hbar * p["omega0"]), 0)[0]
    return -0.5 * p["epsilon"] * j0 * SIGMA_Z


def recovered_parameters(model: HamiltonianModel, n_max: int = 20) -> dict:
    """Model-specific expansion parameters that must be small for the series to hold."""
    kind = model.kind
    if kind is ModelKind.SCHWINGER_SPIN:
        w, th = model.params["omega"], model.params["theta"]
        wt = model.omega_tilde
        return {
            "omega_sin_theta_over_omega_tilde": math.inf if wt == 0 else abs(w * math.sin(th) / wt),
            "omega_sin_theta_over_omega_bar": abs(w * math.sin(th) / model.omega_bar),
        }
    if kind is ModelKind.JAYNES_CUMMINGS:
        lam = model.lam
        return {"inverse_lambda": 0.0 if math.isinf(lam) else abs(1.0 / lam), "lambda": lam}
    if kind is ModelKind.DRIVEN_TLS:
        p = model.params
        hw = model.hbar * p["omega0"]
        j = bessel_j_range(2.0 * p["V"] / hw, n_max)
        return {"epsilon_Jn_over_hbar_omega0": float(np.abs(p["epsilon"] * j[1:] / hw).max())}
    return {}


def _primary_parameter(model: HamiltonianModel, params: dict) -> float | None:
    if model.kind is ModelKind.SCHWINGER_SPIN:
        return params["omega_sin_theta_over_omega_tilde"]
    if model.kind is ModelKind.JAYNES_CUMMINGS:
        return params["inverse_lambda"]
    if model.kind is ModelKind.DRIVEN_TLS:
        return params["epsilon_Jn_over_hbar_omega0"]
    return None


@dataclass(frozen=True)
class DiagnosticsReport:
    times: np.ndarray
    condition_lhs: np.ndarray
    secular_fits: dict  # order -> SlopeFit or None when the span is too short
    error_curve: np.ndarray
    recovered_parameter: float | None
    recovered_parameters: dict
    verdict: Verdict
    max_order: int
    resummed_error_curve: np.ndarray | None = None
    regime: str | None = None
    thresholds: dict = field(default_factory=dict)

    @property
    def headline_fit(self) -> SlopeFit | None:
        """Lowest order with detected growth, else the steepest fitted order."""
        fits = [(j, f) for j, f in sorted(self.secular_fits.items()) if f is not None]
        for _, f in fits:
            if f.detected:
                return f
        if not fits:
            return None
        return max(fits, key=lambda item: item[1].slope)[1]

    @property
    def secular_slope(self) -> float | None:
        fit = self.headline_fit
        return None if fit is None else fit.slope

    @property
    def slope_stderr(self) -> float | None:
        fit = self.headline_fit
        return None if fit is None else fit.stderr

    def to_dict(self) -> dict:
        def pairs(values):
            return [[float(a), float(b)] for a, b in zip(self.times, values)]

        out = {
            "condition_lhs": pairs(self.condition_lhs),
            "secular_slope": self.secular_slope,
            "slope_stderr": self.slope_stderr,
            "verdict": self.verdict.value,
            "recovered_parameter": self.recovered_parameter,
            "error_curve": pairs(self.error_curve),
            "max_order": self.max_order,
            "regime": self.regime,
            "recovered_parameters": self.recovered_parameters,
            "secular_fits": {
                str(j): (None if f is None else f.to_dict()) for j, f in sorted(self.secular_fits.items())
            },
            "thresholds": self.thresholds,
        }
        if self.resummed_error_curve is not None:
            out["resummed_error_curve"] = pairs(self.resummed_error_curve)
        return out


def max_entry_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b).max(axis=(-2, -1))


def natural_period(model: HamiltonianModel, grid: TimeGrid) -> float:
    """``2 pi hbar / (smallest gap)`` along the grid; the drive period for the driven TLS."""
    if model.kind is ModelKind.DRIVEN_TLS:
        return 2.0 * math.pi / model.params["omega0"]
    energies, _ = eigensystem(eval_hamiltonian(model, grid.points))
    gap = np.diff(energies, axis=-1).min()
    return 2.0 * math.pi * model.hbar / gap


def validity_report(
    model: HamiltonianModel,
    grid: TimeGrid,
    max_order: int,
    oracle="auto",
    period_hint: float | None = None,
    lhs_tol: float = 0.1,
    error_tol: float = 0.05,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> DiagnosticsReport:
    """Run the adiabatic series, the reference propagator and the classic criterion side by side.

    Verdict: SecularGrowthDetected if any correction order shows detected growth;
    ConditionReliable if none does, the criterion stays below ``lhs_tol`` and the
    truncated series stays within ``error_tol`` of the reference; otherwise
    Inconclusive.
    """
    if model.kind is ModelKind.DRIVEN_TLS:
        # the drive has time-independent eigenvectors; expand around it, splitting as correction
        series: SeriesPropagator = driven_tls_series(model, grid, max_order)
    else:
        series = dual_dyson_expand(model, grid, max_order, gap_tol=gap_tol)
    reference = oracle_path(model, grid, oracle)
    t = grid.points
    error = max_entry_error(series.partial_sums(max_order), reference)
    lhs = adiabaticity_lhs(model, t, gap_tol=gap_tol)

    period = period_hint if period_hint is not None else natural_period(model, grid)
    fits = {}
    for j in range(1, max_order + 1):
        mags = np.linalg.norm(series.orders[j], ord=2, axis=(-2, -1))
        try:
            fits[j] = secular_slope(mags, t, period)
        except WindowTooShort:
            fits[j] = None

    resummed = None
    if model.kind is ModelKind.DRIVEN_TLS:
        resummed = max_entry_error(resummed_driven_tls_propagator(model, t), reference)

    regime = None
    if model.kind is ModelKind.SCHWINGER_SPIN:
        regime = first_order_secularity_schwinger(model).branch

    if any(f is not None and f.detected for f in fits.values()):
        verdict = Verdict.SECULAR_GROWTH_DETECTED
    elif float(np.max(lhs)) < lhs_tol and float(np.max(error)) <= error_tol:
        verdict = Verdict.CONDITION_RELIABLE
    else:
        verdict = Verdict.INCONCLUSIVE

    params = recovered_parameters(model)
    return DiagnosticsReport(
        times=t,
        condition_lhs=np.asarray(lhs, dtype=float),
        secular_fits=fits,
        error_curve=error,
        recovered_parameter=_primary_parameter(model, params),
        recovered_parameters=params,
        verdict=verdict,
        max_order=max_order,
        resummed_error_curve=resummed,
        regime=regime,
        thresholds={
            "significance_sigma": SIGNIFICANCE,
            "materiality": MATERIALITY,
            "lhs_tol": lhs_tol,
            "error_tol": error_tol,
            "period_hint": float(period),
        },
    )
