"""Dyson series and its dual, the adiabatic series.

Both series are built the same way: a leading propagator path and a generator
path ``G(t)``, with corrections produced recursively,

    W_0 = I,   W_j(t) = -(i/hbar) * scale * integral_0^t G(t') W_{j-1}(t') dt',

so the j-th term is a single cumulative quadrature of the (j-1)-th. The later
time always sits on the left, which is what the time-ordered exponential
requires.

* Dyson: leading path ``I``, generator ``H(t)``, ``scale = lambda``.
* Dual (adiabatic): leading path ``U0(t)`` built from instantaneous eigenstates,
  generator ``H'(t)`` written in the frozen basis ``{|n;0>}``; the j-th term is
  ``U0(t) W_j(t)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import OrderOutOfRange, QuadratureUnderResolved, WrongModelKind
from .models import HamiltonianModel, ModelKind, eval_hamiltonian
from .numerics import SIGMA_X, SIGMA_Z, TimeGrid, cumulative_quadrature, dagger, mat_exp_su2
from .spectral import (
    DEFAULT_GAP_TOL,
    FramePath,
    connection_matrix,
    dynamical_phases,
    frame_path,
    geometric_phases,
    transported_vectors,
)

MAX_ORDER = 4
RESOLUTION_TOL = 0.01


class SeriesKind(str, enum.Enum):
    DYSON = "Dyson"
    DUAL_DYSON = "DualDyson"


@dataclass(frozen=True)
class SeriesPropagator:
    kind: SeriesKind
    lam: float | None
    grid: TimeGrid
    orders: np.ndarray  # (K+1, steps+1, N, N)
    hbar: float = 1.0

    @property
    def max_order(self) -> int:
        return self.orders.shape[0] - 1

    def partial_sums(self, order: int) -> np.ndarray:
        _check_order(order, self.max_order)
        return self.orders[: order + 1].sum(axis=0)

    def sup_norms(self) -> list[float]:
        """Largest operator 2-norm of each order over the grid."""
        return [float(np.linalg.norm(o, ord=2, axis=(-2, -1)).max()) for o in self.orders]


def _check_order(order: int, max_order: int):
    if int(order) != order or not 0 <= order <= max_order:
        raise OrderOutOfRange(f"order {order} outside 0..{max_order}")


def partial_sum(series: SeriesPropagator, order: int, t: float) -> np.ndarray:
    _check_order(order, series.max_order)
    k = series.grid.index_of(t)
    return series.orders[: order + 1, k].sum(axis=0)


def recursive_corrections(generator: np.ndarray, dt: float, max_order: int, hbar: float = 1.0, scale: float = 1.0) -> np.ndarray:
    """``W_0 .. W_K`` for the time-ordered exponential of ``-(i/hbar) scale * generator``."""
    n = generator.shape[-1]
    out = np.empty((max_order + 1,) + generator.shape, dtype=complex)
    out[0] = np.eye(n)
    coef = -1j * scale / hbar
    for j in range(1, max_order + 1):
        out[j] = coef * cumulative_quadrature(generator @ out[j - 1], dt)
    return out


def adiabatic_u0(model: HamiltonianModel, grid: TimeGrid, path: FramePath | None = None, gap_tol: float = DEFAULT_GAP_TOL) -> np.ndarray:
    """``sum_n e^{i gamma_n} e^{-(i/hbar) int E_n} |n;t><n;0|`` on every grid point."""
    if path is None:
        path = frame_path(model, grid, gap_tol)
    moving = transported_vectors(path)
    theta = dynamical_phases(path)
    v0 = path.vectors[0]
    u0 = (moving * np.exp(-1j * theta)[:, None, :]) @ dagger(v0)
    u0[0] = np.eye(path.dim)
    return u0


@dataclass(frozen=True)
class CorrectionHamiltonian:
    """``H'(t)`` as coefficients on ``|m;0><n;0|`` plus the frozen basis itself."""

    grid: TimeGrid
    coeffs: np.ndarray  # (K, N, N), zero diagonal
    basis: np.ndarray  # columns |n;0>

    def operator(self) -> np.ndarray:
        return self.basis @ self.coeffs @ dagger(self.basis)


def correction_hamiltonian(model: HamiltonianModel, grid: TimeGrid, path: FramePath | None = None, gap_tol: float = DEFAULT_GAP_TOL) -> CorrectionHamiltonian:
    """Off-diagonal generator of the adiabatic corrections.

    ``H'_mn = -e^{i(gamma_n - gamma_m)} e^{+(i/hbar) int (E_m - E_n)} <m;t|i hbar d/dt|n;t>`` for m != n.
    """
    if path is None:
        path = frame_path(model, grid, gap_tol)
    hb = path.hbar
    v = path.vectors
    coupling = 1j * hb * connection_matrix(path)  # <m| i hbar d/dt |n>, Hermitian
    theta = dynamical_phases(path)
    gamma = geometric_phases(path)
    phase = np.exp(1j * (theta - gamma))  # per level: e^{i(theta_m - gamma_m)}
    coeffs = -phase[:, :, None] * coupling * np.conj(phase)[:, None, :]
    idx = np.arange(path.dim)
    coeffs[:, idx, idx] = 0.0
    return CorrectionHamiltonian(grid, coeffs, v[0].copy())


def _resolution_check(build, grid: TimeGrid, orders: np.ndarray):
    top = orders[-1]
    scale = np.abs(top).max()
    if orders.shape[0] < 2 or scale < 1e-12:
        return
    fine = build(grid.refined(2))[-1][::2]
    change = np.abs(fine - top).max() / scale
    if change > RESOLUTION_TOL:
        raise QuadratureUnderResolved(
            f"order {orders.shape[0] - 1} changes by {change:.2%} when the step is halved; "
            f"increase steps beyond {grid.steps}"
        )


def dual_dyson_expand(
    model: HamiltonianModel,
    grid: TimeGrid,
    max_order: int,
    gap_tol: float = DEFAULT_GAP_TOL,
    check_resolution: bool = True,
) -> SeriesPropagator:
    """Adiabatic series ``U0 W_0, U0 W_1, ..., U0 W_K``; ``W_0 = I`` so order 0 is ``U0``."""
    _check_order(max_order, MAX_ORDER)

    def build(g: TimeGrid) -> np.ndarray:
        path = frame_path(model, g, gap_tol)
        u0 = adiabatic_u0(model, g, path)
        hp = correction_hamiltonian(model, g, path).operator()
        w = recursive_corrections(hp, g.dt, max_order, model.hbar)
        return u0[None] @ w

    orders = build(grid)
    if check_resolution:
        _resolution_check(build, grid, orders)
    return SeriesPropagator(SeriesKind.DUAL_DYSON, None, grid, orders, model.hbar)


def dyson_expand(
    model: HamiltonianModel,
    grid: TimeGrid,
    max_order: int,
    lam: float = 1.0,
    check_resolution: bool = True,
) -> SeriesPropagator:
    """Orders of ``T exp(-(i/hbar) lam int H)``: ``I, -(i/hbar) lam int H, ...``."""
    _check_order(max_order, MAX_ORDER)

    def build(g: TimeGrid) -> np.ndarray:
        h = eval_hamiltonian(model, g.points)
        return recursive_corrections(h, g.dt, max_order, model.hbar, lam)

    orders = build(grid)
    if check_resolution:
        _resolution_check(build, grid, orders)
    return SeriesPropagator(SeriesKind.DYSON, float(lam), grid, orders, model.hbar)


def driven_tls_frame(model: HamiltonianModel, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Leading propagator and correction generator for the driven two-level system.

    The drive term ``-V cos(w0 t) sx`` has fixed eigenvectors (those of ``sx``), so
    its adiabatic propagator is exact: ``U0 = exp(i (V/(hbar w0)) sin(w0 t) sx)``.
    The splitting ``-(eps/2) sz`` is the correction, seen in that frame as
    ``H'(t) = U0^dagger (-(eps/2) sz) U0 = -(eps/2) sz exp(2i (V/(hbar w0)) sin(w0 t) sx)``.
    """
    if model.kind is not ModelKind.DRIVEN_TLS:
        raise WrongModelKind("driven_tls_frame needs a Schroedinger-picture DrivenTLS model")
    p = model.params
    t = grid.points
    angle = (p["V"] / (model.hbar * p["omega0"])) * np.sin(p["omega0"] * t)
    u0 = mat_exp_su2(1j * angle[:, None, None] * SIGMA_X)
    hp = dagger(u0) @ (-0.5 * p["epsilon"] * SIGMA_Z) @ u0
    return u0, hp


def driven_tls_series(model: HamiltonianModel, grid: TimeGrid, max_order: int) -> SeriesPropagator:
    """Un-resummed adiabatic series of the driven two-level system in the drive frame."""
    _check_order(max_order, MAX_ORDER)
    u0, hp = driven_tls_frame(model, grid)
    w = recursive_corrections(hp, grid.dt, max_order, model.hbar)
    return SeriesPropagator(SeriesKind.DUAL_DYSON, None, grid, u0[None] @ w, model.hbar)
