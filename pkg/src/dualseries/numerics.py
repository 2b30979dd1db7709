"""Small dense complex matrices, exact 2x2 exponentials and cumulative quadrature.

Matrices are plain ``numpy`` arrays of complex dtype. Every function accepts a
single ``(n, n)`` matrix or a stack ``(..., n, n)`` and works elementwise over
the leading axes, so a whole time grid is processed in one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, InvalidParam, NonDecomposable

MAX_DIM = 8

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

DEFAULT_UNITARITY_TOL = 1e-12
DEFAULT_ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t0 + k*(t1 - t0)/steps`` for ``k = 0..steps``."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise InvalidParam("grid end points must be finite")
        if self.t1 <= self.t0:
            raise InvalidParam(f"t1={self.t1} must exceed t0={self.t0}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvalidParam(f"steps must be a positive integer, got {self.steps}")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def points(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.steps + 1)

    @property
    def span(self) -> float:
        return self.t1 - self.t0

    def __len__(self) -> int:
        return self.steps + 1

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t0, self.t1, self.steps * factor)

    def index_of(self, t: float) -> int:
        """Index of the grid point equal to ``t`` (to 1e-9 of a step)."""
        k = (t - self.t0) / self.dt
        idx = int(round(k))
        if abs(k - idx) > 1e-9 or not 0 <= idx <= self.steps:
            raise InvalidParam(f"t={t} is not a grid point")
        return idx


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise InvalidParam(f"expected square matrices, got shape {m.shape}")
    if m.shape[-1] > MAX_DIM:
        raise InvalidParam(f"dimension {m.shape[-1]} exceeds {MAX_DIM}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def unitarity_defect(u) -> float | np.ndarray:
    """Max-entry ``|U^dagger U - I|``; one value per matrix in a stack."""
    u = np.asarray(u, dtype=complex)
    eye = np.eye(u.shape[-1])
    d = np.abs(dagger(u) @ u - eye).max(axis=(-1, -2))
    return float(d) if d.ndim == 0 else d


def hermiticity_defect(h) -> float | np.ndarray:
    h = np.asarray(h, dtype=complex)
    d = np.abs(h - dagger(h)).max(axis=(-1, -2))
    return float(d) if d.ndim == 0 else d


def pauli_components(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split 2x2 matrices as ``m = c0*I + c.sigma``; returns ``(c0, c)`` with c[..., 3]."""
    m = np.asarray(m, dtype=complex)
    c0 = 0.5 * (m[..., 0, 0] + m[..., 1, 1])
    cx = 0.5 * (m[..., 0, 1] + m[..., 1, 0])
    cy = 0.5j * (m[..., 0, 1] - m[..., 1, 0])
    cz = 0.5 * (m[..., 0, 0] - m[..., 1, 1])
    return c0, np.stack([cx, cy, cz], axis=-1)


def from_pauli(c0, c) -> np.ndarray:
    c0 = np.asarray(c0, dtype=complex)
    c = np.asarray(c, dtype=complex)
    out = np.empty(c0.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c0 + c[..., 2]
    out[..., 1, 1] = c0 - c[..., 2]
    out[..., 0, 1] = c[..., 0] - 1j * c[..., 1]
    out[..., 1, 0] = c[..., 0] + 1j * c[..., 1]
    return out


def mat_exp_su2(a, tol: float = 1e-12) -> np.ndarray:
    """Exact ``exp(A)`` for ``A = i(a0*I + a.sigma)`` with real ``a0``, ``a``.

    Uses ``exp(A) = e^{i a0} (cos|a| I + i sin|a| (a/|a|).sigma)``.
    Raises NonDecomposable when ``-iA`` is not Hermitian to ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[-2:] != (2, 2):
        raise NonDecomposable(f"mat_exp_su2 needs 2x2 input, got {a.shape}")
    m = -1j * a
    if np.any(hermiticity_defect(m) > tol):
        raise NonDecomposable("A is not i times a Hermitian matrix")
    c0, c = pauli_components(m)
    c0 = c0.real
    c = c.real
    norm = np.sqrt(np.sum(c * c, axis=-1))
    # sin(x)/x without the 0/0 at x = 0
    sinc = np.sinc(norm / np.pi)
    phase = np.exp(1j * c0)
    return from_pauli(phase * np.cos(norm), phase[..., None] * 1j * sinc[..., None] * c)


def expm_taylor(a, order: int = 18) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential for small dense matrices."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=-1).max()
    s = max(0, int(np.ceil(np.log2(norm / 0.25))) if norm > 0 else 0)
    b = a / 2.0**s
    eye = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape)
    result = eye.copy()
    term = eye.copy()
    for k in range(1, order + 1):
        term = term @ b / k
        result = result + term
    for _ in range(s):
        result = result @ result
    return result


def exp_antihermitian(a) -> np.ndarray:
    """``exp(A)`` for anti-Hermitian ``A``: closed form for 2x2, Taylor otherwise."""
    a = np.asarray(a, dtype=complex)
    if a.shape[-1] == 2:
        # exact anti-Hermitian part; drops roundoff asymmetry
        a = 0.5 * (a - dagger(a))
        return mat_exp_su2(a)
    return expm_taylor(a)


def cumulative_quadrature(samples, dt: float) -> np.ndarray:
    """Running integral of uniformly spaced samples along axis 0.

    Even indices get composite Simpson. Each odd index adds the integral over
    its last interval from the quadratic through three neighbouring samples,
    which keeps the whole result fourth order. ``result[0] = 0``.
    """
    f = np.asarray(samples)
    if f.ndim == 0 or f.shape[0] < 3:
        raise GridTooCoarse("cumulative quadrature needs at least 2 steps")
    n = f.shape[0] - 1
    dtype = np.result_type(f.dtype, float)
    out = np.zeros(f.shape, dtype=dtype)
    h = float(dt)
    pairs = h / 3.0 * (f[0:n - 1:2] + 4.0 * f[1:n:2] + f[2:n + 1:2])
    out[2::2] = np.cumsum(pairs, axis=0)
    # odd points 1, 3, ... that have a right neighbour: forward quadratic
    odd = np.arange(1, n + 1, 2)
    fwd = odd[odd + 1 <= n]
    out[fwd] = out[fwd - 1] + h / 12.0 * (5.0 * f[fwd - 1] + 8.0 * f[fwd] - f[fwd + 1])
    if n % 2 == 1:
        # trailing odd point: backward quadratic over the last interval
        out[n] = out[n - 1] + h / 12.0 * (-f[n - 2] + 8.0 * f[n - 1] + 5.0 * f[n])
    return out


def central_difference(values, dt: float) -> np.ndarray:
    """Second-order derivative along axis 0; one-sided three-point stencils at the ends."""
    f = np.asarray(values)
    if f.shape[0] < 3:
        raise GridTooCoarse("finite differences need at least 3 samples")
    d = np.empty(f.shape, dtype=np.result_type(f.dtype, float))
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * dt)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dt)
    return d


def cumulative_left_product(factors: np.ndarray) -> np.ndarray:
    """``P[k] = F[k] @ F[k-1] @ ... @ F[0]`` by a log-depth doubling scan."""
    p = np.array(factors, dtype=complex, copy=True)
    shift = 1
    n = p.shape[0]
    while shift < n:
        p[shift:] = p[shift:] @ p[:-shift]
        shift *= 2
    return p


def polar_correct(u, sweeps: int = 2) -> np.ndarray:
    """Pull nearly-unitary matrices onto the unitary group (Newton-Schulz polar iteration).

    Each sweep squares the defect, so a defect of 1e-10 from accumulated roundoff
    disappears in one sweep while the matrix moves by about that much.
    """
    u = np.array(u, dtype=complex, copy=True)
    for _ in range(sweeps):
        u = 1.5 * u - 0.5 * u @ (dagger(u) @ u)
    return u
