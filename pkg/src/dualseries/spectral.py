"""Instantaneous eigenframes along a time grid.

Eigensolvers hand back eigenvectors with arbitrary phases. :func:`gauge_continue`
removes that freedom by discrete parallel transport: each vector is rotated so
that its overlap with the previous frame is real and positive. Geometric-phase
rates are then read off the continued path by central differences, so any
model (catalog or sampled) gets its phases the same way.

Gauge continuation is a sequential scan in principle, but it reduces to a
cumulative sum of overlap phases and is evaluated in one vectorised pass.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BranchSwapDetected, DegenerateSpectrum, GridTooCoarse
from .models import HamiltonianModel, eval_hamiltonian
from .numerics import TimeGrid, central_difference, cumulative_quadrature, dagger, pauli_components

DEFAULT_GAP_TOL = 1e-9
SWAP_OVERLAP = 0.5


@dataclass(frozen=True)
class SpectralFrame:
    t: float
    energies: np.ndarray  # ascending
    vectors: np.ndarray  # eigenvectors as columns
    gamma_rates: np.ndarray | None = None


@dataclass(frozen=True)
class FramePath:
    """Eigenframes on every grid point. Arrays are indexed ``[k, ...]`` by grid index."""

    grid: TimeGrid
    energies: np.ndarray  # (K, N)
    vectors: np.ndarray  # (K, N, N), column n is level n
    hbar: float = 1.0
    gamma_rates: np.ndarray | None = None  # (K, N)

    def __len__(self) -> int:
        return self.energies.shape[0]

    @property
    def dim(self) -> int:
        return self.energies.shape[1]

    def frame(self, k: int) -> SpectralFrame:
        rates = None if self.gamma_rates is None else self.gamma_rates[k]
        return SpectralFrame(float(self.grid.points[k]), self.energies[k], self.vectors[k], rates)

    @classmethod
    def from_frames(cls, grid: TimeGrid, frames, hbar: float = 1.0) -> "FramePath":
        frames = list(frames)
        if len(frames) != len(grid):
            raise GridTooCoarse(f"{len(frames)} frames for a grid of {len(grid)} points")
        return cls(
            grid,
            np.array([f.energies for f in frames], dtype=float),
            np.array([f.vectors for f in frames], dtype=complex),
            hbar,
        )


def _eigh_2x2(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigensystem of stacked 2x2 Hermitian matrices ``h0 + h.sigma``."""
    c0, c = pauli_components(h)
    h0 = c0.real
    hx, hy, hz = c[..., 0].real, c[..., 1].real, c[..., 2].real
    r = np.sqrt(hx * hx + hy * hy + hz * hz)
    energies = np.stack([h0 - r, h0 + r], axis=-1)
    vecs = np.empty(h.shape, dtype=complex)
    off = hx - 1j * hy
    up = hz >= 0
    # pick, for each level, whichever of the two null-space forms has the larger norm
    # lower level (-r): (off, -(r+hz)) if hz>=0, else (hz-r, conj(off))
    lo_a = np.stack([off, -(r + hz)], axis=-1)
    lo_b = np.stack([hz - r + 0j, np.conj(off)], axis=-1)
    lo = np.where(up[..., None], lo_a, lo_b)
    # upper level (+r): (hz+r, conj(off)) if hz>=0, else (off, r-hz)
    hi_a = np.stack([hz + r + 0j, np.conj(off)], axis=-1)
    hi_b = np.stack([off, r - hz + 0j], axis=-1)
    hi = np.where(up[..., None], hi_a, hi_b)
    for v in (lo, hi):
        nrm = np.linalg.norm(v, axis=-1, keepdims=True)
        # r == 0: any basis works; fall back to the standard one
        bad = nrm[..., 0] == 0
        nrm[bad] = 1.0
        v /= nrm
    lo[r == 0] = [1.0, 0.0]
    hi[r == 0] = [0.0, 1.0]
    vecs[..., :, 0] = lo
    vecs[..., :, 1] = hi
    return energies, vecs


def _anchor_angles(v: np.ndarray) -> np.ndarray:
    """Per column, minus the phase of its largest component (first index on near-ties)."""
    mag = np.abs(v)
    top = mag >= mag.max(axis=-2, keepdims=True) * (1 - 1e-8)
    row = np.argmax(top, axis=-2)
    comp = np.take_along_axis(v, row[..., None, :], axis=-2)[..., 0, :]
    return -np.angle(comp)


def eigensystem(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of Hermitian ``h``.

    Each column is returned with its largest component real and positive.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape[-1] == 2:
        energies, vectors = _eigh_2x2(h)
    else:
        energies, vectors = np.linalg.eigh(h)
    return energies, vectors * np.exp(1j * _anchor_angles(vectors))[..., None, :]


def _check_gaps(t: np.ndarray, energies: np.ndarray, gap_tol: float):
    if energies.shape[-1] < 2:
        return
    gaps = np.diff(energies, axis=-1).min(axis=-1)
    scale = np.abs(energies).max(axis=-1)
    bad = gaps <= gap_tol * scale
    if np.any(bad):
        k = int(np.argmax(bad))
        raise DegenerateSpectrum(
            f"gap {gaps.flat[k]:.3g} below {gap_tol:g} x |H| at t={np.ravel(t)[k]:.6g}"
        )


def instantaneous_eigensystem(model: HamiltonianModel, t: float, gap_tol: float = DEFAULT_GAP_TOL) -> SpectralFrame:
    energies, vectors = eigensystem(eval_hamiltonian(model, t))
    _check_gaps(np.asarray(t), energies, gap_tol)
    return SpectralFrame(float(t), energies, vectors)


def raw_frames(model: HamiltonianModel, grid: TimeGrid, gap_tol: float = DEFAULT_GAP_TOL) -> FramePath:
    """Eigenframes at every grid point with whatever phases the solver produced."""
    t = grid.points
    energies, vectors = eigensystem(eval_hamiltonian(model, t))
    _check_gaps(t, energies, gap_tol)
    return FramePath(grid, energies, vectors, model.hbar)


def gauge_continue(path: FramePath) -> FramePath:
    """Parallel-transport gauge: ``<n;t_k|n;t_{k+1}>`` real and positive for every k."""
    if len(path) < 2:
        raise GridTooCoarse("gauge continuation needs at least two frames")
    v = path.vectors
    # overlaps o[k, n] = <n; t_{k}|n; t_{k+1}> of the raw vectors
    overlaps = np.einsum("kin,kin->kn", np.conj(v[:-1]), v[1:])
    mag = np.abs(overlaps)
    if np.any(mag < SWAP_OVERLAP):
        k, n = np.unravel_index(np.argmin(mag), mag.shape)
        raise BranchSwapDetected(
            f"overlap {mag[k, n]:.3f} for level {n} between t={path.grid.points[k]:.6g} "
            f"and the next point; refine the grid or check for a level crossing"
        )
    phases = np.empty(path.energies.shape)
    phases[0] = _anchor_angles(v[0])
    phases[1:] = phases[0] - np.cumsum(np.angle(overlaps), axis=0)
    vectors = v * np.exp(1j * phases)[:, None, :]
    return replace(path, vectors=vectors, gamma_rates=None)


def vector_derivatives(path: FramePath) -> np.ndarray:
    """``d|n;t>/dt`` at every grid point by second-order finite differences."""
    return central_difference(path.vectors, path.grid.dt)


def connection_matrix(path: FramePath) -> np.ndarray:
    """``<m;t|d/dt|n;t>`` on every grid point, projected onto its anti-Hermitian part.

    ``V^dagger V = I`` makes the exact connection anti-Hermitian; finite
    differences break that at second order, the projection restores it.
    """
    raw = dagger(path.vectors) @ vector_derivatives(path)
    return 0.5 * (raw - dagger(raw))


def geometric_phase_rates(path: FramePath) -> np.ndarray:
    """``<n;t| i d/dt |n;t>`` per grid point and level, shape ``(K, N)``; real by construction."""
    if len(path) < 3:
        raise GridTooCoarse("geometric phase rates need at least three frames")
    conn = np.diagonal(connection_matrix(path), axis1=-2, axis2=-1)
    return np.real(1j * conn)


def connection_imaginary_part(path: FramePath) -> np.ndarray:
    """Imaginary part of the raw finite-difference ``<n|i d/dt|n>``; a discretisation diagnostic."""
    dv = vector_derivatives(path)
    conn = np.einsum("kin,kin->kn", np.conj(path.vectors), dv)
    return np.imag(1j * conn)


def with_rates(path: FramePath) -> FramePath:
    return replace(path, gamma_rates=geometric_phase_rates(path))


def frame_path(model: HamiltonianModel, grid: TimeGrid, gap_tol: float = DEFAULT_GAP_TOL) -> FramePath:
    """Eigenframes, continued gauge and geometric-phase rates on ``grid``."""
    return with_rates(gauge_continue(raw_frames(model, grid, gap_tol)))


def dynamical_phases(path: FramePath) -> np.ndarray:
    """``(1/hbar) * integral_0^t E_n`` for every grid point and level."""
    return cumulative_quadrature(path.energies, path.grid.dt) / path.hbar


def dynamical_phase(path: FramePath, level: int, t: float) -> float:
    k = path.grid.index_of(t)
    return float(dynamical_phases(path)[k, level])


def geometric_phases(path: FramePath) -> np.ndarray:
    """``gamma_n(t)`` accumulated from the rates; zero at the first grid point."""
    rates = path.gamma_rates if path.gamma_rates is not None else geometric_phase_rates(path)
    return cumulative_quadrature(rates, path.grid.dt)


def transported_vectors(path: FramePath) -> np.ndarray:
    """``e^{i gamma_n(t)} |n;t>``: the gauge-independent combination entering U0."""
    return path.vectors * np.exp(1j * geometric_phases(path))[:, None, :]


def eigen_residual(h: np.ndarray, frame: SpectralFrame) -> float:
    """Max-norm of ``H v - E v`` over all columns."""
    v = frame.vectors
    return float(np.abs(h @ v - v * frame.energies[None, :]).max())


def orthonormality_defect(frame: SpectralFrame) -> float:
    v = frame.vectors
    return float(np.abs(dagger(v) @ v - np.eye(v.shape[-1])).max())
