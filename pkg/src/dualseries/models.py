"""Time-dependent Hamiltonians: the catalog models and user-supplied ones.

Every model is an immutable :class:`HamiltonianModel`; :func:`eval_hamiltonian`
turns it into a Hermitian matrix (or a stack of them for an array of times).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Mapping

import numpy as np

from .errors import InvalidParam
from .numerics import MAX_DIM, as_matrix


class ModelKind(str, enum.Enum):
    JAYNES_CUMMINGS = "JaynesCummings"
    SCHWINGER_SPIN = "SchwingerSpin"
    DRIVEN_TLS = "DrivenTLS"
    DRIVEN_TLS_INTERACTION = "DrivenTLSInteraction"
    GENERIC_SAMPLED = "GenericSampled"
    GENERIC_CALLABLE = "GenericCallable"


CATALOG_KINDS = frozenset(
    {
        ModelKind.JAYNES_CUMMINGS,
        ModelKind.SCHWINGER_SPIN,
        ModelKind.DRIVEN_TLS,
        ModelKind.DRIVEN_TLS_INTERACTION,
    }
)


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    kind: ModelKind
    params: Mapping[str, Any]
    hbar: float = 1.0
    dim: int = 2
    # (times, samples) for sampled models, a callable for generic ones
    data: Any = field(default=None, repr=False)

    def __post_init__(self):
        if not self.hbar > 0:
            raise InvalidParam(f"hbar must be positive, got {self.hbar}")
        if not 1 <= self.dim <= MAX_DIM:
            raise InvalidParam(f"dimension {self.dim} outside 1..{MAX_DIM}")
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    def __getattr__(self, name):
        # expose params as attributes: model.g, model.delta, ...
        params = self.__dict__.get("params", {})
        if name in params:
            return params[name]
        raise AttributeError(name)

    # derived Jaynes-Cummings quantities
    @property
    def rabi(self) -> float:
        self._require(ModelKind.JAYNES_CUMMINGS)
        return 2.0 * self.params["g"] * math.sqrt(self.params["photon_n"] + 1)

    @property
    def omega_n(self) -> float:
        self._require(ModelKind.JAYNES_CUMMINGS)
        return math.hypot(self.params["delta"], self.rabi)

    @property
    def lam(self) -> float:
        """Ratio Rabi frequency / detuning; infinite at zero detuning."""
        self._require(ModelKind.JAYNES_CUMMINGS)
        delta = self.params["delta"]
        return math.inf if delta == 0 else self.rabi / delta

    # derived Schwinger quantities
    @property
    def omega_tilde(self) -> float:
        self._require(ModelKind.SCHWINGER_SPIN)
        p = self.params
        return p["omega0"] + p["omega"] * math.cos(p["theta"])

    @property
    def omega_bar(self) -> float:
        self._require(ModelKind.SCHWINGER_SPIN)
        p = self.params
        w0, w, th = p["omega0"], p["omega"], p["theta"]
        return math.sqrt(w0 * w0 + w * w + 2 * w0 * w * math.cos(th))

    def _require(self, kind: ModelKind):
        if self.kind is not kind:
            raise AttributeError(f"quantity only defined for {kind.value} models")

    def describe(self) -> dict:
        return {"kind": self.kind.value, "hbar": self.hbar, **dict(self.params)}


def make_jaynes_cummings(g: float, delta: float, photon_n: int, hbar: float = 1.0) -> HamiltonianModel:
    """JC interaction-picture block on ``{|1,n+1>, |2,n>}``."""
    if g < 0:
        raise InvalidParam(f"coupling g must be >= 0, got {g}")
    if int(photon_n) != photon_n or photon_n < 0:
        raise InvalidParam(f"photon number must be a non-negative integer, got {photon_n}")
    return HamiltonianModel(
        ModelKind.JAYNES_CUMMINGS,
        {"g": float(g), "delta": float(delta), "photon_n": int(photon_n)},
        hbar=hbar,
    )


def make_schwinger_spin(omega0: float, omega: float, theta: float, hbar: float = 1.0) -> HamiltonianModel:
    """Spin in a field of strength ``omega0`` precessing at ``omega`` about z, tilted by ``theta``."""
    if not omega0 > 0:
        raise InvalidParam(f"omega0 must be positive, got {omega0}")
    return HamiltonianModel(
        ModelKind.SCHWINGER_SPIN,
        {"omega0": float(omega0), "omega": float(omega), "theta": float(theta)},
        hbar=hbar,
    )


def make_driven_tls(
    epsilon: float, V: float, omega0: float, picture: str = "schroedinger", hbar: float = 1.0
) -> HamiltonianModel:
    """``H = -(eps/2) sz - V cos(omega0 t) sx`` or its interaction-picture form."""
    if V < 0:
        raise InvalidParam(f"drive amplitude V must be >= 0, got {V}")
    if not omega0 > 0:
        raise InvalidParam(f"drive frequency omega0 must be positive, got {omega0}")
    picture = picture.lower()
    if picture in ("schroedinger", "schrodinger"):
        kind = ModelKind.DRIVEN_TLS
    elif picture == "interaction":
        kind = ModelKind.DRIVEN_TLS_INTERACTION
    else:
        raise InvalidParam(f"unknown picture {picture!r}")
    return HamiltonianModel(kind, {"epsilon": float(epsilon), "V": float(V), "omega0": float(omega0)}, hbar=hbar)


def make_generic_sampled(times, samples, hbar: float = 1.0) -> HamiltonianModel:
    """Piecewise-linear interpolation between Hermitian samples on increasing ``times``."""
    times = np.asarray(times, dtype=float)
    samples = as_matrix(samples)
    if times.ndim != 1 or samples.shape[0] != times.size or times.size < 2:
        raise InvalidParam("need one sample per time and at least two samples")
    if np.any(np.diff(times) <= 0):
        raise InvalidParam("sample times must be strictly increasing")
    herm = np.abs(samples - np.conj(np.swapaxes(samples, -1, -2))).max()
    if herm > 1e-12:
        raise InvalidParam(f"samples are not Hermitian (defect {herm:.3g})")
    return HamiltonianModel(
        ModelKind.GENERIC_SAMPLED,
        {"t_first": float(times[0]), "t_last": float(times[-1])},
        hbar=hbar,
        dim=samples.shape[-1],
        data=(times.copy(), samples.copy()),
    )


def make_generic(func: Callable[[float], np.ndarray], dim: int, hbar: float = 1.0, **params) -> HamiltonianModel:
    """Wrap a callable ``t -> (dim, dim)`` Hermitian matrix."""
    return HamiltonianModel(ModelKind.GENERIC_CALLABLE, params, hbar=hbar, dim=dim, data=func)


def _two_level(t: np.ndarray, h0, hx, hy, hz) -> np.ndarray:
    out = np.empty(t.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = h0 + hz
    out[..., 1, 1] = h0 - hz
    out[..., 0, 1] = hx - 1j * hy
    out[..., 1, 0] = hx + 1j * hy
    return out


def eval_hamiltonian(model: HamiltonianModel, t) -> np.ndarray:
    """``H(t)`` as a ``(dim, dim)`` matrix, or ``(len(t), dim, dim)`` for array ``t``."""
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise InvalidParam("time must be finite")
    p = model.params
    hb = model.hbar
    kind = model.kind
    zero = np.zeros_like(t_arr)

    if kind is ModelKind.JAYNES_CUMMINGS:
        k = hb * p["g"] * math.sqrt(p["photon_n"] + 1)
        phase = p["delta"] * t_arr
        # H[0,1] = k e^{-i delta t}, H[1,0] = k e^{+i delta t}
        return _two_level(t_arr, zero, k * np.cos(phase), k * np.sin(phase), zero)

    if kind is ModelKind.SCHWINGER_SPIN:
        w0, w, th = p["omega0"], p["omega"], p["theta"]
        a = -0.5 * hb * w0
        return _two_level(
            t_arr,
            zero,
            a * math.sin(th) * np.cos(w * t_arr),
            a * math.sin(th) * np.sin(w * t_arr),
            a * math.cos(th) + zero,
        )

    if kind is ModelKind.DRIVEN_TLS:
        eps, V, w0 = p["epsilon"], p["V"], p["omega0"]
        return _two_level(t_arr, zero, -V * np.cos(w0 * t_arr), zero, -0.5 * eps + zero)

    if kind is ModelKind.DRIVEN_TLS_INTERACTION:
        eps, V, w0 = p["epsilon"], p["V"], p["omega0"]
        amp = -V * np.cos(w0 * t_arr)
        phase = eps * t_arr / hb
        # -V cos(w0 t) sx exp(i eps t sz / hbar): off-diagonals amp*e^{-+i eps t/hbar}
        return _two_level(t_arr, zero, amp * np.cos(phase), amp * np.sin(phase), zero)

    if kind is ModelKind.GENERIC_SAMPLED:
        times, samples = model.data
        tol = 1e-12 * max(1.0, abs(times[-1] - times[0]))
        if np.any(t_arr < times[0] - tol) or np.any(t_arr > times[-1] + tol):
            raise InvalidParam("time outside the sampled range")
        tc = np.clip(t_arr, times[0], times[-1])
        idx = np.clip(np.searchsorted(times, tc, side="right") - 1, 0, times.size - 2)
        w = ((tc - times[idx]) / (times[idx + 1] - times[idx]))[..., None, None]
        return (1.0 - w) * samples[idx] + w * samples[idx + 1]

    if kind is ModelKind.GENERIC_CALLABLE:
        func = model.data
        if t_arr.ndim == 0:
            return as_matrix(func(float(t_arr)))
        return np.stack([as_matrix(func(float(s))) for s in t_arr.ravel()]).reshape(
            t_arr.shape + (model.dim, model.dim)
        )

    raise InvalidParam(f"unsupported model kind {kind}")


def time_range(model: HamiltonianModel) -> tuple[float, float]:
    if model.kind is ModelKind.GENERIC_SAMPLED:
        return model.params["t_first"], model.params["t_last"]
    return -math.inf, math.inf


def hamiltonian_derivative(model: HamiltonianModel, t, step: float = 1e-5) -> np.ndarray:
    """``dH/dt`` by central differences, one-sided at the edge of a sampled range."""
    t_arr = np.asarray(t, dtype=float)
    lo, hi = time_range(model)
    left = np.maximum(t_arr - step, lo)
    right = np.minimum(t_arr + step, hi)
    width = (right - left)[..., None, None]
    return (eval_hamiltonian(model, right) - eval_hamiltonian(model, left)) / width

