"""Independent analytic references shared by the test modules.

Nothing here calls the spectral or expansion code; every formula is written
out by hand so the package is checked against something it did not produce.
"""
import math

import numpy as np

from dualseries.numerics import SIGMA_X


def stack2(u00, u01, u10, u11):
    u00, u01, u10, u11 = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (u00, u01, u10, u11)))
    out = np.empty(u00.shape + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = u00, u01, u10, u11
    return out


# Jaynes-Cummings, basis (|1,n+1>, |2,n>), lam = R/delta


def jc_dressed_states(delta, t):
    """Columns a (energy +g sqrt(n+1)) and b (energy -g sqrt(n+1)), analytic phase convention."""
    e = np.exp(-1j * delta * np.asarray(t, dtype=float))
    a = np.stack([e, np.ones_like(e)], axis=-1) / math.sqrt(2)
    b = np.stack([np.ones_like(e), -np.conj(e)], axis=-1) / math.sqrt(2)
    # ascending energy: b first
    return np.stack([b, a], axis=-1)


def jc_u0(rabi, delta, t):
    x = 0.5 * rabi * t
    em, ep = np.exp(-0.5j * delta * t), np.exp(0.5j * delta * t)
    return stack2(np.cos(x) * em, -1j * np.sin(x) * em, -1j * np.sin(x) * ep, np.cos(x) * ep)


def jc_u1(rabi, delta, t):
    lam = rabi / delta
    x = 0.5 * rabi * t
    em, ep = np.exp(-0.5j * delta * t), np.exp(0.5j * delta * t)
    z = np.zeros_like(em)
    return stack2(1j / lam * np.sin(x) * em, z, z, -1j / lam * np.sin(x) * ep)


def jc_u2(rabi, delta, t):
    """Second-order term of the exact solution expanded in 1/lam (diagonal real and secular)."""
    lam = rabi / delta
    x = 0.5 * rabi * t
    em, ep = np.exp(-0.5j * delta * t), np.exp(0.5j * delta * t)
    diag = -x * np.sin(x) / (2 * lam**2)
    off = 1j * (np.sin(x) - x * np.cos(x)) / (2 * lam**2)
    return stack2(diag * em, off * em, off * ep, diag * ep)


def jc_dyson2(rabi, delta, t):
    """Small-coupling expansion of the JC amplitudes through lam^2."""
    lam = rabi / delta
    em = np.exp(-1j * delta * t)
    ep = np.conj(em)
    return stack2(
        1 + 1j * lam**2 / 4 * (delta * t + 1j * (1 - em)),
        -lam / 2 * (1 - em),
        -lam / 2 * (ep - 1),
        1 - 1j * lam**2 / 4 * (delta * t + 1j * (ep - 1)),
    )


# Schwinger spin


def schwinger_states(omega, theta, t):
    t = np.asarray(t, dtype=float)
    em, ep = np.exp(-0.5j * omega * t), np.exp(0.5j * omega * t)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    v0 = np.stack([em * c, ep * s], axis=-1)
    v1 = np.stack([em * s, -ep * c], axis=-1)
    return np.stack([v0, v1], axis=-1)


def schwinger_u0(omega0, omega, theta, t):
    wt = omega0 + omega * math.cos(theta)
    c, s = np.cos(0.5 * wt * t), np.sin(0.5 * wt * t)
    em, ep = np.exp(-0.5j * omega * t), np.exp(0.5j * omega * t)
    return stack2(
        (c + 1j * math.cos(theta) * s) * em,
        1j * math.sin(theta) * s * em,
        1j * math.sin(theta) * s * ep,
        (c - 1j * math.cos(theta) * s) * ep,
    )


def schwinger_hprime(omega0, omega, theta, t, hbar=1.0):
    """``-(1/2) hbar w sin(th) e^{-i w~ t}|0;0><1;0| + h.c.`` as a matrix."""
    wt = omega0 + omega * math.cos(theta)
    basis = schwinger_states(omega, theta, 0.0)
    k0, k1 = basis[:, 0], basis[:, 1]
    amp = -0.5 * hbar * omega * math.sin(theta) * np.exp(-1j * wt * np.asarray(t))
    op = np.outer(k0, np.conj(k1))
    return amp[..., None, None] * op + np.conj(amp)[..., None, None] * op.conj().T


# driven two-level system


def driven_tls_u0(V, omega0, t, hbar=1.0):
    a = V / (hbar * omega0) * np.sin(omega0 * np.asarray(t))
    return np.cos(a)[..., None, None] * np.eye(2) + 1j * np.sin(a)[..., None, None] * SIGMA_X


def bessel_series(n, z, terms=60):
    """Ascending power series for J_n(z), n >= 0."""
    total = 0.0
    for k in range(terms):
        total += (-1) ** k * (z / 2) ** (2 * k + n) / (math.factorial(k) * math.factorial(k + n))
    return total


def frobenius(a, b):
    return np.sqrt((np.abs(a - b) ** 2).sum(axis=(-2, -1)))

