"""Integer-order Bessel functions of the first kind by Miller's downward recurrence."""
from __future__ import annotations

import math

import numpy as np


def bessel_j_range(z: float, n_max: int) -> np.ndarray:
    """``[J_0(z), J_1(z), ..., J_{n_max}(z)]`` for real ``z``.

    Recurs ``J_{k-1} = (2k/z) J_k - J_{k+1}`` downward from well above
    ``max(n_max, |z|)`` and normalises with ``J_0 + 2 sum_k J_{2k} = 1``.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    z = float(z)
    out = np.zeros(n_max + 1)
    if z == 0.0:
        out[0] = 1.0
        return out
    x = abs(z)
    top = int(max(n_max, x)) + 20 + int(math.sqrt(40.0 * max(n_max, x, 1.0)))
    top += top % 2
    vals = np.zeros(top + 2)
    vals[top] = 1e-300
    for k in range(top, 0, -1):
        vals[k - 1] = (2.0 * k / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            # rescale to stay in range; the normalisation below fixes the constant
            vals[k - 1 :] *= 1e-250
    norm = vals[0] + 2.0 * vals[2:top + 1:2].sum()
    out[:] = vals[: n_max + 1] / norm
    if z < 0:
        out[1::2] *= -1.0
    return out


def bessel_j0(z: float) -> float:
    return float(bessel_j_range(z, 0)[0])
