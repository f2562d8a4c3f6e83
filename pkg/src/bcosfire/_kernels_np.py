"""Pure-numpy implementations of the hot kernels.

Used when the compiled extension is unavailable (or BCOSFIRE_PURE is set).
The floating-point operation order here is the contract both backends
implement, so results are bit-identical across them:

* ``correlate2d`` accumulates taps grouped into 90-degree-rotation orbits,
  opposite pairs summed first. That makes the sum invariant under a
  90-degree rotation of the input, which is what guarantees exact rotation
  equivariance of the responses downstream.
* ``wmax_h``/``wmax_v`` evaluate each candidate as a single product, so the
  running maximum never accumulates rounding.
"""

from __future__ import annotations

import numpy as np


def correlate2d(padded: np.ndarray, r: int, w_center: float,
                kx: np.ndarray, ky: np.ndarray, w_orbit: np.ndarray) -> np.ndarray:
    """Orbit-grouped 2-D correlation.

    ``padded`` is the input already padded by ``r`` on all sides. The kernel
    is given by its center weight plus one weight per rotation orbit with
    representative tap (kx, ky), kx >= 1, ky >= 0.
    """
    h = padded.shape[0] - 2 * r
    w = padded.shape[1] - 2 * r
    acc = w_center * padded[r : r + h, r : r + w]
    for i in range(w_orbit.shape[0]):
        a = int(kx[i])
        b = int(ky[i])
        # orbit (a,b), (-b,a), (-a,-b), (b,-a); opposite pairs first
        p1 = padded[r + b : r + b + h, r + a : r + a + w]
        p2 = padded[r + a : r + a + h, r - b : r - b + w]
        p3 = padded[r - b : r - b + h, r - a : r - a + w]
        p4 = padded[r - a : r - a + h, r + b : r + b + w]
        acc += w_orbit[i] * ((p1 + p3) + (p2 + p4))
    return acc


def wmax_h(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Weighted max filter along rows: out[y,x] = max_k a[y,x-k]*g[k].

    Out-of-bounds reads contribute 0; ``a`` must be nonnegative.
    """
    half = (g.shape[0] - 1) // 2
    w = a.shape[1]
    out = np.zeros_like(a)
    for k in range(-half, half + 1):
        gk = g[k + half]
        if k > 0:
            np.maximum(out[:, k:], a[:, : w - k] * gk, out=out[:, k:])
        elif k < 0:
            np.maximum(out[:, :k], a[:, -k:] * gk, out=out[:, :k])
        else:
            np.maximum(out, a * gk, out=out)
    return out


def wmax_v(a: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Weighted max filter along columns: out[y,x] = max_k a[y-k,x]*g[k]."""
    half = (g.shape[0] - 1) // 2
    h = a.shape[0]
    out = np.zeros_like(a)
    for k in range(-half, half + 1):
        gk = g[k + half]
        if k > 0:
            np.maximum(out[k:, :], a[: h - k, :] * gk, out=out[k:, :])
        elif k < 0:
            np.maximum(out[:k, :], a[-k:, :] * gk, out=out[:k, :])
        else:
            np.maximum(out, a * gk, out=out)
    return out
