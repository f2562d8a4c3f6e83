"""Difference-of-Gaussians kernels and their rectified responses.

The kernel subtracts an inner Gaussian (std 0.5*sigma) from an outer one
(std sigma), both unit-mass, truncated at radius ceil(3*sigma) and
mean-subtracted so the weights sum to zero on the truncated support.
``center-off`` is the raw outer-minus-inner arrangement (negative center,
responds to dark blobs); ``center-on`` is its negation and is the default
because line prototypes here are bright on a dark background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ParameterError, SizeMismatchError
from .imgio import GrayImage

CENTER_ON = "center-on"
CENTER_OFF = "center-off"
POLARITIES = (CENTER_ON, CENTER_OFF)

# inner Gaussian std relative to the outer, per the LGN-cell model
INNER_SIGMA_FACTOR = 0.5


@dataclass(frozen=True)
class DogKernel:
    """Square zero-sum kernel with 8-fold symmetry.

    ``weights`` has shape (2*radius+1, 2*radius+1), row-major, indexed
    ``[radius + dy, radius + dx]``.
    """

    sigma: float
    polarity: str
    radius: int
    weights: np.ndarray

    @property
    def size(self) -> int:
        return 2 * self.radius + 1


def _gaussian2d(r2: np.ndarray, sigma: float) -> np.ndarray:
    s2 = sigma * sigma
    return np.exp(-r2 / (2.0 * s2)) / (2.0 * math.pi * s2)


def make_dog(sigma: float, polarity: str = CENTER_ON) -> DogKernel:
    """Build the DoG kernel for the given outer std and polarity."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if polarity not in POLARITIES:
        raise ParameterError(f"polarity must be one of {POLARITIES}, got {polarity!r}")
    radius = int(math.ceil(3.0 * sigma))
    coords = np.arange(-radius, radius + 1, dtype=np.float64)
    # squared radius built symmetrically so mirrored taps get identical floats
    r2 = coords[None, :] ** 2 + coords[:, None] ** 2
    w = _gaussian2d(r2, sigma) - _gaussian2d(r2, INNER_SIGMA_FACTOR * sigma)
    w -= w.mean()
    if polarity == CENTER_ON:
        w = -w
    return DogKernel(sigma=float(sigma), polarity=polarity, radius=radius, weights=w)


def _orbit_decomposition(weights: np.ndarray):
    """Split a kernel into its center weight plus 90-degree-rotation orbits.

    Representatives (kx, ky) with kx >= 1, 0 <= ky cover each 4-element
    orbit exactly once; 8-fold symmetry guarantees one weight per orbit.
    """
    r = (weights.shape[0] - 1) // 2
    kx = []
    ky = []
    w_orbit = []
    for b in range(0, r + 1):
        for a in range(1, r + 1):
            kx.append(a)
            ky.append(b)
            w_orbit.append(weights[r + b, r + a])
    return (
        float(weights[r, r]),
        np.asarray(kx, dtype=np.int32),
        np.asarray(ky, dtype=np.int32),
        np.asarray(w_orbit, dtype=np.float64),
    )


def dog_response(img: GrayImage, kernel: DogKernel) -> GrayImage:
    """Half-wave-rectified correlation of the image with a DoG kernel.

    Borders are mirror-padded (edge pixel included). The image minimum is
    subtracted before correlating; for a zero-sum kernel that changes
    nothing mathematically, but it makes the response on constant inputs
    exactly zero and is invariant under a 90-degree rotation of the input.
    """
    if kernel.size > img.width or kernel.size > img.height:
        raise SizeMismatchError(
            f"kernel size {kernel.size} exceeds image {img.width}x{img.height}"
        )
    v = img.data - img.data.min()
    padded = np.pad(v, kernel.radius, mode="symmetric")
    w_center, kx, ky, w_orbit = _orbit_decomposition(kernel.weights)
    out = backend.correlate2d(padded, kernel.radius, w_center, kx, ky, w_orbit)
    np.maximum(out, 0.0, out=out)
    return GrayImage(out)
