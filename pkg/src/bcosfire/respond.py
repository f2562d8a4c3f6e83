"""Filter application: blurred/shifted sub-unit responses, geometric-mean
combination, and rotation-tolerant pooling.

A sub-unit response is the weighted maximum of the DoG map over a square
window (half-width floor(3*sigma_blur)) with a unit-peak Gaussian weight,
shifted by the sub-unit's offset rounded to whole pixels. Reads outside the
DoG map contribute 0. The blur radius grows with the sub-unit's distance
from the filter center: sigma_blur = sigma0 + alpha * rho.

The geometric mean is evaluated as exp(mean(log)) with an exact zero
short-circuit, accumulating log terms grouped by rho so that models whose
sub-unit set is symmetric under phi -> phi + pi produce bit-identical
responses for orientation offsets that differ by pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import groupby

import numpy as np

from . import backend
from .configure import CosfireModel, SubUnit, rotate_model
from .dog import make_dog, dog_response
from .errors import ParameterError
from .imgio import GrayImage


@dataclass(frozen=True)
class ResponseMap:
    """Nonnegative per-pixel filter response plus provenance."""

    image: GrayImage
    model_descr: str = ""
    n_rot: int = 1

    @property
    def data(self) -> np.ndarray:
        return self.image.data


def _blur_weights(sigma_blur: float) -> np.ndarray:
    """Unit-peak 1-D Gaussian sampled at integers in [-3s, 3s]."""
    if sigma_blur <= 0.0:
        return np.ones(1, dtype=np.float64)
    half = int(math.floor(3.0 * sigma_blur))
    k = np.arange(-half, half + 1, dtype=np.float64)
    return np.exp(-(k * k) / (2.0 * sigma_blur * sigma_blur))


def _blurred_canvas(dog_data: np.ndarray, pad: int, g: np.ndarray) -> np.ndarray:
    """Weighted max filter on a zero-extended canvas (pad on all sides)."""
    p = np.pad(dog_data, pad, mode="constant") if pad else dog_data
    return backend.wmax_v(backend.wmax_h(p, g), g)


def _shift_crop(canvas: np.ndarray, pad: int, dx: int, dy: int,
                height: int, width: int) -> np.ndarray:
    """Read the blurred canvas shifted by (dx, dy); zero beyond the canvas."""
    y0 = pad - dy
    x0 = pad - dx
    if 0 <= y0 and y0 + height <= canvas.shape[0] and 0 <= x0 and x0 + width <= canvas.shape[1]:
        return canvas[y0 : y0 + height, x0 : x0 + width].copy()
    out = np.zeros((height, width), dtype=np.float64)
    ys = max(y0, 0)
    xs = max(x0, 0)
    ye = min(y0 + height, canvas.shape[0])
    xe = min(x0 + width, canvas.shape[1])
    if ys < ye and xs < xe:
        out[ys - y0 : ye - y0, xs - x0 : xe - x0] = canvas[ys:ye, xs:xe]
    return out


def _pixel_offset(su: SubUnit) -> tuple[int, int]:
    return int(round(su.dx)), int(round(su.dy))


def subunit_response(dog_map: GrayImage, su: SubUnit,
                     sigma0: float, alpha: float) -> GrayImage:
    """Blurred and shifted response of one sub-unit on its DoG map."""
    sigma_blur = sigma0 + alpha * su.rho
    g = _blur_weights(sigma_blur)
    dx, dy = _pixel_offset(su)
    pad = max(abs(dx), abs(dy))
    canvas = _blurred_canvas(dog_map.data, pad, g)
    return GrayImage(_shift_crop(canvas, pad, dx, dy, dog_map.height, dog_map.width))


def _model_response(img: GrayImage, model: CosfireModel,
                    dog_cache: dict, blur_cache: dict) -> np.ndarray:
    """Geometric mean of sub-unit responses, sharing DoG and blur maps.

    The caches are keyed by sigma and (sigma, rho); they may be reused
    across model rotations, which change only the sub-unit offsets.
    """
    shape = (img.height, img.width)
    n = len(model.subunits)
    log_sum = np.zeros(shape, dtype=np.float64)
    zero = np.zeros(shape, dtype=bool)
    for rho, group in groupby(model.subunits, key=lambda su: su.rho):
        group_sum = None
        for su in group:
            dmap = dog_cache.get(su.sigma)
            if dmap is None:
                dmap = dog_response(img, make_dog(su.sigma, model.polarity)).data
                dog_cache[su.sigma] = dmap
            key = (su.sigma, su.rho)
            cached = blur_cache.get(key)
            if cached is None:
                pad = int(math.ceil(su.rho))
                g = _blur_weights(model.sigma0 + model.alpha * su.rho)
                cached = (_blurred_canvas(dmap, pad, g), pad)
                blur_cache[key] = cached
            canvas, pad = cached
            dx, dy = _pixel_offset(su)
            s = _shift_crop(canvas, pad, dx, dy, img.height, img.width)
            zero |= s == 0.0
            term = np.log(np.where(s > 0.0, s, 1.0))
            group_sum = term if group_sum is None else group_sum + term
        log_sum += group_sum
    out = np.exp(log_sum / n)
    out[zero] = 0.0
    return out


def filter_response(img: GrayImage, model: CosfireModel) -> ResponseMap:
    """Response of the filter at its configured orientation."""
    if not model.subunits:
        raise ParameterError("model has no sub-units")
    data = _model_response(img, model, {}, {})
    return ResponseMap(GrayImage(data), model_descr=model.prototype_descr, n_rot=1)


def rotation_tolerant_response(img: GrayImage, model: CosfireModel,
                               n_rot: int) -> ResponseMap:
    """Pixelwise max over n_rot orientation offsets {k*pi/n_rot}."""
    if n_rot < 1:
        raise ParameterError(f"n_rot must be >= 1, got {n_rot}")
    if not model.subunits:
        raise ParameterError("model has no sub-units")
    dog_cache: dict = {}
    blur_cache: dict = {}
    best = None
    for k in range(n_rot):
        psi = k * math.pi / n_rot
        rotated = rotate_model(model, psi) if k else model
        resp = _model_response(img, rotated, dog_cache, blur_cache)
        best = resp if best is None else np.maximum(best, resp)
    return ResponseMap(GrayImage(best), model_descr=model.prototype_descr, n_rot=n_rot)


def normalize_response(resp: ResponseMap) -> ResponseMap:
    """Scale so the global max is 1; all-zero maps pass through unchanged."""
    peak = resp.data.max()
    if peak <= 0.0:
        return resp
    return ResponseMap(GrayImage(resp.data / peak), resp.model_descr, resp.n_rot)
