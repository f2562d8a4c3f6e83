"""Filter configuration from a synthetic prototype bar.

A prototype is presented to the DoG stage and the rectified response is
sampled along concentric circles around the image center. Angular local
maxima above 0.75 of the circle's peak become sub-units (sigma_i, rho_i,
phi_i); a bar crossing a circle produces two of them. Coordinates follow
x rightward (columns), y downward (rows); a sub-unit's pixel offset is
(dx, dy) = (rho*cos(phi), rho*sin(phi)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dog import CENTER_ON, POLARITIES, make_dog, dog_response
from .errors import ConfigurationError, FormatError, ParameterError
from .imgio import GrayImage

TWO_PI = 2.0 * math.pi

# angular sampling density along each circle, and the relative threshold a
# local maximum must reach to be kept
CIRCLE_SAMPLES = 360
KEEP_FRACTION = 0.75


@dataclass(frozen=True)
class FilterParams:
    """User-facing configuration knobs for one filter."""

    sigma: float
    radii: tuple[float, ...]
    sigma0: float
    alpha: float
    n_rot: int = 12
    polarity: str = CENTER_ON

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if self.sigma <= 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.radii:
            raise ParameterError("radii must be nonempty")
        if self.radii[0] < 0:
            raise ParameterError("radii must be nonnegative")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ParameterError("radii must be strictly increasing")
        if self.sigma0 < 0 or self.alpha < 0:
            raise ParameterError("sigma0 and alpha must be nonnegative")
        if self.n_rot < 1:
            raise ParameterError(f"n_rot must be >= 1, got {self.n_rot}")
        if self.polarity not in POLARITIES:
            raise ParameterError(f"unknown polarity {self.polarity!r}")


@dataclass(frozen=True)
class SubUnit:
    """One configured response-sampling point in polar and pixel offsets."""

    sigma: float
    rho: float
    phi: float
    dx: float
    dy: float


def make_subunit(sigma: float, rho: float, phi: float) -> SubUnit:
    return SubUnit(
        sigma=float(sigma),
        rho=float(rho),
        phi=float(phi),
        dx=rho * math.cos(phi),
        dy=rho * math.sin(phi),
    )


@dataclass(frozen=True)
class CosfireModel:
    """Ordered sub-units plus the positional-tolerance parameters."""

    subunits: tuple[SubUnit, ...]
    sigma0: float
    alpha: float
    polarity: str
    prototype_descr: str = ""

    def __post_init__(self):
        if not self.subunits:
            raise ParameterError("model must contain at least one sub-unit")
        if self.polarity not in POLARITIES:
            raise ParameterError(f"unknown polarity {self.polarity!r}")

    @property
    def rho_values(self) -> tuple[float, ...]:
        return tuple(sorted({su.rho for su in self.subunits}))


def make_prototype_bar(width: float, orientation: float, size: int) -> GrayImage:
    """Synthetic bar: 1 on the band of the given width through the image
    center at the given orientation (radians), 0 elsewhere. Hard edges."""
    if size < 1:
        raise ParameterError(f"size must be positive, got {size}")
    if width <= 0:
        raise ParameterError(f"width must be positive, got {width}")
    if width >= size / 2:
        raise ParameterError(f"width {width} must be below size/2 = {size / 2}")
    c = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - c
    nx = -math.sin(orientation)
    ny = math.cos(orientation)
    dist = np.abs(coords[None, :] * nx + coords[:, None] * ny)
    return GrayImage((dist <= width / 2.0).astype(np.float64))


def _bilinear(arr: np.ndarray, x: float, y: float) -> float:
    h, w = arr.shape
    if x < 0.0 or y < 0.0 or x > w - 1 or y > h - 1:
        raise ParameterError(f"sample point ({x:.2f}, {y:.2f}) outside image")
    x0 = min(int(math.floor(x)), w - 2) if w > 1 else 0
    y0 = min(int(math.floor(y)), h - 2) if h > 1 else 0
    fx = x - x0
    fy = y - y0
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    return (
        (1.0 - fx) * (1.0 - fy) * arr[y0, x0]
        + fx * (1.0 - fy) * arr[y0, x1]
        + (1.0 - fx) * fy * arr[y1, x0]
        + fx * fy * arr[y1, x1]
    )


def _circular_local_maxima(values: np.ndarray) -> list[tuple[float, float]]:
    """(position, value) of strict circular local maxima; a plateau counts
    once, at its midpoint. A constant sequence has no maxima."""
    n = len(values)
    # run-length encode circularly, starting at a run boundary
    start = None
    for i in range(n):
        if values[i] != values[i - 1]:
            start = i
            break
    if start is None:
        return []
    runs = []  # (first_index, length, value)
    i = start
    while True:
        v = values[i]
        j = i
        length = 0
        while length < n and values[j % n] == v:
            length += 1
            j += 1
        runs.append((i % n, length, v))
        i = j
        if sum(r[1] for r in runs) >= n:
            break
    peaks = []
    m = len(runs)
    for k, (first, length, v) in enumerate(runs):
        if v > runs[k - 1][2] and v > runs[(k + 1) % m][2]:
            pos = (first + (length - 1) / 2.0) % n
            peaks.append((pos, float(v)))
    peaks.sort(key=lambda p: p[0])
    return peaks


def configure_filter(prototype: GrayImage, params: FilterParams) -> CosfireModel:
    """Derive the sub-unit set from the DoG response of a prototype.

    The prototype must present its lines in the contrast the chosen
    polarity prefers (bright-on-dark for center-on).
    """
    kernel = make_dog(params.sigma, params.polarity)
    dmap = dog_response(prototype, kernel).data
    cx = (prototype.width - 1) / 2.0
    cy = (prototype.height - 1) / 2.0

    subunits: list[SubUnit] = []
    for rho in params.radii:
        if rho == 0.0:
            center = _bilinear(dmap, cx, cy)
            if center <= 0.0:
                raise ConfigurationError(
                    "no DoG response at the prototype center (check polarity)"
                )
            subunits.append(make_subunit(params.sigma, 0.0, 0.0))
            continue
        angles = TWO_PI * np.arange(CIRCLE_SAMPLES) / CIRCLE_SAMPLES
        ring = np.array(
            [
                _bilinear(dmap, cx + rho * math.cos(a), cy + rho * math.sin(a))
                for a in angles
            ]
        )
        if ring.max() <= 0.0:
            raise ConfigurationError(f"no DoG response on the circle rho={rho:g}")
        cutoff = KEEP_FRACTION * ring.max()
        kept = [
            (pos, v)
            for pos, v in _circular_local_maxima(ring)
            if v > 0.0 and v >= cutoff
        ]
        if not kept:
            raise ConfigurationError(
                f"no angular local maxima on the circle rho={rho:g}"
            )
        for pos, _ in kept:
            subunits.append(make_subunit(params.sigma, rho, TWO_PI * pos / CIRCLE_SAMPLES))

    subunits.sort(key=lambda su: (su.rho, su.phi))
    return CosfireModel(
        subunits=tuple(subunits),
        sigma0=float(params.sigma0),
        alpha=float(params.alpha),
        polarity=params.polarity,
        prototype_descr=f"prototype {prototype.width}x{prototype.height}, "
        f"sigma={params.sigma:g}, radii={params.radii}",
    )


def rotate_model(model: CosfireModel, psi: float) -> CosfireModel:
    """Rotate the orientation preference: each phi_i -> (phi_i + psi) mod 2*pi."""
    rotated = tuple(
        make_subunit(su.sigma, su.rho, (su.phi + psi) % TWO_PI)
        for su in model.subunits
    )
    return replace(model, subunits=rotated)


def save_model(model: CosfireModel, path) -> None:
    """Write the model file (UTF-8 text, 9 significant digits)."""
    lines = [
        f"BCOSFIRE 1 {model.sigma0:.9g} {model.alpha:.9g} {model.polarity}"
    ]
    if model.prototype_descr:
        lines.append(f"# prototype: {model.prototype_descr}")
    for su in model.subunits:
        lines.append(f"{su.sigma:.9g} {su.rho:.9g} {su.phi:.9g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path) -> CosfireModel:
    """Parse a model file written by :func:`save_model` (or by hand)."""
    text = Path(path).read_text(encoding="utf-8")
    header = None
    descr = ""
    subunits = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# prototype:"):
                descr = line[len("# prototype:") :].strip()
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 5 or parts[0] != "BCOSFIRE" or parts[1] != "1":
                raise FormatError(f"{path}:{lineno}: expected 'BCOSFIRE 1 <sigma0> <alpha> <polarity>'")
            try:
                sigma0 = float(parts[2])
                alpha = float(parts[3])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-numeric header field") from None
            polarity = parts[4]
            if polarity not in POLARITIES:
                raise FormatError(f"{path}:{lineno}: unknown polarity {polarity!r}")
            if sigma0 < 0 or alpha < 0:
                raise FormatError(f"{path}:{lineno}: sigma0 and alpha must be nonnegative")
            header = (sigma0, alpha, polarity)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"{path}:{lineno}: expected '<sigma> <rho> <phi>'")
        try:
            sigma, rho, phi = (float(p) for p in parts)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-numeric sub-unit field") from None
        if sigma <= 0 or rho < 0:
            raise FormatError(f"{path}:{lineno}: sigma must be positive and rho nonnegative")
        subunits.append(make_subunit(sigma, rho, phi % TWO_PI))
    if header is None:
        raise FormatError(f"{path}: missing 'BCOSFIRE 1' header line")
    if not subunits:
        raise FormatError(f"{path}: model file contains no sub-units")
    sigma0, alpha, polarity = header
    return CosfireModel(
        subunits=tuple(subunits),
        sigma0=sigma0,
        alpha=alpha,
        polarity=polarity,
        prototype_descr=descr,
    )
