"""Image and mask I/O.

Every other module consumes only :class:`GrayImage` (2-D float64 in [0, 1])
and :class:`BinaryMask`. PGM files (ASCII P2 and binary P5) are parsed and
written here bit-exactly; 8-bit gray/RGB PNG is read through Pillow behind
the same interface. Color inputs are reduced to one channel according to a
channel policy (default: green, where line/vessel contrast is strongest).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError

CHANNEL_POLICIES = ("green", "luma", "red", "blue")

# ITU-R BT.601 luma weights
_LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = frozenset(b" \t\n\r\x0b\x0c")


@dataclass(frozen=True)
class GrayImage:
    """2-D scalar field; the universal pixel container.

    ``data`` is a C-contiguous float64 array indexed ``[row, col]``; all
    values must be finite.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError("image data must be a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("image pixels must all be finite")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def pixels(self) -> np.ndarray:
        """Row-major flat view of the pixel values."""
        return self.data.reshape(-1)


@dataclass(frozen=True)
class BinaryMask:
    """2-D boolean field, dimensioned like the image it accompanies."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError("mask data must be a non-empty 2-D array")
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited header token, skipping ``#`` comments."""
    n = len(buf)
    i = pos
    while i < n:
        c = buf[i]
        if c in _WHITESPACE:
            i += 1
        elif c == 0x23:  # '#'
            while i < n and buf[i] not in (0x0A, 0x0D):
                i += 1
        else:
            break
    if i >= n:
        raise FormatError("truncated PNM header")
    j = i
    while j < n and buf[j] not in _WHITESPACE and buf[j] != 0x23:
        j += 1
    return buf[i:j], j


def _read_pnm(buf: bytes, name: str) -> np.ndarray:
    """Decode a P2/P5 PGM into a float64 array scaled to [0, 1]."""
    magic, pos = _next_token(buf, 0)
    fields = []
    for _ in range(3):
        tok, pos = _next_token(buf, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise FormatError(f"{name}: non-numeric PNM header field {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"{name}: bad PNM dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise FormatError(f"{name}: unsupported PNM maxval {maxval}")
    count = width * height

    if magic == b"P5":
        if pos >= len(buf) or buf[pos] not in _WHITESPACE:
            raise FormatError(f"{name}: missing raster delimiter")
        raster = buf[pos + 1 :]
        dtype = ">u2" if maxval > 255 else np.uint8
        itemsize = 2 if maxval > 255 else 1
        if len(raster) < count * itemsize:
            raise FormatError(f"{name}: truncated P5 raster")
        samples = np.frombuffer(raster, dtype=dtype, count=count).astype(np.float64)
    elif magic == b"P2":
        samples = np.empty(count, dtype=np.float64)
        for k in range(count):
            try:
                tok, pos = _next_token(buf, pos)
            except FormatError:
                raise FormatError(f"{name}: truncated P2 raster") from None
            try:
                samples[k] = int(tok)
            except ValueError:
                raise FormatError(f"{name}: non-numeric P2 sample {tok!r}") from None
    else:
        raise FormatError(f"{name}: unsupported PNM magic {magic!r}")

    if samples.max(initial=0.0) > maxval:
        raise FormatError(f"{name}: sample exceeds maxval {maxval}")
    return (samples / float(maxval)).reshape(height, width)


def _reduce_rgb(arr: np.ndarray, channel: str) -> np.ndarray:
    if channel not in CHANNEL_POLICIES:
        raise ParameterError(f"unknown channel policy {channel!r}")
    if channel == "luma":
        r, g, b = _LUMA_WEIGHTS
        return r * arr[:, :, 0] + g * arr[:, :, 1] + b * arr[:, :, 2]
    return arr[:, :, {"red": 0, "green": 1, "blue": 2}[channel]]


def _load_png(path: Path, channel: str) -> GrayImage:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode == "L":
            return GrayImage(np.asarray(im, dtype=np.float64) / 255.0)
        if im.mode == "RGB":
            arr = np.asarray(im, dtype=np.float64) / 255.0
            return GrayImage(_reduce_rgb(arr, channel))
        raise FormatError(
            f"{path.name}: unsupported PNG mode {im.mode!r} (need 8-bit gray or RGB)"
        )


def load_image(path, channel: str = "green") -> GrayImage:
    """Load a PGM (P2/P5) or PNG file as a GrayImage scaled to [0, 1].

    RGB inputs are reduced with the given channel policy; grayscale inputs
    ignore it. Raises OSError for unreadable files and FormatError for
    malformed or unsupported content.
    """
    path = Path(path)
    buf = path.read_bytes()
    if buf[:2] in (b"P2", b"P5"):
        return GrayImage(_read_pnm(buf, path.name))
    if buf[:8] == _PNG_SIGNATURE:
        return _load_png(path, channel)
    raise FormatError(f"{path.name}: not a PGM (P2/P5) or PNG file")


def save_image(img: GrayImage, path) -> None:
    """Write an 8-bit binary PGM (P5), clamping to [0, 1] first.

    Quantization is round-half-up: byte = floor(255*v + 0.5).
    """
    v = np.clip(img.data, 0.0, 1.0)
    q = np.floor(v * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + q.tobytes())


def invert(img: GrayImage) -> GrayImage:
    """Map each pixel v to 1 - v (for dark lines on a bright background)."""
    d = img.data
    if d.min() < 0.0 or d.max() > 1.0:
        raise ParameterError("invert expects an image normalized to [0, 1]")
    return GrayImage(1.0 - d)


def normalize(img: GrayImage) -> GrayImage:
    """Affinely rescale to [0, 1]; constant images map to all zeros."""
    lo = img.data.min()
    hi = img.data.max()
    if hi == lo:
        return GrayImage(np.zeros_like(img.data))
    return GrayImage((img.data - lo) / (hi - lo))


def load_mask(path) -> BinaryMask:
    """Load a PGM/PNG as a boolean mask: true where the pixel exceeds 0.5."""
    img = load_image(path)
    return BinaryMask(img.data > 0.5)
