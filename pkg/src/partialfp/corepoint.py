"""Core point localization with first-order complex filters.

The gradient tensor field ``c = fx + i fy`` is filtered with the complex
kernel ``(x + i m y) g(x, y)``. Two field modes exist. ``"magnitude"``
correlates ``|c|`` with the kernel; there the two orders only give conjugate
responses. ``"tensor-squared"`` correlates ``c**2`` with the conjugated kernel,
so the angle doubling removes the sign ambiguity of gradients and order +1
answers at cores while -1 answers at deltas. The block-wise variance of the
response magnitude is normalized to [0, 1] and its peak inside the foreground
marks the core.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidInputError, NoForegroundError, UnsupportedOrderError
from .imgcore import GradientPair, block_var, block_view, convolve, gaussian_kernel, normalize_minmax

FIELD_MODES = ("magnitude", "tensor-squared")


@dataclass(frozen=True)
class ComplexField:
    values: np.ndarray

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class ComplexFilterKernel:
    order: int
    sigma: float
    taps: np.ndarray

    @property
    def size(self) -> int:
        return self.taps.shape[0]


@dataclass(frozen=True)
class VarianceImage:
    """Normalized block variance of ``|R|`` plus the raw variances it came from."""

    block_size: int
    values: np.ndarray
    raw: np.ndarray

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CoreDetection:
    found: bool
    x: int
    y: int
    peak_response: float
    relative_peak: float
    secondary: Optional["CoreDetection"] = None

    def to_dict(self) -> dict:
        d = {
            "found": self.found,
            "x": self.x,
            "y": self.y,
            "peakResponse": self.peak_response,
            "relativePeak": self.relative_peak,
        }
        if self.secondary is not None:
            d["secondary"] = self.secondary.to_dict()
        return d


def tensor_field(grad: GradientPair) -> ComplexField:
    fx = np.asarray(grad.fx, dtype=np.float64)
    fy = np.asarray(grad.fy, dtype=np.float64)
    if fx.shape != fy.shape:
        raise InvalidInputError(f"gradient shapes differ: {fx.shape} vs {fy.shape}")
    return ComplexField(fx + 1j * fy)


def complex_filter_kernel(m: int, sigma: float, size: int) -> ComplexFilterKernel:
    """Taps ``r e^{i m phi} exp(-(x^2 + y^2) / 2 sigma^2)`` for ``m`` in {+1, -1}.

    ``r e^{i phi}`` is ``x + i y``, so the order -1 taps are the exact complex
    conjugates of the order +1 taps and the centre tap is exactly zero.
    """
    if m not in (1, -1):
        raise UnsupportedOrderError(f"only first-order filters (m = +1, -1) are supported, got {m}")
    g = gaussian_kernel(sigma, size)
    half = size // 2
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    taps = (x * g) + 1j * (m * y * g)
    return ComplexFilterKernel(m, float(sigma), taps)


def filter_response(field: ComplexField, kernel: ComplexFilterKernel,
                    mode: str = "magnitude", method: str = "auto") -> np.ndarray:
    """Complex response ``R`` of the filter over the tensor field.

    ``mode="magnitude"`` correlates ``|c|`` with the taps as they are. Since
    ``|c|`` is real, the two orders then give conjugate responses of equal
    magnitude.

    ``mode="tensor-squared"`` takes the scalar product of ``c**2`` with the
    filter (correlation with the conjugated taps). The squared field keeps the
    ridge direction, so order +1 responds at cores and order -1 at deltas.
    """
    if mode == "magnitude":
        return convolve(field.magnitude, kernel.taps, method=method)
    if mode == "tensor-squared":
        return convolve(field.values ** 2, np.conj(kernel.taps), method=method)
    raise ValueError(f"unknown field mode {mode!r}; expected one of {FIELD_MODES}")


def variance_image(response, window: int = 32) -> VarianceImage:
    """Block variance of ``|R|`` over ``window/4`` tiles, normalized to [0, 1]."""
    mag = np.abs(np.asarray(response))
    block = window // 4
    if block < 1:
        raise InvalidInputError(f"window {window} gives an empty variance block")
    if mag.ndim != 2 or mag.shape[0] < block or mag.shape[1] < block:
        raise InvalidInputError(f"response {mag.shape} smaller than one {block}x{block} block")
    raw = block_var(mag, block)
    # a flat tile can pick up rounding-level variance; treat it as zero
    means = np.abs(np.nanmean(block_view(mag, block), axis=2))
    raw = np.where(raw <= (1e-9 * means) ** 2, 0.0, raw)
    return VarianceImage(block, normalize_minmax(raw), raw)


def block_centers(rows: int, cols: int, block: int):
    """Pixel coordinates ``(x, y)`` of each block centre."""
    ys = np.arange(rows) * block + block // 2
    xs = np.arange(cols) * block + block // 2
    return np.meshgrid(xs, ys)


def locate_core(var: VarianceImage, mask, min_response: float = 4.0,
                search_mask=None) -> CoreDetection:
    """Peak of the variance image among blocks whose centre is foreground.

    ``found`` requires the raw peak variance to reach ``min_response`` times
    the mean raw variance of the eligible blocks. Ties go to the first block in
    row-major order. ``search_mask`` restricts the candidates further.
    """
    mask = np.asarray(mask, dtype=bool)
    if var.values.size == 0:
        raise InvalidInputError("empty variance image")
    h, w = mask.shape
    xs, ys = block_centers(var.rows, var.cols, var.block_size)
    inside = (xs < w) & (ys < h)
    eligible = np.zeros(var.values.shape, dtype=bool)
    eligible[inside] = mask[ys[inside], xs[inside]]
    if search_mask is not None:
        search_mask = np.asarray(search_mask, dtype=bool)
        narrowed = eligible.copy()
        narrowed[inside] &= search_mask[ys[inside], xs[inside]]
        candidates = narrowed
    else:
        candidates = eligible
    if not eligible.any():
        raise NoForegroundError("no variance block centre lies in the foreground")
    if not candidates.any():
        return CoreDetection(False, int(w // 2), int(h // 2), 0.0, 0.0)

    scores = np.where(candidates, var.values, -np.inf)
    idx = int(np.argmax(scores))
    r, c = divmod(idx, var.cols)
    mean_raw = var.raw[eligible].mean()
    relative = float(var.raw[r, c] / mean_raw) if mean_raw > 0 else 0.0
    found = relative >= min_response
    return CoreDetection(bool(found), int(xs[r, c]), int(ys[r, c]),
                         float(var.values[r, c]), relative)
