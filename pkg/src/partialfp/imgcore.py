"""Raster primitives shared by every pipeline stage.

Images are plain 2-D ``numpy.float64`` arrays indexed ``[row, col]`` (``[y, x]``)
holding intensities in ``[0, 1]``. Kernels are odd-sized square arrays, real or
complex, centred at ``(size - 1) // 2``.
"""

from pathlib import Path
from typing import NamedTuple

import numpy as np
from PIL import Image
from scipy import ndimage, signal

from .errors import InvalidInputError

# Kernels at least this wide are applied through the FFT.
FFT_KERNEL_SIZE = 11


class GradientPair(NamedTuple):
    fx: np.ndarray
    fy: np.ndarray


def as_gray(data) -> np.ndarray:
    """Validate ``data`` as a gray image and return it as a float64 array.

    ``uint8`` input is scaled by 1/255 and boolean input maps to {0, 1}.
    """
    arr = np.asarray(data)
    if arr.dtype == np.uint8:
        arr = arr / 255.0
    elif arr.dtype == bool:
        arr = arr.astype(np.float64)
    else:
        arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"expected a non-empty 2-D raster, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("raster contains non-finite samples")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise InvalidInputError("gray intensities must lie in [0, 1]")
    return arr


def normalize_minmax(img) -> np.ndarray:
    """Rescale ``img`` linearly so that its minimum is 0 and maximum is 1.

    A constant raster has no range to stretch and maps to all zeros.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.size == 0:
        raise InvalidInputError("cannot normalize an empty raster")
    lo = arr.min()
    hi = arr.max()
    if hi <= lo:
        return np.zeros_like(arr)
    out = (arr - lo) / (hi - lo)
    # guard the endpoints against rounding
    return np.clip(out, 0.0, 1.0)


def contrast_stretch(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.size == 0:
        raise InvalidInputError("cannot stretch an empty image")
    return normalize_minmax(arr)


def gradients(img) -> GradientPair:
    """3x3 Sobel derivatives with replicated edges.

    ``fx`` is the derivative along columns (x), ``fy`` along rows (y, pointing
    down). Both are divided by 8 so a unit-slope ramp gives a response of 1.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] < 3:
        raise InvalidInputError(f"gradients need at least a 3x3 image, got {arr.shape}")
    fx = ndimage.sobel(arr, axis=1, mode="nearest") / 8.0
    fy = ndimage.sobel(arr, axis=0, mode="nearest") / 8.0
    return GradientPair(fx, fy)


def check_kernel(k) -> np.ndarray:
    k = np.asarray(k)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise InvalidInputError(f"kernel must be square, got shape {k.shape}")
    size = k.shape[0]
    if size < 1 or size % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd, got {size}")
    if not np.all(np.isfinite(k)):
        raise InvalidInputError("kernel taps must be finite")
    return k


def kernel_offsets(size: int):
    """Integer offset grids ``(x, y)`` for a square kernel of odd ``size``."""
    if size < 1 or size % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd, got {size}")
    half = size // 2
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    return x, y


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    """Unnormalized Gaussian taps ``exp(-(x^2 + y^2) / 2 sigma^2)``; centre tap is 1."""
    if not sigma > 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if size < 3 or size % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd and >= 3, got {size}")
    x, y = kernel_offsets(size)
    return np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))


def _correlate_real(img: np.ndarray, k: np.ndarray, method: str) -> np.ndarray:
    if method == "direct":
        return ndimage.correlate(img, k, mode="nearest")
    half = k.shape[0] // 2
    padded = np.pad(img, half, mode="edge")
    return signal.fftconvolve(padded, k[::-1, ::-1], mode="valid")


def convolve(img, k, method: str = "auto") -> np.ndarray:
    """Correlate ``img`` with kernel ``k`` (no kernel flip), replicating edges.

    Either operand may be complex. ``method`` is ``"direct"``, ``"fft"`` or
    ``"auto"`` (FFT for kernels of size ``FFT_KERNEL_SIZE`` and above).
    The output has the shape of ``img``.
    """
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise InvalidInputError(f"expected a non-empty 2-D raster, got shape {img.shape}")
    k = check_kernel(k)
    if method == "auto":
        method = "fft" if k.shape[0] >= FFT_KERNEL_SIZE else "direct"
    if method not in ("direct", "fft"):
        raise ValueError(f"unknown convolution method {method!r}")

    img_parts = [img.real.astype(np.float64)]
    if np.iscomplexobj(img):
        img_parts.append(img.imag.astype(np.float64))
    k_parts = [k.real.astype(np.float64)]
    if np.iscomplexobj(k):
        k_parts.append(k.imag.astype(np.float64))

    if len(img_parts) == 1 and len(k_parts) == 1:
        return _correlate_real(img_parts[0], k_parts[0], method)

    # (a + ib) * (c + id) = (ac - bd) + i(ad + bc)
    out = np.zeros(img.shape, dtype=np.complex128)
    for i, ip in enumerate(img_parts):
        for j, kp in enumerate(k_parts):
            term = _correlate_real(ip, kp, method)
            if i == 1 and j == 1:
                out -= term
            elif i + j == 1:
                out += 1j * term
            else:
                out += term
    return out


def block_view(img: np.ndarray, block: int) -> np.ndarray:
    """View ``img`` as ``(rows, cols, block*block)`` tiles, NaN-padded.

    Partial tiles on the right and bottom edges keep only the pixels they
    contain, so the grid is ``ceil(shape / block)``.
    """
    h, w = img.shape
    rows = -(-h // block)
    cols = -(-w // block)
    padded = np.full((rows * block, cols * block), np.nan)
    padded[:h, :w] = img
    tiles = padded.reshape(rows, block, cols, block).transpose(0, 2, 1, 3)
    return tiles.reshape(rows, cols, block * block)


def block_mean(img: np.ndarray, block: int) -> np.ndarray:
    return np.nanmean(block_view(img, block), axis=2)


def block_var(img: np.ndarray, block: int) -> np.ndarray:
    """Population variance per non-overlapping tile."""
    return np.nanvar(block_view(img, block), axis=2)


def upsample_blocks(grid: np.ndarray, block: int, shape) -> np.ndarray:
    """Expand a block grid to pixel resolution, cropping to ``shape``."""
    full = np.repeat(np.repeat(grid, block, axis=0), block, axis=1)
    return full[:shape[0], :shape[1]]


def read_image(path) -> np.ndarray:
    """Decode a PGM, PNG or TIFF file into a gray image in ``[0, 1]``."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I;16L"):
                arr = np.asarray(im, dtype=np.float64) / 65535.0
            elif im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8) / 255.0
            else:
                arr = np.asarray(im.convert("L"), dtype=np.uint8) / 255.0
    except (OSError, SyntaxError) as exc:
        raise InvalidInputError(f"cannot decode image {path}: {exc}") from exc
    return as_gray(arr)


def to_uint8(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype == np.uint8:
        return arr
    if arr.dtype == bool:
        return np.where(arr, 255, 0).astype(np.uint8)
    return np.round(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm(path, img) -> None:
    """Write an 8-bit binary (P5) PGM. Booleans become 0/255."""
    Image.fromarray(to_uint8(img)).save(Path(path), format="PPM")
