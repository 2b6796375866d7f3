"""Orientation-aligned Gabor enhancement and local-mean binarization."""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidInputError
from .imgcore import block_mean, kernel_offsets, normalize_minmax, upsample_blocks
from .orientation import OrientationField

BINARIZE_BLOCK = 16


@dataclass(frozen=True)
class GaborParams:
    frequency: float = 1.0 / 9.0
    sigma_x: float = 4.0
    sigma_y: float = 4.0
    kernel_size: int = 17

    def __post_init__(self):
        if not 0.0 < self.frequency <= 0.5:
            raise InvalidInputError(f"gabor frequency must be in (0, 0.5], got {self.frequency}")
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise InvalidInputError("gabor sigmas must be positive")
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise InvalidInputError(f"gabor kernel size must be odd and >= 3, got {self.kernel_size}")


def gabor_kernel(theta: float, params: GaborParams) -> np.ndarray:
    """Even-symmetric Gabor kernel for ridges running along angle ``theta``.

    The cosine carrier varies across the ridges; ``sigma_x`` spreads along the
    ridge and ``sigma_y`` across it. The kernel mean is subtracted so it has no
    DC response.
    """
    x, y = kernel_offsets(params.kernel_size)
    c, s = np.cos(theta), np.sin(theta)
    along = x * c + y * s
    across = -x * s + y * c
    env = np.exp(-0.5 * (along ** 2 / params.sigma_x ** 2 + across ** 2 / params.sigma_y ** 2))
    k = env * np.cos(2.0 * np.pi * params.frequency * across)
    return k - k.mean()


def gabor_enhance(img, field: OrientationField, params: GaborParams = GaborParams()) -> np.ndarray:
    """Filter each orientation block with the Gabor kernel for its angle.

    Blocks with zero coherence (no gradient energy) are copied through. The
    result is min-max normalized to [0, 1].
    """
    img = np.asarray(img, dtype=np.float64)
    b = field.block_size
    h, w = img.shape
    if field.rows != -(-h // b) or field.cols != -(-w // b):
        raise InvalidInputError(
            f"orientation grid {field.theta.shape} does not cover image {img.shape} at block {b}"
        )
    half = params.kernel_size // 2
    padded = np.pad(img, half, mode="edge")
    out = img.copy()
    for r in range(field.rows):
        y0, y1 = r * b, min((r + 1) * b, h)
        for c in range(field.cols):
            if field.coherence[r, c] == 0.0:
                continue
            x0, x1 = c * b, min((c + 1) * b, w)
            patch = padded[y0:y1 + 2 * half, x0:x1 + 2 * half]
            windows = sliding_window_view(patch, (params.kernel_size, params.kernel_size))
            k = gabor_kernel(field.theta[r, c], params)
            out[y0:y1, x0:x1] = np.einsum("ijkl,kl->ij", windows, k)
    return normalize_minmax(out)


def binarize(img, block_size: int = BINARIZE_BLOCK) -> np.ndarray:
    """Threshold each pixel at its block mean; ``>=`` mean is ridge (True)."""
    img = np.asarray(img, dtype=np.float64)
    if img.size == 0:
        raise InvalidInputError("cannot binarize an empty image")
    means = upsample_blocks(block_mean(img, block_size), block_size, img.shape)
    return img >= means
