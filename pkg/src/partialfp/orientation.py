"""Block orientation field by averaged squared gradients."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .imgcore import block_view, gradients


@dataclass(frozen=True)
class OrientationField:
    """Per-block ridge direction ``theta`` in [0, pi) and its coherence in [0, 1].

    Angles are measured from the +x (column) axis towards +y (rows, downward).
    """

    block_size: int
    theta: np.ndarray
    coherence: np.ndarray

    @property
    def rows(self) -> int:
        return self.theta.shape[0]

    @property
    def cols(self) -> int:
        return self.theta.shape[1]

    def pixel_theta(self, shape) -> np.ndarray:
        """Block angles expanded to pixel resolution."""
        b = self.block_size
        full = np.repeat(np.repeat(self.theta, b, axis=0), b, axis=1)
        return full[:shape[0], :shape[1]]


def estimate_orientation(img, block_size: int = 16) -> OrientationField:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < block_size or img.shape[1] < block_size:
        raise InvalidInputError(
            f"orientation needs at least one {block_size}x{block_size} block, got {img.shape}"
        )
    fx, fy = gradients(img)
    gxx = np.nansum(block_view(fx * fx, block_size), axis=2)
    gyy = np.nansum(block_view(fy * fy, block_size), axis=2)
    gxy = np.nansum(block_view(fx * fy, block_size), axis=2)

    num = 2.0 * gxy
    den = gxx - gyy
    energy = gxx + gyy
    flat = energy <= 0.0

    # gradient direction doubled, then rotated a quarter turn onto the ridge
    theta = 0.5 * np.arctan2(num, den) + 0.5 * np.pi
    theta = np.mod(theta, np.pi)
    theta[theta >= np.pi] -= np.pi
    coherence = np.hypot(num, den) / np.where(flat, 1.0, energy)
    theta[flat] = 0.0
    coherence[flat] = 0.0
    return OrientationField(block_size, theta, np.clip(coherence, 0.0, 1.0))


def angle_difference(a, b):
    """Circular distance between orientations modulo pi, in [0, pi/2]."""
    d = np.mod(np.asarray(a) - np.asarray(b), np.pi)
    return np.minimum(d, np.pi - d)
