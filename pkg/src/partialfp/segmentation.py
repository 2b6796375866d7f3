"""Block-variance foreground segmentation."""

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError, NoForegroundError
from .imgcore import block_var, upsample_blocks

BLOCK_SIZE = 16
CLOSING_ITERATIONS = 2
# gray levels live in [0, 1]; anything below this is float rounding, not texture
FLAT_VARIANCE = 1e-20


def otsu_threshold(values) -> float:
    """Otsu threshold over the exact empirical distribution of ``values``.

    Every split between consecutive distinct sorted values is scored by the
    between-class variance; the lowest threshold wins ties. The returned value
    is the largest member of the lower class, so ``values > t`` selects the
    upper class. A single distinct value yields that value.
    """
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = v.size
    if n == 0:
        raise InvalidInputError("otsu threshold of an empty set")
    csum = np.cumsum(v)
    total = csum[-1]
    k = np.arange(1, n)  # size of the lower class
    valid = v[k - 1] < v[k]
    if not np.any(valid):
        return float(v[0])
    w0 = k / n
    w1 = 1.0 - w0
    m0 = csum[k - 1] / k
    m1 = (total - csum[k - 1]) / (n - k)
    score = np.where(valid, w0 * w1 * (m0 - m1) ** 2, -np.inf)
    best = int(np.argmax(score))
    return float(v[best])


def foreground_blocks(variances: np.ndarray) -> np.ndarray:
    """Boolean block map of blocks whose variance marks them as foreground.

    The cut is the Otsu threshold, lowered to half the upper-class mean when
    that is smaller so a unimodal high-variance image stays all foreground.
    """
    vmax = variances.max()
    if not vmax > FLAT_VARIANCE:
        return np.zeros(variances.shape, dtype=bool)
    # rounding noise in the variance of flat blocks
    v = np.where(variances <= vmax * 1e-12, 0.0, variances)
    t = otsu_threshold(v)
    upper = v[v > t]
    if upper.size == 0:
        # one distinct level, and it is positive
        return v > 0
    return v > min(t, 0.5 * upper.mean())


def clean_block_map(blocks: np.ndarray) -> np.ndarray:
    """Close, keep the largest 4-connected component and fill its holes."""
    pad = CLOSING_ITERATIONS
    padded = np.pad(blocks, pad, mode="edge")
    closed = ndimage.binary_closing(
        padded, structure=np.ones((3, 3), bool), iterations=CLOSING_ITERATIONS
    )[pad:-pad, pad:-pad]
    labels, count = ndimage.label(closed)
    if count == 0:
        return closed
    sizes = ndimage.sum_labels(closed, labels, index=np.arange(1, count + 1))
    keep = labels == (int(np.argmax(sizes)) + 1)
    return ndimage.binary_fill_holes(keep)


def segment(img, block_size: int = BLOCK_SIZE) -> np.ndarray:
    """Foreground mask of a fingerprint image at pixel resolution.

    Parameters
    ----------
    img : 2-D gray image in [0, 1].
    block_size : side of the non-overlapping variance blocks.

    Returns
    -------
    Boolean array shaped like ``img``; True marks foreground.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < block_size or img.shape[1] < block_size:
        raise InvalidInputError(
            f"segmentation needs at least one {block_size}x{block_size} block, got {img.shape}"
        )
    blocks = foreground_blocks(block_var(img, block_size))
    if not blocks.any():
        raise NoForegroundError("no block passes the variance threshold")
    blocks = clean_block_map(blocks)
    return upsample_blocks(blocks, block_size, img.shape)
