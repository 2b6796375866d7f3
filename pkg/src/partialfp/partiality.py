"""Partial-capture verdict from foreground runs along the axes through the core."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateCoreError, InvalidInputError

DEFAULT_THRESHOLD = 0.6


@dataclass(frozen=True)
class AxisCounts:
    left: int
    right: int
    up: int
    down: int

    def as_tuple(self):
        return (self.left, self.right, self.up, self.down)

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "up": self.up, "down": self.down}


@dataclass(frozen=True)
class PartialityResult:
    counts: AxisCounts
    normalized: tuple
    min_ratio: float
    threshold: float
    is_partial: bool
    diagnostic: Optional[str] = None

    def to_dict(self) -> dict:
        left, right, up, down = self.normalized
        return {
            "counts": self.counts.to_dict(),
            "normalized": {"left": left, "right": right, "up": up, "down": down},
            "minRatio": self.min_ratio,
            "threshold": self.threshold,
            "partial": self.is_partial,
            "diagnostic": self.diagnostic,
        }


def _run_length(line: np.ndarray) -> int:
    """Number of leading True values."""
    stops = np.flatnonzero(~line)
    return int(stops[0]) if stops.size else int(line.size)


def axis_counts(mask, core) -> AxisCounts:
    """Count foreground pixels from ``core = (x, y)`` towards -x, +x, -y and +y.

    Each run includes the core pixel and ends at the first background pixel
    or the image border. A background core pixel gives four zeros.
    """
    mask = np.asarray(mask, dtype=bool)
    x, y = int(core[0]), int(core[1])
    h, w = mask.shape
    if not (0 <= x < w and 0 <= y < h):
        raise InvalidInputError(f"core {(x, y)} outside image of size {w}x{h}")
    row = mask[y]
    col = mask[:, x]
    return AxisCounts(
        left=_run_length(row[x::-1]),
        right=_run_length(row[x:]),
        up=_run_length(col[y::-1]),
        down=_run_length(col[y:]),
    )


def classify(counts: AxisCounts, threshold: float = DEFAULT_THRESHOLD) -> PartialityResult:
    """Normalize the counts by their maximum; partial when the minimum ratio <= ``threshold``."""
    values = counts.as_tuple()
    if any(v < 0 for v in values):
        raise InvalidInputError(f"axis counts must be non-negative, got {values}")
    peak = max(values)
    if peak == 0:
        raise DegenerateCoreError("all axis counts are zero")
    normalized = tuple(v / peak for v in values)
    min_ratio = min(normalized)
    return PartialityResult(counts, normalized, min_ratio, float(threshold), min_ratio <= threshold)


def partial_verdict(counts: AxisCounts, threshold: float, diagnostic: str) -> PartialityResult:
    """A partial result without ratios, for a missing or degenerate core."""
    return PartialityResult(counts, (0.0, 0.0, 0.0, 0.0), 0.0, float(threshold), True, diagnostic)
