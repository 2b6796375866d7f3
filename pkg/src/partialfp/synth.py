"""Synthetic ridge patterns with a known core, used as a test oracle."""

from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidInputError

PATTERNS = ("whorl", "loop", "plain-arch")
CROPS = ("none", "half")
BACKGROUND = 0.5


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic print.

    The foreground is a disk of ``foreground_radius`` centred in the image.
    ``core`` is ``(x, y)`` and required for whorl and loop patterns. With
    ``crop="half"`` every foreground pixel more than ``crop_margin`` rows below
    the core (below the disk centre for arches) is replaced by background.
    """

    width: int = 320
    height: int = 320
    pattern: str = "whorl"
    core: Optional[Tuple[int, int]] = (160, 160)
    ridge_period: float = 9.0
    noise_sigma: float = 0.02
    foreground_radius: float = 130.0
    seed: int = 0
    crop: str = "none"
    crop_margin: int = 18

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise InvalidInputError(f"unknown pattern {self.pattern!r}; expected one of {PATTERNS}")
        if self.crop not in CROPS:
            raise InvalidInputError(f"unknown crop {self.crop!r}; expected one of {CROPS}")
        if self.width < 16 or self.height < 16:
            raise InvalidInputError("synthetic images must be at least 16x16")
        if self.ridge_period < 4:
            raise InvalidInputError("ridge period must be at least 4 pixels")
        if not 0 <= self.noise_sigma < 0.5:
            raise InvalidInputError("noise sigma must lie in [0, 0.5)")
        if self.foreground_radius <= 0:
            raise InvalidInputError("foreground radius must be positive")
        if self.pattern != "plain-arch":
            if self.core is None:
                raise InvalidInputError(f"{self.pattern} pattern needs a core location")
            cx, cy = self.core
            if np.hypot(cx - self.center[0], cy - self.center[1]) >= self.foreground_radius:
                raise InvalidInputError("core must lie inside the foreground disk")

    @property
    def center(self) -> Tuple[float, float]:
        return ((self.width - 1) / 2.0, (self.height - 1) / 2.0)

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown synth spec keys: {sorted(unknown)}")
        data = dict(data)
        if data.get("core") is not None:
            data["core"] = tuple(int(v) for v in data["core"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidInputError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["core"] is not None:
            d["core"] = list(d["core"])
        return d


def _ridge_phase(spec: SynthSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Scalar field whose level sets are the ridge lines, in pixels."""
    if spec.pattern == "whorl":
        cx, cy = spec.core
        return np.hypot(x - cx, y - cy)
    if spec.pattern == "loop":
        # nested hairpins: half-circle caps above the core, straight legs below
        cx, cy = spec.core
        return np.where(y <= cy, np.hypot(x - cx, y - cy), np.abs(x - cx))
    cx, _ = spec.center
    width = spec.foreground_radius / 2.0
    bump = 3.0 * spec.ridge_period
    return y + bump * np.exp(-((x - cx) / width) ** 2)


def generate(spec: SynthSpec):
    """Render ``spec``.

    Returns
    -------
    image : float64 array in [0, 1], shape ``(height, width)``.
    core : ``(x, y)`` ground truth, or None for arches.
    """
    y, x = np.mgrid[0:spec.height, 0:spec.width].astype(np.float64)
    ridges = 0.5 * (1.0 + np.cos(2.0 * np.pi * _ridge_phase(spec, x, y) / spec.ridge_period))
    img = np.where(foreground_disk(spec), ridges, BACKGROUND)
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        img = img + rng.normal(0.0, spec.noise_sigma, img.shape)
    img = np.clip(img, 0.0, 1.0)
    core = tuple(spec.core) if spec.pattern != "plain-arch" else None
    return img, core


def foreground_disk(spec: SynthSpec) -> np.ndarray:
    """The generator's own foreground region (after cropping), as a mask."""
    y, x = np.mgrid[0:spec.height, 0:spec.width].astype(np.float64)
    cx, cy = spec.center
    inside = np.hypot(x - cx, y - cy) < spec.foreground_radius
    if spec.crop == "half":
        line = spec.core[1] if spec.core is not None else cy
        inside &= y <= line + spec.crop_margin
    return inside


def random_spec(seed: int, pattern: str = "whorl", jitter: int = 24, **overrides) -> SynthSpec:
    """A spec with the core jittered around the image centre, seeded by ``seed``."""
    base = SynthSpec(pattern=pattern, core=None if pattern == "plain-arch" else (160, 160))
    params = {**asdict(base), **overrides, "seed": seed}
    if pattern != "plain-arch":
        rng = np.random.default_rng(seed + 7919)
        cx, cy = (params["width"] - 1) / 2.0, (params["height"] - 1) / 2.0
        dx, dy = rng.integers(-jitter, jitter + 1, size=2)
        params["core"] = (int(round(cx + dx)), int(round(cy + dy)))
    else:
        params["core"] = None
    return SynthSpec(**params)
