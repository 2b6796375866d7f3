"""End-to-end detection: configuration and the single-image pipeline."""

import json
from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np
from scipy import ndimage

from . import corepoint
from .corepoint import CoreDetection, VarianceImage
from .enhancement import GaborParams, binarize, gabor_enhance
from .errors import DegenerateCoreError, InvalidInputError, NoForegroundError
from .imgcore import GradientPair, as_gray, contrast_stretch, gradients
from .orientation import OrientationField, estimate_orientation
from .partiality import AxisCounts, PartialityResult, axis_counts, classify, partial_verdict
from .segmentation import segment


@dataclass(frozen=True)
class PipelineConfig:
    window: int = 32
    sigma_filter: float = 8.0
    gabor: GaborParams = field(default_factory=GaborParams)
    seg_block: int = 16
    orient_coarse: int = 16
    orient_fine: int = 8
    threshold: float = 0.6
    min_response: float = 4.0
    field_mode: str = "tensor-squared"
    # core candidates must sit this many pixels inside the mask; None = window // 2
    search_margin: Optional[int] = None

    def __post_init__(self):
        for name in ("window", "seg_block", "orient_coarse", "orient_fine"):
            if int(getattr(self, name)) <= 0:
                raise InvalidInputError(f"{name} must be positive")
        if self.window // 4 < 1:
            raise InvalidInputError("window must be at least 4")
        if not self.sigma_filter > 0:
            raise InvalidInputError("sigmaFilter must be positive")
        if not 0.0 < self.threshold <= 1.0:
            raise InvalidInputError(f"threshold T must be in (0, 1], got {self.threshold}")
        if not self.min_response > 0:
            raise InvalidInputError("minResponse must be positive")
        if self.field_mode not in corepoint.FIELD_MODES:
            raise InvalidInputError(f"fieldMode must be one of {corepoint.FIELD_MODES}")
        if self.search_margin is not None and self.search_margin < 0:
            raise InvalidInputError("searchMargin must be non-negative")

    @property
    def kernel_size(self) -> int:
        """Odd tap count covering the window: 32 becomes 33."""
        return self.window + 1 if self.window % 2 == 0 else self.window

    @property
    def margin(self) -> int:
        return self.window // 2 if self.search_margin is None else self.search_margin

    def to_dict(self) -> dict:
        return {
            "W": self.window,
            "sigmaFilter": self.sigma_filter,
            "gabor": {
                "frequency": self.gabor.frequency,
                "sigmaX": self.gabor.sigma_x,
                "sigmaY": self.gabor.sigma_y,
                "kernelSize": self.gabor.kernel_size,
            },
            "segBlock": self.seg_block,
            "orientBlocks": {"coarse": self.orient_coarse, "fine": self.orient_fine},
            "T": self.threshold,
            "minResponse": self.min_response,
            "fieldMode": self.field_mode,
            "searchMargin": self.search_margin,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        top = {"W", "sigmaFilter", "gabor", "segBlock", "orientBlocks", "T",
               "minResponse", "fieldMode", "searchMargin"}
        _reject_unknown(data, top, "config")
        kw = {}
        simple = {"W": "window", "sigmaFilter": "sigma_filter", "segBlock": "seg_block",
                  "T": "threshold", "minResponse": "min_response", "fieldMode": "field_mode",
                  "searchMargin": "search_margin"}
        for key, attr in simple.items():
            if key in data:
                kw[attr] = data[key]
        if "gabor" in data:
            g = data["gabor"]
            gmap = {"frequency": "frequency", "sigmaX": "sigma_x", "sigmaY": "sigma_y",
                    "kernelSize": "kernel_size"}
            _reject_unknown(g, set(gmap), "gabor")
            kw["gabor"] = GaborParams(**{gmap[k]: v for k, v in g.items()})
        if "orientBlocks" in data:
            ob = data["orientBlocks"]
            _reject_unknown(ob, {"coarse", "fine"}, "orientBlocks")
            if "coarse" in ob:
                kw["orient_coarse"] = ob["coarse"]
            if "fine" in ob:
                kw["orient_fine"] = ob["fine"]
        return cls(**kw)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
        return cls.from_dict(data)

    def with_threshold(self, threshold: float) -> "PipelineConfig":
        return replace(self, threshold=threshold)


def _reject_unknown(data, allowed, where):
    if not isinstance(data, dict):
        raise InvalidInputError(f"{where} must be a JSON object")
    unknown = set(data) - set(allowed)
    if unknown:
        raise InvalidInputError(f"unknown {where} keys: {sorted(unknown)}")


@dataclass
class PipelineResult:
    """Verdict plus every intermediate raster, for dumps and figures."""

    result: PartialityResult
    core: Optional[CoreDetection]
    mask: Optional[np.ndarray] = None
    stretched: Optional[np.ndarray] = None
    coarse_field: Optional[OrientationField] = None
    enhanced: Optional[np.ndarray] = None
    binary: Optional[np.ndarray] = None
    fine_field: Optional[OrientationField] = None
    grad: Optional[GradientPair] = None
    response: Optional[np.ndarray] = None
    delta_response: Optional[np.ndarray] = None
    variance: Optional[VarianceImage] = None

    @property
    def diagnostic(self) -> Optional[str]:
        return self.result.diagnostic

    def to_record(self, file: Optional[str] = None) -> dict:
        core = self.core
        rec = {
            "file": file,
            "core": {
                "x": core.x if core else None,
                "y": core.y if core else None,
                "found": bool(core.found) if core else False,
            },
        }
        rec.update(self.result.to_dict())
        return rec


def search_region(mask: np.ndarray, margin: int) -> np.ndarray:
    """Foreground pixels at least ``margin`` pixels from any background pixel."""
    if margin <= 0:
        return mask
    return ndimage.distance_transform_edt(mask) > margin


def run_pipeline(img, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    img = as_gray(img)
    zero = AxisCounts(0, 0, 0, 0)
    try:
        mask = segment(img, config.seg_block)
    except NoForegroundError:
        return PipelineResult(partial_verdict(zero, config.threshold, "no-foreground"), None)

    out = PipelineResult(result=None, core=None, mask=mask)
    out.stretched = contrast_stretch(img)
    out.coarse_field = estimate_orientation(out.stretched, config.orient_coarse)
    out.enhanced = gabor_enhance(out.stretched, out.coarse_field, config.gabor)
    out.binary = binarize(out.enhanced)
    binary = out.binary.astype(np.float64)
    out.fine_field = estimate_orientation(binary, config.orient_fine)

    out.grad = gradients(binary)
    tensor = corepoint.tensor_field(out.grad)
    core_kernel = corepoint.complex_filter_kernel(1, config.sigma_filter, config.kernel_size)
    delta_kernel = corepoint.complex_filter_kernel(-1, config.sigma_filter, config.kernel_size)
    out.response = corepoint.filter_response(tensor, core_kernel, mode=config.field_mode)
    out.delta_response = corepoint.filter_response(tensor, delta_kernel, mode=config.field_mode)
    out.variance = corepoint.variance_image(out.response, config.window)
    delta_var = corepoint.variance_image(out.delta_response, config.window)

    region = search_region(mask, config.margin)
    try:
        core = corepoint.locate_core(out.variance, mask, config.min_response, region)
        delta = corepoint.locate_core(delta_var, mask, config.min_response, region)
    except NoForegroundError:
        out.result = partial_verdict(zero, config.threshold, "no-foreground")
        return out
    out.core = replace(core, secondary=delta)

    if not core.found:
        out.result = partial_verdict(zero, config.threshold, "no-core")
        return out
    counts = axis_counts(mask, (core.x, core.y))
    try:
        out.result = classify(counts, config.threshold)
    except DegenerateCoreError:
        out.result = partial_verdict(counts, config.threshold, "degenerate-core")
    return out


def detect(img, config: PipelineConfig = PipelineConfig()) -> PartialityResult:
    return run_pipeline(img, config).result
