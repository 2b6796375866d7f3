"""Partial fingerprint detection from the core point and the foreground extent around it."""

from .corepoint import CoreDetection, complex_filter_kernel, filter_response, locate_core, variance_image
from .errors import (DegenerateCoreError, EmptyDatasetError, IngestionError, InvalidInputError,
                     NoForegroundError, PartialFPError, UnsupportedOrderError)
from .imgcore import read_image, write_pgm
from .partiality import AxisCounts, PartialityResult, axis_counts, classify
from .pipeline import PipelineConfig, PipelineResult, detect, run_pipeline

__version__ = "0.1.0"
