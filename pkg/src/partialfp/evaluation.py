"""Batch evaluation against labelled images: confusion matrix and rates.

The positive class is *partial*: a true positive is a partial capture that the
pipeline also calls partial.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import EmptyDatasetError, IngestionError, InvalidInputError
from .imgcore import read_image
from .partiality import AxisCounts, classify
from .pipeline import PipelineConfig, run_pipeline

UNDEFINED = "undefined"


@dataclass(frozen=True)
class LabeledSample:
    image_path: Path
    is_partial: bool
    name: str = ""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def add(self, truth: bool, predicted: bool) -> "ConfusionMatrix":
        if truth and predicted:
            return ConfusionMatrix(self.tp + 1, self.fp, self.tn, self.fn)
        if truth:
            return ConfusionMatrix(self.tp, self.fp, self.tn, self.fn + 1)
        if predicted:
            return ConfusionMatrix(self.tp, self.fp + 1, self.tn, self.fn)
        return ConfusionMatrix(self.tp, self.fp, self.tn + 1, self.fn)

    def swapped(self) -> "ConfusionMatrix":
        """The same matrix with the positive and negative classes exchanged."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}

    @classmethod
    def from_pairs(cls, truths, predictions) -> "ConfusionMatrix":
        cm = cls()
        for t, p in zip(truths, predictions):
            cm = cm.add(bool(t), bool(p))
        return cm


@dataclass(frozen=True)
class Metrics:
    """Rates in [0, 1]; None where the denominator is zero."""

    sensitivity: Optional[float]
    specificity: Optional[float]
    accuracy: Optional[float]

    def to_dict(self) -> dict:
        return {k: (UNDEFINED if v is None else v) for k, v in
                (("sensitivity", self.sensitivity), ("specificity", self.specificity),
                 ("accuracy", self.accuracy))}


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Sensitivity TP/(TP+FN), specificity TN/(TN+FP), accuracy over all samples."""
    if cm.total <= 0:
        raise EmptyDatasetError("confusion matrix is empty")
    return Metrics(
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
    )


def load_labels(csv_path, image_root) -> List[LabeledSample]:
    """Read ``filename,partial`` rows; a leading ``filename,partial`` header is skipped.

    Every problem (bad row, missing or undecodable image) is collected and
    raised together in one :class:`IngestionError`.
    """
    csv_path = Path(csv_path)
    root = Path(image_root)
    if not csv_path.is_file():
        raise IngestionError([f"labels file not found: {csv_path}"])
    samples, problems = [], []
    with csv_path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row]
            if lineno == 1 and cells[0].lower() == "filename":
                continue
            if len(cells) != 2 or cells[1] not in ("0", "1") or not cells[0]:
                problems.append(f"row {lineno}: expected 'filename,0|1', got {','.join(row)!r}")
                continue
            path = root / cells[0]
            if not path.is_file():
                problems.append(f"row {lineno}: image not found: {path}")
                continue
            try:
                read_image(path)
            except InvalidInputError as exc:
                problems.append(f"row {lineno}: {exc}")
                continue
            samples.append(LabeledSample(path, cells[1] == "1", cells[0]))
    if problems:
        raise IngestionError(problems)
    return samples


def _run_one(args):
    sample, config = args
    name = sample.name or sample.image_path.name
    try:
        res = run_pipeline(read_image(sample.image_path), config)
        rec = res.to_record(name)
    except Exception as exc:  # a failed sample must not abort the batch
        rec = {
            "file": name,
            "core": {"x": None, "y": None, "found": False},
            "counts": {"left": 0, "right": 0, "up": 0, "down": 0},
            "normalized": {"left": 0.0, "right": 0.0, "up": 0.0, "down": 0.0},
            "minRatio": 0.0,
            "threshold": config.threshold,
            "partial": True,
            "diagnostic": f"error: {type(exc).__name__}: {exc}",
        }
    rec["label"] = bool(sample.is_partial)
    return rec


def evaluate(samples, config: PipelineConfig = PipelineConfig(), jobs: int = 1):
    """Run the pipeline over ``samples``.

    Returns the confusion matrix and one record per sample, in input order.
    """
    samples = list(samples)
    if not samples:
        raise EmptyDatasetError("no samples to evaluate")
    work = [(s, config) for s in samples]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_one, work, chunksize=4))
    else:
        records = [_run_one(w) for w in work]
    cm = ConfusionMatrix.from_pairs([r["label"] for r in records],
                                    [r["partial"] for r in records])
    return cm, records


def reclassify(record: dict, threshold: float) -> bool:
    """Verdict of an existing record at another threshold, without rerunning."""
    if record.get("diagnostic"):
        return True
    c = record["counts"]
    counts = AxisCounts(c["left"], c["right"], c["up"], c["down"])
    return classify(counts, threshold).is_partial


def parse_sweep(text: str):
    """``LO:HI:STEP`` to an inclusive, rounded list of thresholds."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise InvalidInputError(f"threshold sweep must be LO:HI:STEP, got {text!r}") from exc
    if step <= 0 or hi < lo:
        raise InvalidInputError(f"invalid threshold sweep {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(n)]


def threshold_sweep(records, thresholds):
    rows = []
    truths = [r["label"] for r in records]
    for t in thresholds:
        cm = ConfusionMatrix.from_pairs(truths, [reclassify(r, t) for r in records])
        rows.append({"threshold": t, "matrix": cm.to_dict(), "metrics": metrics(cm).to_dict()})
    return rows


def build_report(config: PipelineConfig, cm: ConfusionMatrix, records, sweep=None) -> dict:
    report = {
        "config": config.to_dict(),
        "matrix": cm.to_dict(),
        "metrics": metrics(cm).to_dict(),
        "samples": records,
    }
    if sweep is not None:
        report["sweep"] = sweep
    return report


def format_table(name: str, m: Metrics) -> str:
    """Metrics as a fixed-width table with percentages to one decimal."""

    def pct(v):
        return UNDEFINED if v is None else f"{100.0 * v:.1f}%"

    header = f"{'Database':<24}{'Sensitivity':>14}{'Specificity':>14}{'Accuracy':>14}"
    row = f"{name:<24}{pct(m.sensitivity):>14}{pct(m.specificity):>14}{pct(m.accuracy):>14}"
    return header + "\n" + row


CSV_FIELDS = ["file", "label", "partial", "core_x", "core_y", "core_found",
              "left", "right", "up", "down", "minRatio", "diagnostic"]


def write_records_csv(path, records) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in records:
            c = r["counts"]
            writer.writerow([
                r["file"], int(r["label"]), int(r["partial"]),
                r["core"]["x"], r["core"]["y"], int(r["core"]["found"]),
                c["left"], c["right"], c["up"], c["down"],
                repr(float(r["minRatio"])), r["diagnostic"] or "",
            ])
