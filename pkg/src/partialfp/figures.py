"""Intermediate-image dumps and matplotlib figures for detection and evaluation."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .imgcore import normalize_minmax, upsample_blocks, write_pgm  # noqa: E402

DPI = 100


def orientation_segments(field, min_coherence: float = 0.0):
    """One line segment per block, centred on the block, along the ridge angle."""
    b = field.block_size
    half = 0.4 * b
    segs = []
    for r in range(field.rows):
        for c in range(field.cols):
            if field.coherence[r, c] <= min_coherence:
                continue
            cx, cy = c * b + b / 2.0, r * b + b / 2.0
            dx, dy = half * np.cos(field.theta[r, c]), half * np.sin(field.theta[r, c])
            segs.append([(cx - dx, cy - dy), (cx + dx, cy + dy)])
    return segs


def _image_axes(img, figsize=None):
    h, w = img.shape
    fig = plt.figure(figsize=figsize or (w / DPI, h / DPI), dpi=DPI)
    ax = fig.add_axes([0, 0, 1, 1])
    ax.imshow(img, cmap="gray", vmin=0, vmax=1, interpolation="nearest")
    ax.set_xlim(-0.5, w - 0.5)
    ax.set_ylim(h - 0.5, -0.5)
    ax.axis("off")
    return fig, ax


def save_orientation_overlay(img, field, path) -> None:
    fig, ax = _image_axes(img)
    ax.add_collection(LineCollection(orientation_segments(field), colors="red", linewidths=1.0))
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def _mark_core(ax, res):
    core = res.core
    if core is None:
        return
    color = "lime" if core.found else "orange"
    ax.plot([core.x], [core.y], marker="+", markersize=14, mew=2, color=color)
    if core.found and res.mask is not None:
        c = res.result.counts
        ax.plot([core.x - c.left + 1, core.x + c.right - 1], [core.y, core.y], color="cyan", lw=1)
        ax.plot([core.x, core.x], [core.y - c.up + 1, core.y + c.down - 1], color="cyan", lw=1)


def save_core_overlay(img, res, path) -> None:
    fig, ax = _image_axes(img)
    if res.mask is not None:
        ax.contour(res.mask.astype(float), levels=[0.5], colors="yellow", linewidths=0.8)
    _mark_core(ax, res)
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_stage_panel(img, res, path, title=None) -> None:
    """Grid of the main stages, original through core overlay."""
    panels = [("original", img)]
    if res.enhanced is not None:
        panels += [
            ("Gabor filtered", res.enhanced),
            ("gradient x", normalize_minmax(res.grad.fx)),
            ("gradient y", normalize_minmax(res.grad.fy)),
            ("binary", res.binary.astype(float)),
            ("orientation field", res.binary.astype(float)),
            ("|R|", normalize_minmax(np.abs(res.response))),
            ("variance", variance_raster(res, img.shape)),
            ("core", img),
            ("segmentation mask", res.mask.astype(float)),
        ]
    ncols = 5 if len(panels) > 5 else len(panels)
    nrows = -(-len(panels) // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(2.4 * ncols, 2.6 * nrows), squeeze=False)
    for ax in axes.ravel():
        ax.axis("off")
    for ax, (name, raster) in zip(axes.ravel(), panels):
        ax.imshow(raster, cmap="gray", vmin=0, vmax=1, interpolation="nearest")
        ax.set_title(name, fontsize=9)
        if name == "orientation field":
            ax.add_collection(LineCollection(orientation_segments(res.fine_field),
                                             colors="red", linewidths=0.5))
        elif name == "core":
            _mark_core(ax, res)
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def variance_raster(res, shape) -> np.ndarray:
    return upsample_blocks(res.variance.values, res.variance.block_size, shape)


def write_dumps(img, res, out_dir) -> list:
    """Write every intermediate of ``res`` into ``out_dir``; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rasters = {"original.pgm": img}
    if res.mask is not None:
        rasters["segmented.pgm"] = res.mask
    if res.enhanced is not None:
        rasters.update({
            "stretched.pgm": res.stretched,
            "gabor.pgm": res.enhanced,
            "gradient_x.pgm": normalize_minmax(res.grad.fx),
            "gradient_y.pgm": normalize_minmax(res.grad.fy),
            "binary.pgm": res.binary,
            "response.pgm": normalize_minmax(np.abs(res.response)),
            "response_delta.pgm": normalize_minmax(np.abs(res.delta_response)),
            "variance.pgm": variance_raster(res, img.shape),
        })
    written = []
    for name, raster in rasters.items():
        write_pgm(out / name, raster)
        written.append(out / name)
    if res.enhanced is not None:
        save_orientation_overlay(img, res.fine_field, out / "orientation.png")
        save_core_overlay(img, res, out / "core.png")
        save_stage_panel(img, res, out / "stages.png")
        written += [out / "orientation.png", out / "core.png", out / "stages.png"]
    return written


def save_confusion_matrix(cm, path, title="Partial detection") -> None:
    cells = np.array([[cm.tp, cm.fn], [cm.fp, cm.tn]])
    names = np.array([["TP", "FN"], ["FP", "TN"]])
    fig, ax = plt.subplots(figsize=(4.2, 3.6))
    ax.imshow(cells, cmap="Blues")
    for i in range(2):
        for j in range(2):
            ax.text(j, i, f"{names[i, j]} = {cells[i, j]}", ha="center", va="center",
                    color="white" if cells[i, j] > cells.max() / 2 else "black")
    ax.set_xticks([0, 1], ["predicted partial", "predicted non-partial"])
    ax.set_yticks([0, 1], ["true partial", "true non-partial"], rotation=90, va="center")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_sweep(sweep, path) -> None:
    """Sensitivity, specificity and accuracy against the partiality threshold."""
    ts = [row["threshold"] for row in sweep]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for key in ("sensitivity", "specificity", "accuracy"):
        vals = [row["metrics"][key] for row in sweep]
        vals = [np.nan if v == "undefined" else v for v in vals]
        ax.plot(ts, vals, marker="o", ms=3, label=key)
    ax.set_xlabel("threshold T")
    ax.set_ylabel("rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
