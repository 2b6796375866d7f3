from dataclasses import replace

import numpy as np
import pytest

from partialfp import synth


def brute_correlate(img, k):
    """Quadruple-loop correlation with replicated edges; the reference for convolve()."""
    img = np.asarray(img)
    k = np.asarray(k)
    h, w = img.shape
    half = k.shape[0] // 2
    dtype = np.result_type(img.dtype, k.dtype, np.float64)
    out = np.zeros((h, w), dtype=dtype)
    for y in range(h):
        for x in range(w):
            acc = 0
            for dy in range(-half, half + 1):
                for dx in range(-half, half + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    acc += img[yy, xx] * k[dy + half, dx + half]
            out[y, x] = acc
    return out


def cosine_ridges(shape, theta, period=9.0, lo=0.0, hi=1.0, phase=0.0):
    """Parallel ridges running along angle ``theta`` (x right, y down)."""
    h, w = shape
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    across = -x * np.sin(theta) + y * np.cos(theta)
    return lo + (hi - lo) * 0.5 * (1.0 + np.cos(2.0 * np.pi * across / period + phase))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def synth_suite(tmp_path_factory):
    """25 full whorls/loops plus their half-cropped twins, written as PGM with labels."""
    from partialfp.imgcore import write_pgm

    root = tmp_path_factory.mktemp("suite")
    rows = ["filename,partial"]
    for seed in range(25):
        pattern = "whorl" if seed % 2 == 0 else "loop"
        spec = synth.random_spec(1000 + seed, pattern)
        for crop, label in (("none", 0), ("half", 1)):
            img, _ = synth.generate(replace(spec, crop=crop))
            name = f"p{seed:02d}_{crop}.pgm"
            write_pgm(root / name, img)
            rows.append(f"{name},{label}")
    (root / "labels.csv").write_text("\n".join(rows) + "\n")
    return root


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
