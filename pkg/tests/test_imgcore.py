import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from partialfp.errors import InvalidInputError
from partialfp.imgcore import (as_gray, contrast_stretch, convolve, gaussian_kernel, gradients,
                               normalize_minmax, read_image, write_pgm)

from conftest import brute_correlate

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_contrast_stretch_examples():
    np.testing.assert_allclose(contrast_stretch(np.array([[0.2, 0.4, 0.6]])), [[0.0, 0.5, 1.0]], atol=1e-15)
    assert np.array_equal(contrast_stretch(np.array([[0.5, 0.5]])), [[0.0, 0.0]])
    assert np.array_equal(contrast_stretch(np.array([[0.25, 0.75]])), [[0.0, 1.0]])


def test_contrast_stretch_empty():
    with pytest.raises(InvalidInputError):
        contrast_stretch(np.zeros((0, 3)))


@given(arrays(np.float64, (6, 7), elements=st.floats(0, 1)))
def test_contrast_stretch_idempotent(img):
    once = contrast_stretch(img)
    assert np.array_equal(contrast_stretch(once), once)


def test_normalize_examples():
    assert np.array_equal(normalize_minmax(np.array([[2.0, 6.0, 10.0]])), [[0.0, 0.5, 1.0]])
    assert np.array_equal(normalize_minmax(np.array([[7.0, 7.0, 7.0]])), [[0.0, 0.0, 0.0]])
    unit = np.array([[0.0, 0.3], [1.0, 0.7]])
    assert np.array_equal(normalize_minmax(unit), unit)


@given(arrays(np.float64, (5, 4), elements=finite))
def test_normalize_bounds(img):
    out = normalize_minmax(img)
    assert out.min() >= 0.0 and out.max() <= 1.0
    if img.max() > img.min():
        assert out.flat[np.argmin(img)] == 0.0
        assert out.flat[np.argmax(img)] == 1.0


def test_gradients_ramp_and_constant():
    w = 12
    ramp = np.tile(np.arange(w) / (w - 1), (9, 1))
    g = gradients(ramp)
    interior = (slice(1, -1), slice(1, -1))
    np.testing.assert_allclose(g.fx[interior], 1.0 / (w - 1), rtol=1e-12)
    np.testing.assert_allclose(g.fy[interior], 0.0, atol=1e-15)
    flat = gradients(np.full((5, 5), 0.3))
    assert np.all(flat.fx == 0) and np.all(flat.fy == 0)


def test_gradients_transpose(rng):
    img = rng.random((11, 8))
    g = gradients(img)
    gt = gradients(img.T)
    np.testing.assert_allclose(gt.fx, g.fy.T, atol=1e-12)
    np.testing.assert_allclose(gt.fy, g.fx.T, atol=1e-12)


def test_gradients_too_small():
    with pytest.raises(InvalidInputError):
        gradients(np.zeros((2, 5)))


def test_gaussian_kernel_taps():
    k = gaussian_kernel(2.5, 11)
    assert k[5, 5] == 1.0
    for sigma in (1.0, 2.0, 3.0):
        kk = gaussian_kernel(sigma, 9)
        assert kk[4, 4 + int(sigma)] == pytest.approx(np.exp(-0.5), abs=1e-15)
    assert np.exp(-0.5) == pytest.approx(0.6065, abs=1e-4)


@pytest.mark.parametrize("sigma,size", [(0.7, 3), (2.0, 7), (8.0, 33)])
def test_gaussian_kernel_dihedral(sigma, size):
    k = gaussian_kernel(sigma, size)
    for sym in (k.T, k[::-1], k[:, ::-1], k[::-1, ::-1], k.T[::-1], k.T[:, ::-1], k.T[::-1, ::-1]):
        assert np.array_equal(sym, k)


@pytest.mark.parametrize("sigma,size", [(0.0, 5), (-1.0, 5), (1.0, 4), (1.0, 1)])
def test_gaussian_kernel_rejects(sigma, size):
    with pytest.raises(InvalidInputError):
        gaussian_kernel(sigma, size)


def test_convolve_delta_identity(rng):
    img = rng.random((9, 6))
    delta = np.zeros((5, 5))
    delta[2, 2] = 1.0
    assert np.array_equal(convolve(img, delta), img)


def test_convolve_constant(rng):
    k = rng.normal(size=(5, 5))
    out = convolve(np.full((6, 7), 0.4), k)
    np.testing.assert_allclose(out, 0.4 * k.sum(), atol=1e-14)


def test_convolve_5x5_3x3_oracle(rng):
    img = rng.random((5, 5))
    k = rng.random((3, 3))
    assert np.max(np.abs(convolve(img, k) - brute_correlate(img, k))) <= 1e-12


@st.composite
def image_and_kernel(draw, complex_img=False, complex_kernel=False):
    h = draw(st.integers(1, 8))
    w = draw(st.integers(1, 8))
    ks = draw(st.sampled_from([1, 3, 5]))
    el = st.floats(-1, 1, allow_nan=False)
    img = draw(arrays(np.float64, (h, w), elements=el))
    k = draw(arrays(np.float64, (ks, ks), elements=el))
    if complex_img:
        img = img + 1j * draw(arrays(np.float64, (h, w), elements=el))
    if complex_kernel:
        k = k + 1j * draw(arrays(np.float64, (ks, ks), elements=el))
    return img, k


@settings(max_examples=60, deadline=None)
@given(st.data(), st.booleans(), st.booleans(), st.sampled_from(["direct", "fft"]))
def test_convolve_matches_oracle(data, ci, ck, method):
    img, k = data.draw(image_and_kernel(ci, ck))
    out = convolve(img, k, method=method)
    assert out.shape == img.shape
    assert np.max(np.abs(out - brute_correlate(img, k))) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**31 - 1))
def test_convolve_linear(a, b, seed):
    r = np.random.default_rng(seed)
    f, g = r.random((16, 16)), r.random((16, 16))
    k = r.normal(size=(5, 5)) + 1j * r.normal(size=(5, 5))
    lhs = convolve(a * f + b * g, k)
    rhs = a * convolve(f, k) + b * convolve(g, k)
    scale = max(np.max(np.abs(rhs)), 1e-300)
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale + 1e-12


def test_convolve_fft_large_kernel(rng):
    img = rng.random((20, 17))
    k = rng.normal(size=(13, 13)) + 1j * rng.normal(size=(13, 13))
    np.testing.assert_allclose(convolve(img, k, method="fft"), convolve(img, k, method="direct"), atol=1e-11)


def test_convolve_rejects_even_kernel():
    with pytest.raises(InvalidInputError):
        convolve(np.zeros((4, 4)), np.zeros((2, 2)))


def test_as_gray():
    assert as_gray(np.array([[0, 255]], dtype=np.uint8)).tolist() == [[0.0, 1.0]]
    with pytest.raises(InvalidInputError):
        as_gray(np.array([[1.5]]))
    with pytest.raises(InvalidInputError):
        as_gray(np.array([[np.nan]]))


def test_pgm_round_trip_bit_exact(tmp_path, rng):
    raw = rng.integers(0, 256, size=(23, 17), dtype=np.uint8)
    path = tmp_path / "a.pgm"
    write_pgm(path, raw)
    assert path.read_bytes().startswith(b"P5")
    back = read_image(path)
    assert np.array_equal(np.round(back * 255).astype(np.uint8), raw)
    write_pgm(tmp_path / "b.pgm", back)
    assert (tmp_path / "b.pgm").read_bytes() == path.read_bytes()


@pytest.mark.parametrize("fmt,ext", [("TIFF", "tif"), ("PNG", "png")])
def test_read_tiff_png(tmp_path, rng, fmt, ext):
    raw = rng.integers(0, 256, size=(10, 12), dtype=np.uint8)
    path = tmp_path / f"1_1.{ext}"
    Image.fromarray(raw).save(path, format=fmt)
    assert np.array_equal(np.round(read_image(path) * 255).astype(np.uint8), raw)


def test_read_garbage(tmp_path):
    bad = tmp_path / "x.pgm"
    bad.write_bytes(b"not an image")
    with pytest.raises(InvalidInputError):
        read_image(bad)
