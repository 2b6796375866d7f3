import numpy as np
import pytest

from partialfp import synth
from partialfp.errors import InvalidInputError
from partialfp.pipeline import run_pipeline


def test_deterministic():
    spec = synth.random_spec(11, "loop", noise_sigma=0.1)
    a, ca = synth.generate(spec)
    b, cb = synth.generate(spec)
    assert np.array_equal(a, b) and ca == cb


def test_different_seeds_differ():
    a, _ = synth.generate(synth.SynthSpec(seed=1))
    b, _ = synth.generate(synth.SynthSpec(seed=2))
    assert not np.array_equal(a, b)


def test_whorl_core_extremum_and_ring_spacing():
    spec = synth.SynthSpec(core=(150, 170), noise_sigma=0.0, ridge_period=8.0)
    img, (cx, cy) = synth.generate(spec)
    assert img[cy, cx] == 1.0
    assert img[cy, cx] >= img[cy - 1:cy + 2, cx - 1:cx + 2].max()
    # maxima every period along the +x ray
    ray = img[cy, cx:cx + 80]
    peaks = [i for i in range(1, ray.size - 1) if ray[i] >= ray[i - 1] and ray[i] > ray[i + 1]]
    assert np.all(np.diff(peaks) == 8)


def test_plain_arch_has_no_core():
    _, core = synth.generate(synth.SynthSpec(pattern="plain-arch", core=None))
    assert core is None


def test_background_is_flat():
    spec = synth.SynthSpec(noise_sigma=0.0)
    img, _ = synth.generate(spec)
    assert np.all(img[~synth.foreground_disk(spec)] == 0.5)


@pytest.mark.parametrize("seed", range(30))
def test_core_inside_disk(seed):
    spec = synth.random_spec(seed, "whorl" if seed % 2 else "loop")
    fg = synth.foreground_disk(spec)
    assert fg[spec.core[1], spec.core[0]]


@pytest.mark.parametrize("kw", [
    {"pattern": "spiral"},
    {"ridge_period": 3},
    {"noise_sigma": 0.5},
    {"core": (5, 5)},
    {"pattern": "whorl", "core": None},
    {"crop": "quarter"},
])
def test_invalid_specs(kw):
    with pytest.raises(InvalidInputError):
        synth.SynthSpec(**kw)


def test_spec_dict_round_trip():
    spec = synth.random_spec(5, "loop", crop="half")
    assert synth.SynthSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(InvalidInputError):
        synth.SynthSpec.from_dict({"colour": 1})


def test_crop_removes_lower_part():
    spec = synth.SynthSpec(crop="half", noise_sigma=0.0, core=(160, 150))
    img, _ = synth.generate(spec)
    assert np.all(img[150 + spec.crop_margin + 1:] == 0.5)


def test_plain_arch_rarely_detected():
    found = 0
    for seed in range(50):
        img, _ = synth.generate(synth.random_spec(seed, "plain-arch", noise_sigma=0.02))
        found += run_pipeline(img).core.found
    assert found <= 5
