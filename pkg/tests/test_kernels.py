"""Both kernel backends must implement identical contracts."""

import os
import subprocess
import sys

import numpy as np
import pytest

import spraakprep.kernels as kernels
from spraakprep import _kernels_py

compiled = pytest.importorskip(
    "spraakprep._kernels", reason="compiled kernel extension not built"
)

BACKENDS = [compiled, _kernels_py]


def _random_pair(rng, n):
    return rng.uniform(-0.9, 0.9, n), rng.uniform(-0.9, 0.9, n)


def test_rms_power_agreement(rng):
    for n in (1, 7, 1000, 48000):
        x = rng.uniform(-1, 1, n)
        a = compiled.rms_power(x)
        b = _kernels_py.rms_power(x)
        assert a == pytest.approx(b, rel=1e-12)


def test_cyclic_take_agreement(rng):
    src = rng.uniform(-1, 1, 137)
    for n, offset in [(10, 0), (137, 0), (500, 42), (5, 136), (1000, 1)]:
        a = compiled.cyclic_take(src, n, offset)
        b = _kernels_py.cyclic_take(src, n, offset)
        assert np.array_equal(a, b)
        assert len(a) == n


def test_cyclic_take_is_crop_when_in_range(rng):
    src = rng.uniform(-1, 1, 100)
    out = compiled.cyclic_take(src, 30, 50)
    assert np.array_equal(out, src[50:80])


def test_scale_add_peak_agreement(rng):
    for n in (3, 1600, 50000):
        sig, noise = _random_pair(rng, n)
        for gain in (0.0, 0.2, 1.0, 3.7):
            out_c, scale_c = compiled.scale_add_peak(sig, noise, gain)
            out_p, scale_p = _kernels_py.scale_add_peak(sig, noise, gain)
            assert scale_c == pytest.approx(scale_p, rel=1e-15)
            np.testing.assert_allclose(out_c, out_p, rtol=1e-15, atol=0)


def test_scale_add_peak_limits(rng):
    sig = np.full(100, 0.9)
    noise = np.full(100, 0.9)
    for backend in BACKENDS:
        out, scale = backend.scale_add_peak(sig, noise, 1.0)
        assert scale == pytest.approx(1.0 / 1.8)
        assert np.max(np.abs(out)) <= 1.0 + 1e-12


def test_levenshtein_agreement(rng):
    for _ in range(300):
        nr = int(rng.integers(0, 12))
        nh = int(rng.integers(0, 12))
        ref = rng.integers(0, 5, nr).astype(np.int32)
        hyp = rng.integers(0, 5, nh).astype(np.int32)
        assert compiled.levenshtein_counts(ref, hyp) == _kernels_py.levenshtein_counts(ref, hyp)


def test_levenshtein_empty_cases():
    empty = np.zeros(0, dtype=np.int32)
    three = np.array([1, 2, 3], dtype=np.int32)
    for backend in BACKENDS:
        assert backend.levenshtein_counts(three, empty) == (0, 3, 0)
        assert backend.levenshtein_counts(empty, three) == (0, 0, 3)
        assert backend.levenshtein_counts(empty, empty) == (0, 0, 0)


def test_env_var_forces_python_backend():
    env = dict(os.environ, SPRAAKPREP_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import spraakprep.kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_selected_backend_is_compiled_here():
    # The suite runs against the extension unless the env var says otherwise.
    if os.environ.get("SPRAAKPREP_PURE_PYTHON") == "1":
        assert kernels.BACKEND == "python"
    else:
        assert kernels.BACKEND == "cython"
