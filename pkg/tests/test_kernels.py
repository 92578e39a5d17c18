"""Hot-loop kernels: the compiled and pure-Python backends must agree."""

import math
import random

import numpy as np
import pytest

from twintbank import _pykernels, kernels


def _random_ratfunc(rng):
    num = tuple(rng.uniform(-3, 3) for _ in range(rng.randint(1, 4)))
    den = tuple(rng.uniform(0.5, 3) for _ in range(rng.randint(1, 4)))
    return num, den


def test_eval_rational_matches_plain_numpy():
    rng = random.Random(12)
    for _ in range(50):
        num, den = _random_ratfunc(rng)
        w = np.geomspace(0.1, 1e5, 64)
        s = 1j * w
        expected = (np.polyval(num[::-1], s)) / (np.polyval(den[::-1], s))
        got = kernels.eval_rational(num, den, w)
        assert np.allclose(got, expected, rtol=1e-12, atol=1e-300)


def test_abs2_at_is_squared_magnitude():
    rng = random.Random(13)
    for _ in range(100):
        num, den = _random_ratfunc(rng)
        w = rng.uniform(0.01, 1e4)
        h = kernels.eval_rational(num, den, np.array([w]))[0]
        assert kernels.abs2_at(num, den, w) == pytest.approx(abs(h) ** 2,
                                                             rel=1e-12)


def test_scan_max_abs2_picks_the_argmax():
    num, den = (0.0, 1.0), (1.0, 0.02, 1e-4)  # resonant at w = 100
    w = np.geomspace(1.0, 1e4, 301)
    idx = kernels.scan_max_abs2(num, den, w)
    mags = np.abs(kernels.eval_rational(num, den, w)) ** 2
    assert idx == int(np.argmax(mags))


def test_golden_max_refines_a_known_resonance():
    """Second-order resonator: |H| peaks exactly at f_n = omega_n / 2pi.

    golden_max works in Hz (it applies the 2*pi internally), so the
    bracket is given in Hz too.
    """
    wn, q = 320.0, 8.0
    fn = wn / (2.0 * math.pi)
    num, den = (0.0, 1.0), (1.0, 1.0 / (wn * q), 1.0 / (wn * wn))
    f = kernels.golden_max(num, den, fn / 2, fn * 2, 1e-12)
    assert f == pytest.approx(fn, rel=1e-9)


def test_golden_max_handles_flat_function():
    # A constant has no interior structure; any point in range is fine.
    w = kernels.golden_max((1.0,), (1.0,), 10.0, 20.0, 1e-9)
    assert 10.0 <= w <= 20.0


def test_backends_agree_bit_for_bit_on_random_inputs():
    """The two implementations mirror each other operation for operation,
    so their float results should be identical, not merely close."""
    if not kernels.COMPILED:
        pytest.skip("compiled backend not active; nothing to compare")
    rng = random.Random(99)
    for _ in range(200):
        num, den = _random_ratfunc(rng)
        w = rng.uniform(1e-2, 1e5)
        a = kernels.abs2_at(num, den, w)
        b = _pykernels.abs2_at(num, den, w)
        assert a == b, f"abs2 mismatch at w={w}: {a!r} vs {b!r}"


def test_backends_agree_on_vector_eval():
    if not kernels.COMPILED:
        pytest.skip("compiled backend not active; nothing to compare")
    rng = random.Random(101)
    grid = np.geomspace(0.5, 2e4, 257)
    for _ in range(25):
        num, den = _random_ratfunc(rng)
        a = kernels.eval_rational(num, den, grid)
        b = _pykernels.eval_rational(num, den, grid)
        assert np.array_equal(a, b)


def test_backends_agree_on_scan_and_golden():
    if not kernels.COMPILED:
        pytest.skip("compiled backend not active; nothing to compare")
    rng = random.Random(103)
    grid = np.geomspace(1.0, 1e4, 128)
    for _ in range(50):
        wn = rng.uniform(10.0, 5e3)
        q = rng.uniform(0.7, 20.0)
        num, den = (0.0, 1.0), (1.0, 1.0 / (wn * q), 1.0 / (wn * wn))
        assert (kernels.scan_max_abs2(num, den, grid)
                == _pykernels.scan_max_abs2(num, den, grid))
        fn = wn / (2.0 * math.pi)
        ga = kernels.golden_max(num, den, fn / 3, fn * 3, 1e-6)
        gb = _pykernels.golden_max(num, den, fn / 3, fn * 3, 1e-6)
        assert ga == gb


def test_env_var_forces_python_backend():
    import subprocess
    import sys
    code = ("import twintbank.kernels as k; "
            "print(k.backend_name(), k.COMPILED)")
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"TWINTBANK_PURE_PYTHON": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "False"]
