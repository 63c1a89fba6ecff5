import os
import subprocess
import sys

import numpy as np
import pytest

from cgmalab import _accel, wedges

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not available")


@needs_numba
@pytest.mark.parametrize("closed", [False, True])
def test_contains_points_backends_agree(closed):
    rng = np.random.default_rng(0)
    W = wedges.random_wedge(rng)
    pts = rng.normal(scale=4, size=(5000, 4))
    # include points on the boundary
    pts[:10] = W.xi + np.outer(rng.uniform(0, 2, 10), W.ell_minus)
    args = (pts, W.ell_plus, W.ell_minus, W.xi, closed)
    assert np.array_equal(_accel.contains_points_numba(*args), _accel.contains_points_numpy(*args))


@needs_numba
def test_unwrap_backends_agree():
    rng = np.random.default_rng(1)
    true = rng.uniform(-200, 200, 300)
    L = 9
    phases = np.angle(np.exp(1j * true[None, :] / 2.0 ** np.arange(L + 1)[:, None]))
    a, wa = _accel.unwrap_doubling_numba(phases)
    b, wb = _accel.unwrap_doubling_numpy(phases)
    assert np.array_equal(a, b) and wa == wb
    assert np.allclose(a, true, atol=1e-9)


def test_unwrap_recovers_large_phases():
    true = np.array([0.0, 3.0, -17.5, 1000.25])
    L = 12
    phases = np.angle(np.exp(1j * true[None, :] / 2.0 ** np.arange(L + 1)[:, None]))
    got, worst = _accel.unwrap_doubling(phases)
    assert np.allclose(got, true, atol=1e-9) and worst <= 1e-9


def test_disable_flag_selects_numpy():
    env = dict(os.environ, CGMALAB_DISABLE_NUMBA="1")
    code = "from cgmalab import _accel, wedges; print(_accel.backend(), wedges.contains(wedges.W1, [0, 1, 0, 0]))"
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert res.stdout.split() == ["numpy", "True"]
