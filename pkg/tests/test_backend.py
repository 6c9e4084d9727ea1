import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncvar import kernels
from truncvar._accel import BACKEND

from .strategies import value_arrays

eps_values = st.floats(0.0, 5.0)


@given(value_arrays(max_size=80), eps_values)
def test_prefix_variation(x, eps):
    a = kernels.truncvar_prefix(x, eps)
    b = kernels.truncvar_prefix.py_func(x, eps)
    for u, v in zip(a, b):
        assert np.allclose(u, v, rtol=1e-12, atol=1e-12)


@given(value_arrays(max_size=40), eps_values)
def test_dp(x, eps):
    assert np.allclose(kernels.truncvar_dp(x, eps), kernels.truncvar_dp.py_func(x, eps), rtol=1e-12, atol=1e-12)


@given(value_arrays(max_size=80), st.floats(1e-3, 5.0))
def test_backlash(x, h):
    assert np.array_equal(kernels.backlash(x, h), kernels.backlash.py_func(x, h))


@given(value_arrays(max_size=80))
def test_kahan(x):
    assert kernels.kahan_sum(x) == kernels.kahan_sum.py_func(x)
    assert np.array_equal(kernels.kahan_cumsum(x), kernels.kahan_cumsum.py_func(x))


@given(value_arrays(max_size=60), st.floats(0.01, 3.0))
def test_crossing_counts(x, eps):
    levels = np.unique(np.concatenate((x, x - eps))) + 1e-3
    ups, downs = kernels.crossing_counts_levels(x, levels, eps)
    up2, down2 = kernels._crossing_counts_loop.py_func(x, levels, eps)
    up3, down3 = kernels._crossing_counts_vectorized(x, levels, eps)
    assert np.array_equal(ups, up2) and np.array_equal(downs, down2)
    assert np.array_equal(ups, up3) and np.array_equal(downs, down3)


def test_kahan_beats_naive():
    x = np.array([1.0] + [1e-16] * 10_000)
    assert kernels.kahan_sum(x) == pytest.approx(1.0 + 1e-12, rel=1e-15)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, TRUNCVAR_DISABLE_NUMBA="1")
    code = (
        "import numpy as np, truncvar; from truncvar import make_path, variation_triple;"
        "print(truncvar.BACKEND, variation_triple(make_path([0,1,2,3],[0,1,0,1]), 0.5).ttv)"
    )
    r = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert r.stdout.split() == ["numpy", "1.5"]


def test_default_backend():
    assert BACKEND == ("numpy" if os.environ.get("TRUNCVAR_DISABLE_NUMBA") else "numba")
