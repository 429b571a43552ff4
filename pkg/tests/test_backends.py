"""Native extension vs pure-numpy fallback: same answers, selectable."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from cyclozeta import _accel_py
from cyclozeta import backend

try:
    from cyclozeta import _accel
except ImportError:
    _accel = None

needs_native = pytest.mark.skipif(_accel is None, reason="extension not built")


def test_active_backend_exposed():
    assert backend.BACKEND_NAME in ("native", "pure")


@needs_native
def test_em_power_sum_agreement():
    rng = np.random.default_rng(8)
    s = rng.uniform(0.3, 3.0, 64) + 1j * rng.uniform(-800, 800, 64)
    for a in (1.0, 1 / 3, 0.7):
        native = _accel.em_power_sum(s, a, 512)
        pure = _accel_py.em_power_sum(s, a, 512)
        assert np.abs(native - pure).max() < 1e-11


@needs_native
def test_gcd_pair_rows_agreement():
    rng = np.random.default_rng(9)
    expmat = rng.integers(0, 3, size=(40, 6))
    logp = np.log(np.array([7, 13, 19, 31, 37, 43], dtype=np.float64))
    aktab = rng.uniform(0.5, 3.0, size=(6, 3))
    aktab[:, 0] = 1.0
    for sigma in (1 / 3, 0.5, 1.0):
        native = _accel.gcd_pair_rows(expmat, logp, aktab, sigma)
        pure = _accel_py.gcd_pair_rows(expmat, logp, aktab, sigma)
        assert np.abs(np.asarray(native) - pure).max() < 1e-12


@needs_native
def test_e_series_pair_sum_agreement():
    rng = np.random.default_rng(10)
    x = 200
    u = rng.normal(size=x + 1) + 1j * rng.normal(size=x + 1)
    u[0] = 0.0
    w = np.zeros(x + 1)
    w[1:60] = rng.uniform(0.0, 2.0, 59)
    native = _accel.e_series_pair_sum(u, w)
    pure = _accel_py.e_series_pair_sum(u, w)
    assert abs(native - pure) < 1e-10


def test_backend_env_override():
    code = (
        "import cyclozeta.backend as b; print(b.BACKEND_NAME)"
    )
    env = dict(os.environ, CYCLOZETA_BACKEND="pure")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "pure"


def test_pure_backend_full_pipeline():
    # the fallback runs the whole convolution check, not just unit kernels
    code = (
        "from cyclozeta.fields import FieldSpec\n"
        "from cyclozeta.kernel import KernelSpec\n"
        "from cyclozeta.convolution import verify_double_convolution\n"
        "import cyclozeta.backend as b\n"
        "assert b.BACKEND_NAME == 'pure'\n"
        "rec = verify_double_convolution(5.0, 0.5, KernelSpec(eta=4, epsilon=0.1, log_t=10.0), FieldSpec.make(3), 1, tol=1e-4)\n"
        "assert rec['ok'], rec['abs_error']\n"
        "print('ok', rec['abs_error'])\n"
    )
    env = dict(os.environ, CYCLOZETA_BACKEND="pure")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=300
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.startswith("ok")
