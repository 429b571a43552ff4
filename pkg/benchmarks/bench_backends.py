"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot paths in isolation (both implementations in-process)
and one end-to-end convolution verification per backend (subprocess, since
the backend is fixed at import).  Usage: python benchmarks/bench_backends.py
"""

import os
import subprocess
import sys
import time

import numpy as np

from cyclozeta import _accel_py

try:
    from cyclozeta import _accel
except ImportError:
    _accel = None


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels():
    rng = np.random.default_rng(123)
    rows = []

    s = rng.uniform(0.3, 3.0, 2048) + 1j * rng.uniform(-900, 900, 2048)
    rows.append(
        (
            "em_power_sum (2048 pts x 1024 terms)",
            timeit(lambda: _accel_py.em_power_sum(s, 1 / 3, 1024)),
            timeit(lambda: _accel.em_power_sum(s, 1 / 3, 1024)) if _accel else None,
        )
    )

    expmat = rng.integers(0, 3, size=(600, 8))
    logp = np.log(np.array([7, 13, 19, 31, 37, 43, 61, 67], dtype=np.float64))
    aktab = rng.uniform(0.5, 3.0, size=(8, 3))
    aktab[:, 0] = 1.0
    rows.append(
        (
            "gcd_pair_rows (600 elements, 8 primes)",
            timeit(lambda: _accel_py.gcd_pair_rows(expmat, logp, aktab, 0.5)),
            timeit(lambda: _accel.gcd_pair_rows(expmat, logp, aktab, 0.5)) if _accel else None,
        )
    )

    x = 20_000
    u = (rng.normal(size=x + 1) + 1j * rng.normal(size=x + 1)).astype(np.complex128)
    u[0] = 0.0
    w = np.zeros(x + 1)
    w[1:5000] = rng.uniform(0.0, 2.0, 4999)
    rows.append(
        (
            "e_series_pair_sum (~2e5 pairs)",
            timeit(lambda: _accel_py.e_series_pair_sum(u, w), repeat=3),
            timeit(lambda: _accel.e_series_pair_sum(u, w), repeat=3) if _accel else None,
        )
    )
    return rows


def bench_pipeline(backend_name: str) -> float:
    code = (
        "import time\n"
        "from cyclozeta.fields import FieldSpec\n"
        "from cyclozeta.kernel import KernelSpec\n"
        "from cyclozeta.convolution import verify_double_convolution\n"
        "t0 = time.perf_counter()\n"
        "rec = verify_double_convolution(8.0, 0.5, KernelSpec(eta=4, epsilon=0.15, log_t=10.0), FieldSpec.make(3), 2, tol=1e-4)\n"
        "assert rec['ok']\n"
        "print(time.perf_counter() - t0)\n"
    )
    env = dict(os.environ, CYCLOZETA_BACKEND=backend_name)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    return float(out.stdout.strip())


def main():
    print(f"native extension available: {_accel is not None}\n")
    print(f"{'hot kernel':44s} {'pure':>10s} {'native':>10s} {'speedup':>8s}")
    for name, pure, native in bench_kernels():
        if native is None:
            print(f"{name:44s} {pure * 1e3:9.2f}ms {'n/a':>10s}")
        else:
            print(
                f"{name:44s} {pure * 1e3:9.2f}ms {native * 1e3:9.2f}ms "
                f"{pure / native:7.1f}x"
            )
    print("\nend-to-end double-convolution verification (one parameter point):")
    pure_t = bench_pipeline("pure")
    print(f"{'verify_double_convolution':44s} {pure_t * 1e3:9.0f}ms", end="")
    if _accel is not None:
        native_t = bench_pipeline("native")
        print(f" {native_t * 1e3:9.0f}ms {pure_t / native_t:7.1f}x")
    else:
        print()


if __name__ == "__main__":
    main()
