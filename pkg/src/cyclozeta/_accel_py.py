"""Pure-numpy implementations of the hot kernels.

Same signatures as the compiled extension `cyclozeta._accel`; the active
backend is chosen in `cyclozeta.backend` at import time.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "pure"


def em_power_sum(s: np.ndarray, a: float, m_terms: int) -> np.ndarray:
    """sum_{n=0}^{m_terms-1} (n+a)^(-s) for each complex s (vectorized).

    Chunked over n to bound the size of the broadcast temporary.
    """
    s = np.ascontiguousarray(s, dtype=np.complex128)
    out = np.zeros(s.shape, dtype=np.complex128)
    chunk = max(1, int(4e6) // max(1, s.size))
    n = 0
    while n < m_terms:
        hi = min(n + chunk, m_terms)
        logs = np.log(np.arange(n, hi, dtype=np.float64) + a)
        out += np.exp(-s[..., None] * logs).sum(axis=-1)
        n = hi
    return out


def gcd_pair_rows(
    expmat: np.ndarray,
    logp: np.ndarray,
    aktab: np.ndarray,
    sigma: float,
) -> np.ndarray:
    """Strict-upper-triangle row sums of the weighted GCD double sum.

    expmat: (n, P) integer exponent matrix over a shared prime support;
    aktab: (P, emax+1) with aktab[i, e] = a_K(p_i ** e); row i of the
    result is sum_{j>i} a_K(m_i/g) a_K(m_j/g) ((g)/[lcm])^sigma where the
    gcd/lcm are taken componentwise.  Each row is summed exactly (fsum)
    so the total is independent of any row partitioning.
    """
    expmat = np.asarray(expmat, dtype=np.int64)
    n, nprimes = expmat.shape
    rows = np.zeros(n, dtype=np.float64)
    for i in range(n - 1):
        diff = expmat[i + 1 :] - expmat[i]
        logratio = np.abs(diff).astype(np.float64) @ logp
        weights = np.ones(len(diff))
        for k in range(nprimes):
            dk = diff[:, k]
            weights *= aktab[k][np.maximum(dk, 0)]
            weights *= aktab[k][np.maximum(-dk, 0)]
        rows[i] = math.fsum(weights * np.exp(-sigma * logratio))
    return rows


def e_series_pair_sum(u: np.ndarray, w: np.ndarray) -> complex:
    """sum over pairs n*m <= X of u[n] * conj(u[m]) * w[n*m].

    u has length X+1 (index 0 unused), w[k] holds the kernel-transform
    value at log k and is zero beyond the kernel support.
    """
    u = np.ascontiguousarray(u, dtype=np.complex128)
    w = np.ascontiguousarray(w, dtype=np.float64)
    x = len(u) - 1
    uc = np.conj(u)
    acc = 0.0 + 0.0j
    for n in range(1, x + 1):
        if u[n] == 0.0:
            continue
        mmax = x // n
        acc += u[n] * np.dot(w[n : n * mmax + 1 : n], uc[1 : mmax + 1])
    return complex(acc)
