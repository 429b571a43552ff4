"""The resonance kernel, its compactly supported transform, and the Gaussian.

K_eta(u) = sin^(2 eta)(a u) / (a^(2 eta - 1) u^(2 eta)) with a = eps/eta*logT.
Its Fourier transform (e^{-iuv} convention) is 2*pi*a times the density of
a sum of 2 eta independent uniforms on [-a, a]:

    khat_eta(v) = pi * IrwinHall_{2 eta}(v/(2a) + eta),

an even piecewise polynomial vanishing identically outside |v| <= 2*eta*a.
Piece coefficients are computed once per eta with exact rational arithmetic
in a basis local to each piece (they are Taylor coefficients of a bounded
density, so the float conversion is benign), and the central value is
available exactly for any eta through integer arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import sici

__all__ = [
    "KernelSpec",
    "kernel_value",
    "kernel_value_array",
    "kernel_hat",
    "kernel_hat_array",
    "kernel_hat_derivative",
    "kernel_hat_zero_exact",
    "kernel_hat_zero_asymptotic",
    "kernel_hat_quadrature_oracle",
    "kernel_hat_derivative_bound_check",
    "gaussian_phi",
    "gaussian_phi_hat",
]

# piecewise tables use exact rationals; cost grows cubically with eta
PIECEWISE_ETA_CAP = 32


@dataclass(frozen=True)
class KernelSpec:
    eta: int
    epsilon: float
    log_t: float

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be >= 1")
        if self.epsilon <= 0 or self.log_t <= 1:
            raise ValueError("need epsilon > 0 and logT > 1")

    @property
    def a(self) -> float:
        """Half-bandwidth of one sinc factor."""
        return self.epsilon * self.log_t / self.eta

    @property
    def support(self) -> float:
        """khat vanishes outside [-support, support] = [-2 eps logT, ...]."""
        return 2.0 * self.eta * self.a


def kernel_value(spec: KernelSpec, u):
    """K_eta(u) for real or complex u; the u = 0 limit is a."""
    a = spec.a
    w = a * complex(u)
    if w == 0:
        return a if not isinstance(u, complex) else complex(a)
    if abs(w) < 1e-4:
        # series for sinc avoids 0/0 noise; the w^6 term is below 1e-24 here
        sinc = 1.0 - w * w / 6.0 + w**4 / 120.0
        val = a * cmath.exp(2 * spec.eta * cmath.log(sinc))
    else:
        val = a * (cmath.sin(w) / w) ** (2 * spec.eta)
    if not isinstance(u, complex):
        return val.real
    return val


def kernel_value_array(spec: KernelSpec, u: np.ndarray) -> np.ndarray:
    """K_eta on a real array."""
    a = spec.a
    w = a * np.asarray(u, dtype=np.float64)
    out = np.empty_like(w)
    small = np.abs(w) < 1e-4
    ws = w[small]
    out[small] = a * np.exp(2 * spec.eta * np.log(1.0 - ws * ws / 6.0 + ws**4 / 120.0))
    wl = w[~small]
    out[~small] = a * (np.sin(wl) / wl) ** (2 * spec.eta)
    return out


@lru_cache(maxsize=None)
def _irwin_hall_pieces(n: int) -> np.ndarray:
    """Local-basis coefficients of the Irwin-Hall density of n uniforms.

    Row k holds c[0..n-1] with density(x) = sum_i c[i] * y^i on [k, k+1],
    y = x - k - 1/2.  Exact rationals throughout, floats only at the end.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    fact = math.factorial(n - 1)
    out = np.zeros((n, n), dtype=np.float64)
    binom_n = [math.comb(n, j) for j in range(n + 1)]
    binom_d = [math.comb(n - 1, i) for i in range(n)]
    for k in range(n):
        for i in range(n):
            acc = Fraction(0)
            for j in range(k + 1):
                base = Fraction(2 * (k - j) + 1, 2)  # x - j at the piece center
                sign = -1 if j % 2 else 1
                acc += sign * binom_n[j] * base ** (n - 1 - i)
            acc = acc * binom_d[i]
            out[k, i] = float(acc / fact)
    return out


@lru_cache(maxsize=None)
def _irwin_hall_center_exact(n: int) -> float:
    """Exact central density value IrwinHall_n(n/2) for even n."""
    if n < 2 or n % 2:
        raise ValueError("need even n >= 2")
    acc = 0
    half = n // 2
    for j in range(half + 1):
        term = math.comb(n, j) * (half - j) ** (n - 1)
        acc += -term if j % 2 else term
    return float(Fraction(acc, math.factorial(n - 1)))


def _irwin_hall_eval(n: int, x: np.ndarray, derivative: bool = False) -> np.ndarray:
    pieces = _irwin_hall_pieces(n)
    x = np.asarray(x, dtype=np.float64)
    inside = (x > 0.0) & (x < n)
    out = np.zeros(x.shape, dtype=np.float64)
    if not inside.any():
        return out
    xi = x[inside]
    k = np.minimum(xi.astype(np.int64), n - 1)
    y = xi - k - 0.5
    coeffs = pieces[k]
    acc = np.zeros(xi.shape, dtype=np.float64)
    if derivative:
        for i in range(n - 1, 0, -1):
            acc = acc * y + i * coeffs[:, i]
    else:
        for i in range(n - 1, -1, -1):
            acc = acc * y + coeffs[:, i]
        acc = np.maximum(acc, 0.0)  # density: edge roundoff may dip below 0
    out[inside] = acc
    return out


def _require_piecewise(eta: int):
    if eta > PIECEWISE_ETA_CAP:
        raise ValueError(
            f"piecewise transform tables capped at eta = {PIECEWISE_ETA_CAP} "
            f"(got {eta}); only the v = 0 value is available there"
        )


def kernel_hat(spec: KernelSpec, v: float) -> float:
    """khat_eta(v): exact zero outside the support, pi * IrwinHall inside."""
    if abs(v) >= spec.support:
        return 0.0
    if v == 0.0:
        return kernel_hat_zero_exact(spec.eta)
    _require_piecewise(spec.eta)
    x = v / (2.0 * spec.a) + spec.eta
    return math.pi * float(_irwin_hall_eval(2 * spec.eta, np.array([x]))[0])


def kernel_hat_array(spec: KernelSpec, v: np.ndarray) -> np.ndarray:
    _require_piecewise(spec.eta)
    x = np.asarray(v, dtype=np.float64) / (2.0 * spec.a) + spec.eta
    return math.pi * _irwin_hall_eval(2 * spec.eta, x)


def kernel_hat_derivative(spec: KernelSpec, v) -> np.ndarray:
    """d/dv khat_eta(v), analytic from the piecewise polynomials."""
    _require_piecewise(spec.eta)
    x = np.asarray(v, dtype=np.float64) / (2.0 * spec.a) + spec.eta
    return math.pi / (2.0 * spec.a) * _irwin_hall_eval(2 * spec.eta, x, derivative=True)


def kernel_hat_zero_exact(eta: int) -> float:
    """khat_eta(0) = integral of K_eta; independent of a, exact for any eta."""
    return math.pi * _irwin_hall_center_exact(2 * eta)


def kernel_hat_zero_asymptotic(eta: int) -> float:
    """Large-eta equivalent sqrt(3 pi / eta) of khat_eta(0)."""
    if eta < 1:
        raise ValueError("eta must be >= 1")
    return math.sqrt(3.0 * math.pi / eta)


def _cos_tail(omega: float, m: int, x: float) -> float:
    """integral_X^inf cos(omega t) t^(-m) dt, exact via Si/Ci recursion."""
    omega = abs(omega)
    if omega == 0.0:
        if m < 2:
            raise ValueError("divergent tail")
        return x ** (1 - m) / (m - 1)
    c_val, s_val = None, None
    si, ci = sici(omega * x)
    c_val = -ci  # integral of cos(omega t)/t
    s_val = math.pi / 2 - si
    for mm in range(2, m + 1):
        c_new = math.cos(omega * x) * x ** (1 - mm) / (mm - 1) - omega / (mm - 1) * s_val
        s_new = math.sin(omega * x) * x ** (1 - mm) / (mm - 1) + omega / (mm - 1) * c_val
        c_val, s_val = c_new, s_new
    return c_val


def kernel_hat_quadrature_oracle(spec: KernelSpec, v: float, tol: float) -> float:
    """khat_eta(v) from the defining integral, independent of the closed form.

    Rescaled to khat(v) = 2 * integral_0^inf (sin x / x)^(2 eta) cos(w x) dx
    with w = v/a: panel Gauss-Legendre on [0, X] plus the exact polynomial
    tail (cosine expansion of sin^(2 eta) and Si/Ci recursion).
    """
    if not (1e-12 <= tol <= 1e-4):
        raise ValueError("tol must lie in [1e-12, 1e-4]")
    eta = spec.eta
    w = abs(v) / spec.a
    npanels = math.ceil(40.0 / math.pi)
    x_cut = npanels * math.pi  # head/tail split aligned to the kernel zeros

    def head(nsub: int) -> float:
        # sub-panels per pi-length panel, sized to the oscillation of cos(wx)
        nodes, weights = np.polynomial.legendre.leggauss(24)
        per = nsub * max(1, int(w / 3) + 1)
        edges = np.linspace(0.0, x_cut, npanels * per + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        x = mid[:, None] + half[:, None] * nodes[None, :]
        xs = x.ravel()
        vals = np.empty_like(xs)
        small = np.abs(xs) < 1e-8
        vals[small] = 1.0
        vals[~small] = (np.sin(xs[~small]) / xs[~small]) ** (2 * eta)
        vals *= np.cos(w * xs)
        vals = vals.reshape(x.shape)
        return float(np.sum(vals @ weights * half))

    h1, h2 = head(1), head(2)
    if abs(h1 - h2) > max(tol / 4, 1e-14):
        h3 = head(4)
        if abs(h2 - h3) > max(tol / 2, 1e-13):
            raise ArithmeticError(
                f"oracle quadrature did not converge to {tol} (delta {abs(h2 - h3):.2e})"
            )
        h2 = h3
    # tail: sin^(2eta) x = 2^(-2eta) [ C(2eta,eta) + 2 sum_j (-1)^(eta-j) C(2eta,j) cos(2(eta-j)x) ]
    scale = 0.25**eta
    tail = math.comb(2 * eta, eta) * _cos_tail(w, 2 * eta, x_cut)
    for j in range(eta):
        sign = -1 if (eta - j) % 2 else 1
        coeff = sign * math.comb(2 * eta, j)
        freq = 2.0 * (eta - j)
        tail += coeff * (
            _cos_tail(freq + w, 2 * eta, x_cut) + _cos_tail(abs(freq - w), 2 * eta, x_cut)
        )
    return 2.0 * (h2 + scale * tail)


def kernel_hat_derivative_bound_check(spec: KernelSpec, samples: int) -> dict:
    """Check |d/dv khat_eta| <= khat_{eta-1}(0) / a over the support.

    Also verifies monotone decrease on [0, support].  Returns a record with
    the worst sampled point; `ok` is the conjunction of both checks.
    """
    if spec.eta < 2:
        raise ValueError("derivative bound needs eta >= 2")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    v = np.linspace(-spec.support, spec.support, samples)
    deriv = kernel_hat_derivative(spec, v)
    bound = kernel_hat_zero_exact(spec.eta - 1) / spec.a
    excess = np.abs(deriv) - bound
    worst = int(np.argmax(excess))
    pos = np.linspace(0.0, spec.support, samples)
    vals = kernel_hat_array(spec, pos)
    monotone = bool((np.diff(vals) <= 1e-12 * vals[0]).all())
    return {
        "ok": bool(excess[worst] <= 0.0) and monotone,
        "bound": bound,
        "worst_v": float(v[worst]),
        "worst_abs_derivative": float(abs(deriv[worst])),
        "monotone": monotone,
    }


def gaussian_phi(y):
    """exp(-y^2 / 2), vectorized."""
    y = np.asarray(y, dtype=np.float64)
    out = np.exp(-0.5 * y * y)
    return float(out) if out.ndim == 0 else out


def gaussian_phi_hat(xi):
    """Fourier transform sqrt(2 pi) exp(-xi^2 / 2)."""
    return math.sqrt(2.0 * math.pi) * gaussian_phi(xi)
