"""The convolution identities linking G, the kernel, and the coefficients.

The smoothed products of shifted G values equal kernel-transform-weighted
coefficient sums minus pole residues.  The residues are computed two ways:
a numerical Cauchy contour around the pole of the integrand (primary) and
the Leibniz-sum closed form (cross-check).  The closed form needs the
residue c_K of the Dedekind zeta at s = 1 as a prefactor; the identity
fails without it.

verify_double_convolution / verify_single_convolution evaluate both sides
independently and report the absolute error; they are the strongest
end-to-end checks in the package.
"""

from __future__ import annotations

import math

import numpy as np

from . import backend
from .fields import FieldSpec, g_coefficient_table
from .kernel import KernelSpec, kernel_hat_array, kernel_value, kernel_value_array
from .zeta import (
    EVAL_T_CEILING,
    dedekind_zeta,
    dedekind_zeta_derivative,
    dedekind_zeta_residue,
    g_function,
)

__all__ = [
    "e_series",
    "coefficient_series_single",
    "residue_tau",
    "kernel_derivative_complex",
    "verify_double_convolution",
    "verify_single_convolution",
    "check_kernel_decay",
]

PAIR_BUDGET = 10**7
_Y_MAX = 800.0


def check_kernel_decay(kspec: KernelSpec, field: FieldSpec):
    """The convolution lemmas need K decaying at least like |x|^-2 phi(d)."""
    if 2 * kspec.eta < 2 * field.totient:
        raise ValueError(
            f"kernel decay u^-{2 * kspec.eta} too weak for phi(d) = {field.totient}; "
            f"need eta >= phi(d)"
        )


def _series_cutoff(kspec: KernelSpec, budget: int) -> int:
    x = int(math.floor(math.exp(min(kspec.support, math.log(2 * budget)))))
    if x * (math.log(x) + 1) > budget:
        raise ValueError(
            f"kernel support exp({kspec.support:.3f}) needs ~{x * (math.log(x) + 1):.0f} "
            f"coefficient pairs (budget {budget})"
        )
    return max(1, x)


def e_series(
    t: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    sigma: float = 0.5,
    pair_budget: int = PAIR_BUDGET,
) -> complex:
    """sum over nm <= exp(support) of khat(log nm) a(n) a(m) n^-(sigma+it) m^-(sigma-it).

    The transform's exact support makes the double series finite.
    """
    x = _series_cutoff(kspec, pair_budget)
    coeffs = g_coefficient_table(field, x, ell)
    n = np.arange(x + 1, dtype=np.float64)
    n[0] = 1.0
    logn = np.log(n)
    u = coeffs * np.exp(-(sigma + 1j * t) * logn)
    u[0] = 0.0
    w = np.zeros(x + 1, dtype=np.float64)
    w[1:] = kernel_hat_array(kspec, logn[1:])
    return complex(backend.e_series_pair_sum(u, w))


def coefficient_series_single(
    t: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    sigma: float,
    pair_budget: int = PAIR_BUDGET,
) -> complex:
    """sum over n <= exp(support) of khat(log n) a(n) n^-(sigma+it)."""
    x = _series_cutoff(kspec, pair_budget)
    coeffs = g_coefficient_table(field, x, ell)
    n = np.arange(1, x + 1, dtype=np.float64)
    logn = np.log(n)
    w = kernel_hat_array(kspec, logn)
    vals = w * coeffs[1:] * np.exp(-(sigma + 1j * t) * logn)
    return complex(vals.sum())


def kernel_derivative_complex(
    kspec: KernelSpec, w0: complex, n: int, radius: float = 0.5, nodes: int = 64
) -> complex:
    """n-th derivative of the entire kernel at a complex point (contour)."""
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * theta)
    vals = np.array([kernel_value(kspec, complex(w0 + z)) for z in ring])
    acc = (vals * np.exp(-1j * n * theta)).mean()
    return math.factorial(n) * complex(acc) / radius**n


def _g_batch(s: np.ndarray, field: FieldSpec, ell: int) -> np.ndarray:
    """G on an array; ell = 0 needs no contour since zeta_K^(0) = zeta_K."""
    ak2 = field.coefficient_prime_power(2, 1)
    if ell == 0:
        der = dedekind_zeta(s, field)
    else:
        der = dedekind_zeta_derivative(s, field, ell)
    return 1.0 + ak2 * np.exp(-s * math.log(2.0)) + (-1) ** ell * der


def residue_tau(
    t: float,
    sigma: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    which: str,
    radius: float = 0.125,
    nodes: int = 64,
    cross_check: bool = True,
    check_tol: float = 1e-6,
) -> dict:
    """Pole residue term of a convolution formula.

    which = 'plus'/'minus': 2 pi times the residue at s = 1 +- i t of
    G(s+it) G(s-it) K(i sigma - i s); 'single': the residue at s = 1 - i t
    of G(s+it) K(i sigma - i s) (the identity subtracts 2 pi times it).
    The Leibniz closed form (with the zeta_K residue c_K as prefactor)
    cross-checks the contour; disagreement beyond check_tol means the
    contour met an unexpected singularity and is reported.
    """
    if abs(t) < 1.0:
        raise ValueError("residues need |t| >= 1 to separate the poles")
    if which not in ("plus", "minus", "single"):
        raise ValueError("which must be plus|minus|single")
    sign = 1.0 if which == "plus" else -1.0
    s0 = 1.0 + sign * 1j * t
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = radius * np.exp(1j * theta)
    z = s0 + ring
    k_vals = np.array([kernel_value(kspec, complex(1j * sigma - 1j * zz)) for zz in z])
    g_plus = _g_batch(z + 1j * t, field, ell)
    if which == "single":
        integrand = g_plus * k_vals
    else:
        g_minus = _g_batch(z - 1j * t, field, ell)
        integrand = g_plus * g_minus * k_vals
    res = complex((integrand * ring).mean())
    value = 2.0 * math.pi * res if which != "single" else res

    record = {"which": which, "value": value}
    if cross_check:
        c_k = dedekind_zeta_residue(field)
        w0 = 1j * sigma - 1j * s0
        if which == "single":
            leib = c_k * (-1j) ** ell * kernel_derivative_complex(kspec, w0, ell)
        else:
            ak2 = field.coefficient_prime_power(2, 1)
            other = s0 + sign * 1j * t  # 1 +- 2it, the regular G argument
            total = 0.0 + 0.0j
            for m in range(ell + 1):
                n = ell - m
                g_m = ak2 * (-math.log(2.0)) ** m * np.exp(
                    -complex(other) * math.log(2.0)
                ) + (-1) ** ell * complex(
                    dedekind_zeta_derivative(complex(other), field, ell + m)
                )
                if m == 0:
                    g_m += 1.0
                k_n = (-1j) ** n * kernel_derivative_complex(kspec, complex(w0), n)
                total += g_m * k_n / (math.factorial(m) * math.factorial(n))
            leib = 2.0 * math.pi * c_k * math.factorial(ell) * total
        disagreement = abs(value - leib)
        scale = max(1.0, abs(value))
        if disagreement > check_tol * scale:
            raise ArithmeticError(
                f"residue contour vs Leibniz disagree by {disagreement:.3e} "
                f"({which}, t={t}, ell={ell}); unexpected singularity?"
            )
        record["leibniz"] = leib
        record["disagreement"] = disagreement
    return record


def _lhs_quadrature(
    t: float,
    sigma: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    double: bool,
    quad_tol: float,
    max_half_range: float = _Y_MAX,
) -> tuple[float, dict]:
    """integral over y of G(sigma+it+iy) [G(sigma-it+iy)] K(y).

    Panels follow the kernel arches (zeros at multiples of pi/a), each cut
    to resolve the oscillation of G; two dyadic refinement levels give the
    error estimate.  The range grows until both the last arch contribution
    and the kernel-tail bound (with the observed |G| on the last arch)
    drop below the tolerance.
    """
    a = kspec.a
    arch = math.pi / a
    eta = kspec.eta

    def integrate(level_cap: float) -> tuple[complex, dict]:
        glnodes, glweights = np.polynomial.legendre.leggauss(20)
        total = 0.0 + 0.0j
        m = 0
        calm_archs = 0
        info = {"half_range": 0.0, "g_points": 0}
        while True:
            lo, hi = m * arch, (m + 1) * arch
            if lo > max_half_range or abs(t) + hi > EVAL_T_CEILING - 5.0:
                raise ArithmeticError(
                    f"quadrature budget exceeded: half-range {lo:.1f} "
                    f"without meeting tolerance {quad_tol:.2e}"
                )
            nsub = max(1, math.ceil(arch / level_cap))
            edges = np.linspace(lo, hi, nsub + 1)
            mid = 0.5 * (edges[1:] + edges[:-1])
            half = 0.5 * (edges[1:] - edges[:-1])
            y = (mid[:, None] + half[:, None] * glnodes[None, :]).ravel()
            y_all = np.concatenate([y, -y])
            g1 = _g_batch(sigma + 1j * t + 1j * y_all, field, ell)
            if double:
                g2 = _g_batch(sigma - 1j * t + 1j * y_all, field, ell)
            else:
                g2 = np.ones_like(g1)
            kv = kernel_value_array(kspec, y_all)
            f = (g1 * g2 * kv).reshape(2, nsub, glnodes.size)
            w2 = (glweights[None, :] * half[:, None])
            contrib = complex((f[0] * w2).sum() + (f[1] * w2).sum())
            info["g_points"] += y_all.size * (2 if double else 1)
            total += contrib
            gmax2 = float(np.abs(g1 * g2).max())
            m += 1
            info["half_range"] = hi
            # stop: calm arches plus a kernel-tail bound using observed |G G|
            tail_bound = (
                gmax2 * 4.0 * a ** (1 - 2 * eta) * hi ** (1 - 2 * eta) / (2 * eta - 1)
            )
            if abs(contrib) < quad_tol / 8.0:
                calm_archs += 1
            else:
                calm_archs = 0
            if m >= 3 and calm_archs >= 2 and tail_bound < quad_tol / 8.0:
                return total, info

    coarse, _ = integrate(1.6)
    fine, info = integrate(0.8)
    err = abs(fine - coarse)
    if err > quad_tol / 2.0:
        finest, info = integrate(0.4)
        err = abs(finest - fine)
        fine = finest
        if err > quad_tol:
            raise ArithmeticError(
                f"lhs quadrature failed to converge (estimate {err:.2e} > {quad_tol:.2e})"
            )
    info["quad_error_estimate"] = err
    return complex(fine), info


def verify_double_convolution(
    t: float,
    sigma: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    tol: float = 1e-4,
    pair_budget: int = PAIR_BUDGET,
) -> dict:
    """Both sides of the two-shift convolution identity and their gap.

    lhs: integral of G(sigma+it+iy) G(sigma-it+iy) K_eta(y) dy.
    rhs: the kernel-weighted coefficient double series minus the two pole
    residues.  abs_error <= tol is the acceptance condition.
    """
    if t == 0.0:
        raise ValueError("t must be nonzero")
    check_kernel_decay(kspec, field)
    lhs, info = _lhs_quadrature(t, sigma, kspec, field, ell, True, quad_tol=tol / 4.0)
    series = e_series(t, kspec, field, ell, sigma, pair_budget)
    tau_p = residue_tau(t, sigma, kspec, field, ell, "plus")
    tau_m = residue_tau(t, sigma, kspec, field, ell, "minus")
    rhs = series - (tau_p["value"] + tau_m["value"])
    record = {
        "lemma": "double",
        "t": t,
        "sigma": sigma,
        "d": field.d,
        "ell": ell,
        "eta": kspec.eta,
        "support": kspec.support,
        "lhs": lhs,
        "rhs": rhs,
        "abs_error": abs(lhs - rhs),
        "series": series,
        "tau_plus": tau_p["value"],
        "tau_minus": tau_m["value"],
        "tau_cross_check": max(tau_p["disagreement"], tau_m["disagreement"]),
        "quad": info,
        "tol": tol,
        "ok": None,
    }
    record["ok"] = bool(record["abs_error"] <= tol)
    return record


def verify_single_convolution(
    t: float,
    sigma: float,
    kspec: KernelSpec,
    field: FieldSpec,
    ell: int,
    tol: float = 1e-4,
    pair_budget: int = PAIR_BUDGET,
) -> dict:
    """Both sides of the one-shift convolution identity and their gap."""
    if t == 0.0:
        raise ValueError("t must be nonzero")
    check_kernel_decay(kspec, field)
    lhs, info = _lhs_quadrature(t, sigma, kspec, field, ell, False, quad_tol=tol / 4.0)
    series = coefficient_series_single(t, kspec, field, ell, sigma, pair_budget)
    tau = residue_tau(t, sigma, kspec, field, ell, "single")
    rhs = series - 2.0 * math.pi * tau["value"]
    record = {
        "lemma": "single",
        "t": t,
        "sigma": sigma,
        "d": field.d,
        "ell": ell,
        "eta": kspec.eta,
        "support": kspec.support,
        "lhs": lhs,
        "rhs": rhs,
        "abs_error": abs(lhs - rhs),
        "series": series,
        "tau": tau["value"],
        "tau_cross_check": tau["disagreement"],
        "quad": info,
        "tol": tol,
        "ok": None,
    }
    record["ok"] = bool(record["abs_error"] <= tol)
    return record
