"""Evaluator tests: analytic constants, independent series oracles,
mpmath cross-checks, and the contour-vs-finite-difference pairing."""

import math

import mpmath as mp
import numpy as np
import pytest

from cyclozeta.fields import FieldSpec, dedekind_coefficient_table, g_coefficient_table
from cyclozeta.zeta import (
    EVAL_T_CEILING,
    EvalRequest,
    dedekind_zeta,
    dedekind_zeta_derivative,
    dedekind_zeta_derivative_adaptive,
    dedekind_zeta_residue,
    dirichlet_l,
    dirichlet_l_one,
    evaluate,
    g_function,
    hurwitz_zeta,
    riemann_zeta,
)

mp.mp.dps = 30

F3 = FieldSpec.make(3)
F4 = FieldSpec.make(4)

CATALAN = 0.9159655941772190


def eta_series_zeta(s: complex, terms: int = 4_000_000) -> complex:
    """Alternating-series oracle for zeta, averaged partial sums."""
    n = np.arange(1, terms + 1, dtype=np.float64)
    signs = np.where(n % 2 == 1, 1.0, -1.0)
    vals = signs * np.exp(-s * np.log(n))
    partial = vals.sum()
    # endpoint average kills the leading alternating-tail error
    partial_minus = partial - vals[-1]
    eta_val = 0.5 * (partial + partial_minus)
    return eta_val / (1.0 - 2.0 ** (1.0 - s))


def test_hurwitz_analytic_values():
    assert riemann_zeta(2.0 + 0j) == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert hurwitz_zeta(2.0 + 0j, 0.5) == pytest.approx(math.pi**2 / 2, abs=1e-12)
    # brute partial-sum oracle for zeta(2, 1/2) with integral tail bracket
    n = np.arange(0, 2_000_000)
    brute = ((n + 0.5) ** -2.0).sum()
    assert abs(hurwitz_zeta(2.0 + 0j, 0.5) - brute) < 1e-6


def test_hurwitz_near_first_zero_against_alternating_oracle():
    s = 0.5 + 14.1347j
    got = riemann_zeta(s)
    ref = eta_series_zeta(s)
    assert abs(got) < 5e-3  # close to the first zero
    assert abs(got - ref) < 1e-8


def test_hurwitz_guards():
    with pytest.raises(ValueError):
        hurwitz_zeta(1.0 + 1e-9j, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(-0.5 + 3j, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(0.5 + (EVAL_T_CEILING + 1) * 1j, 1.0)
    with pytest.raises(ValueError):
        hurwitz_zeta(2.0 + 0j, 1.5)


def test_hurwitz_against_mpmath_sweep():
    worst = 0.0
    for sigma in (0.3, 0.5, 1.5, 3.0):
        for t in (0.0, 1.0, 35.2, 412.0, 1900.0):
            for a in (1.0, 1 / 3, 0.25, 0.8):
                got = hurwitz_zeta(complex(sigma, t), a)
                ref = complex(mp.zeta(mp.mpc(sigma, t), a))
                worst = max(worst, abs(got - ref) / max(1e-30, abs(ref)))
    assert worst < 1e-10


def test_reflection_symmetry():
    pts = [0.5 + 7.1j, 1.2 + 33.3j, 2.0 + 100.0j]
    for s in pts:
        assert abs(hurwitz_zeta(np.conj(s), 1 / 3) - np.conj(hurwitz_zeta(s, 1 / 3))) < 1e-12
        for field in (F3, F4):
            assert (
                abs(dedekind_zeta(np.conj(s), field) - np.conj(dedekind_zeta(s, field)))
                < 1e-10
            )
            chi = field.nonprincipal[0]
            assert abs(dirichlet_l(np.conj(s), chi) - np.conj(dirichlet_l(s, chi))) < 1e-12


def test_dirichlet_l_catalan():
    chi4 = F4.nonprincipal[0]
    got = dirichlet_l(2.0 + 0j, chi4)
    # alternating series oracle sum (-1)^k/(2k+1)^2, averaged partials
    k = np.arange(0, 2_000_001, dtype=np.float64)
    vals = (-1.0) ** k / (2 * k + 1) ** 2
    partial = vals.sum()
    oracle = 0.5 * (partial + partial - vals[-1])
    assert abs(got - oracle) < 1e-10
    assert abs(got - CATALAN) < 1e-12


def test_dirichlet_l_principal_is_zeta():
    principal = [c for c in F3.characters if c.is_principal][0]
    assert principal.conductor == 1
    s = 1.7 + 3.3j
    assert abs(dirichlet_l(s, principal) - riemann_zeta(s)) < 1e-12


def test_dedekind_zeta_product_value():
    got = dedekind_zeta(2.0 + 0j, F4)
    assert abs(got - (math.pi**2 / 6) * CATALAN) < 1e-12


def test_dirichlet_l_conjugate_character():
    # complex characters mod 5: conjugating the character conjugates L
    f5 = FieldSpec.make(5)
    s = 1.3 + 4.2j
    for chi in f5.nonprincipal:
        conj_idx = tuple(
            -k % chi.order_den if k >= 0 else -1 for k in chi.value_index
        )
        chi_bar = next(
            c for c in f5.characters if c.value_index == conj_idx
        )
        lhs = dirichlet_l(np.conj(s), chi_bar)
        assert abs(lhs - np.conj(dirichlet_l(s, chi))) < 1e-12


def test_dedekind_zeta_dirichlet_series():
    # partial sums of the coefficient series at s = 3, tail bounded by the
    # divisor-function majorant a_K(n) <= tau(n) (d = 3: phi = 2)
    table = dedekind_coefficient_table(F3, 10_000)
    n = np.arange(1, 10_001, dtype=np.float64)
    partial = (table[1:] / n**3).sum()
    got = dedekind_zeta(3.0 + 0j, F3)
    tail_bound = 2 * (math.log(10_000) + 1) / 10_000**2
    assert abs(got.real - partial) < max(1e-6, tail_bound)
    assert abs(got.imag) < 1e-12


def test_dedekind_residues():
    assert dedekind_zeta_residue(F3) == pytest.approx(math.pi / (3 * math.sqrt(3)), abs=1e-12)
    assert dedekind_zeta_residue(F4) == pytest.approx(math.pi / 4, abs=1e-12)
    with pytest.raises(ValueError):
        dirichlet_l_one([c for c in F3.characters if c.is_principal][0])


def _fd_derivative(fn, s: complex, ell: int, h: float) -> complex:
    """Central finite differences with one Richardson step (order h^4)."""

    def stencil(hh: float) -> complex:
        if ell == 1:
            return (fn(s + hh) - fn(s - hh)) / (2 * hh)
        if ell == 2:
            return (fn(s + hh) - 2 * fn(s) + fn(s - hh)) / hh**2
        if ell == 3:
            return (fn(s + 2 * hh) - 2 * fn(s + hh) + 2 * fn(s - hh) - fn(s - 2 * hh)) / (
                2 * hh**3
            )
        raise ValueError(ell)

    return (4.0 * stencil(h / 2) - stencil(h)) / 3.0


def test_derivative_examples():
    # ell = 0 reduces to the direct product evaluation
    s = 2.0 + 3.0j
    assert abs(dedekind_zeta_derivative(s, F4, 0) - dedekind_zeta(s, F4)) < 1e-9
    # ell = 1 at s = 2, d = 3 against the plain central difference, h = 1e-4
    fn = lambda z: dedekind_zeta(z, F3)
    fd = (fn(2.0 + 1e-4) - fn(2.0 - 1e-4)) / 2e-4
    assert abs(dedekind_zeta_derivative(2.0 + 0j, F3, 1) - fd) < 1e-6
    # ell = 2 at s = 2 + 3i, d = 4 against the second difference
    fn4 = lambda z: dedekind_zeta(z, F4)
    h = 1e-3
    fd2 = (fn4(s + h) - 2 * fn4(s) + fn4(s - h)) / h**2
    assert abs(dedekind_zeta_derivative(s, F4, 2) - fd2) < 1e-5


def test_derivative_contour_vs_fd_random():
    rng = np.random.default_rng(42)
    for _ in range(8):
        d = int(rng.choice([3, 4]))
        ell = int(rng.integers(1, 4))
        s = complex(rng.uniform(1.5, 3.0), rng.uniform(-20, 20))
        field = FieldSpec.make(d)
        got = dedekind_zeta_derivative(s, field, ell)
        ref = _fd_derivative(lambda z: dedekind_zeta(z, field), s, ell, 1e-2)
        assert abs(got - ref) < 1e-5, (d, ell, s)


def test_adaptive_derivative_and_evaluate():
    val = dedekind_zeta_derivative_adaptive(0.6 + 5j, F3, 2, 1e-10)
    assert abs(val - dedekind_zeta_derivative(0.6 + 5j, F3, 2, nodes=128)) < 1e-9
    rec = evaluate(EvalRequest(s=0.5 + 20j, d=3, ell=1))
    assert rec["abs_error_estimate"] < 1e-8
    with pytest.raises(ValueError):
        EvalRequest(s=-1.0 + 2j, d=3)
    with pytest.raises(ValueError):
        EvalRequest(s=0.5 + 2j * EVAL_T_CEILING, d=3)


def test_g_function_series_cross_check():
    # sum a(n) n^-3 for d = 3, ell = 1 against G(3)
    a = g_coefficient_table(F3, 10_000, 1)
    n = np.arange(1, 10_001, dtype=np.float64)
    partial = (a[1:] / n**3).sum()
    got = g_function(3.0 + 0j, F3, 1)
    assert abs(got.real - partial) < 1e-5
    # ell = 0 identity through independent routes
    got0 = g_function(3.0 + 0j, F4, 0)
    direct = 1.0 + 2.0**-3.0 * F4.coefficient_prime_power(2, 1) + dedekind_zeta(3.0 + 0j, F4)
    assert abs(got0 - direct) < 1e-8


def test_g_trivial_bound():
    for s in (0.5 + 5j, 0.6 + 12j, 1.5 + 3j):
        for ell in (0, 1, 2):
            g = g_function(s, F3, ell)
            zd = dedekind_zeta_derivative(s, F3, ell)
            ak2 = F3.coefficient_prime_power(2, 1)
            assert abs(g) <= 1.0 + abs(ak2) * 2 ** -s.real + abs(zd) + 1e-12


def test_growth_sanity_diagnostic():
    # qualitative exponent check on the critical line, generous margin
    for field, ell in ((F3, 1), (F4, 2)):
        for t in (25.0, 80.0, 200.0):
            val = abs(dedekind_zeta_derivative(complex(0.5, t), field, ell))
            ratio = math.log(max(val, 1e-12)) / math.log(t)
            assert ratio < field.totient * (0.25 + 1 / 12) + 1.0
