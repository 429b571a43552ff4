"""Convolution identities: residues, series, and both verifiers."""

import cmath
import math

import numpy as np
import pytest

from cyclozeta.convolution import (
    check_kernel_decay,
    coefficient_series_single,
    e_series,
    kernel_derivative_complex,
    residue_tau,
    verify_double_convolution,
    verify_single_convolution,
)
from cyclozeta.fields import FieldSpec
from cyclozeta.kernel import KernelSpec, kernel_hat_zero_exact, kernel_value
from cyclozeta.zeta import dedekind_zeta_residue

F3 = FieldSpec.make(3)
F4 = FieldSpec.make(4)
KS3 = KernelSpec(eta=4, epsilon=0.15, log_t=10.0)  # support 3.0, a = 0.375


def test_kernel_decay_guard():
    with pytest.raises(ValueError):
        check_kernel_decay(KernelSpec(eta=1, epsilon=0.1, log_t=10.0), F3)
    check_kernel_decay(KS3, F3)


def test_e_series_structure():
    val = e_series(0.0, KS3, F3, 1)
    assert abs(val.imag) < 1e-12
    assert val.real >= kernel_hat_zero_exact(4)  # the (1,1) term alone
    # conjugate symmetry
    a, b = e_series(3.7, KS3, F3, 1), e_series(-3.7, KS3, F3, 1)
    assert abs(a - np.conj(b)) < 1e-12


def test_e_series_degenerate_support():
    tiny = KernelSpec(eta=4, epsilon=0.03, log_t=10.0)  # support 0.6 < log 2
    for ell in (0, 1):
        a1 = 2.0 if ell == 0 else 1.0
        assert abs(e_series(2.5, tiny, F3, ell) - kernel_hat_zero_exact(4) * a1**2) < 1e-12
        assert (
            abs(coefficient_series_single(2.5, tiny, F3, ell, 0.5) - kernel_hat_zero_exact(4) * a1)
            < 1e-12
        )


def test_kernel_derivative_complex():
    # first derivative against a central difference of the entire kernel
    w0 = 2.0 + 0.3j
    h = 1e-5
    fd = (kernel_value(KS3, w0 + h) - kernel_value(KS3, w0 - h)) / (2 * h)
    got = kernel_derivative_complex(KS3, w0, 1)
    assert abs(got - fd) < 1e-8
    assert abs(kernel_derivative_complex(KS3, w0, 0) - kernel_value(KS3, w0)) < 1e-12


def test_residue_tau_ell0_closed_form():
    # at ell = 0 the single residue collapses to c_K K(i sigma - i(1 - it))
    t, sigma = 5.0, 0.5
    rec = residue_tau(t, sigma, KS3, F3, 0, "single")
    w0 = 1j * sigma - 1j * (1.0 - 1j * t)
    expect = dedekind_zeta_residue(F3) * kernel_value(KS3, w0)
    assert abs(rec["value"] - expect) < 1e-9
    assert rec["disagreement"] < 1e-9


def test_residue_tau_conjugate_pairing():
    rec_p = residue_tau(4.0, 0.5, KS3, F3, 1, "plus")
    rec_m = residue_tau(4.0, 0.5, KS3, F3, 1, "minus")
    assert abs(rec_p["value"] - np.conj(rec_m["value"])) < 1e-9
    assert rec_p["disagreement"] < 1e-8


def test_residue_tau_guards():
    with pytest.raises(ValueError):
        residue_tau(0.5, 0.5, KS3, F3, 1, "plus")
    with pytest.raises(ValueError):
        residue_tau(5.0, 0.5, KS3, F3, 1, "sideways")


@pytest.mark.parametrize(
    "t,sigma,field,ell",
    [(5.0, 0.5, F3, 1), (5.0, 0.5, F4, 0)],
)
def test_verify_double_examples(t, sigma, field, ell):
    ks = KernelSpec(eta=2 * field.totient, epsilon=0.15, log_t=10.0)
    rec = verify_double_convolution(t, sigma, ks, field, ell, tol=1e-4)
    assert rec["ok"], rec
    assert rec["abs_error"] <= 1e-6  # comfortably inside the acceptance tol
    assert abs(rec["lhs"].imag) < 1e-8  # two-shift integrand pairs to a real value


@pytest.mark.parametrize(
    "t,sigma,field,ell",
    [(5.0, 0.6, F3, 1), (10.0, 0.5, F4, 2)],
)
def test_verify_single_examples(t, sigma, field, ell):
    ks = KernelSpec(eta=2 * field.totient, epsilon=0.12, log_t=10.0)
    rec = verify_single_convolution(t, sigma, ks, field, ell, tol=1e-4)
    assert rec["ok"], rec
    assert rec["abs_error"] <= 1e-6


def test_verify_degenerate_support():
    tiny = KernelSpec(eta=4, epsilon=0.03, log_t=10.0)
    rec = verify_double_convolution(5.0, 0.5, tiny, F3, 1, tol=1e-4)
    assert rec["ok"]
    rec = verify_single_convolution(5.0, 0.5, tiny, F3, 0, tol=1e-4)
    assert rec["ok"]


def test_residue_needs_zeta_pole_constant():
    """Dropping the zeta_K residue from the pole terms breaks the identity."""
    t, sigma, ell = 5.0, 0.5, 1
    rec = verify_double_convolution(t, sigma, KS3, F3, ell, tol=1e-4)
    c_k = dedekind_zeta_residue(F3)
    tau_wrong = (rec["tau_plus"] + rec["tau_minus"]) / c_k
    wrong_rhs = rec["series"] - tau_wrong
    assert abs(rec["lhs"] - wrong_rhs) > 100 * rec["tol"]
    assert rec["abs_error"] < 1e-6


def test_verify_rejects_t_zero():
    with pytest.raises(ValueError):
        verify_double_convolution(0.0, 0.5, KS3, F3, 1)
