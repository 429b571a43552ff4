"""Arithmetic of the cyclotomic field Q(omega_d).

Builds the full Dirichlet character table mod d (with conductors and the
primitive characters inducing them), computes how rational primes split in
the field, and produces the coefficient sequences of the attached Dirichlet
series: a_K(n), the derivative-weighted a(n), and the auxiliary a'_K(n).

Character values are stored as exact root-of-unity indices (an integer k
with chi(x) = exp(2*pi*i*k/m)); they are converted to complex floats only
at evaluation time, which keeps the character-convolution oracle exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache

import numpy as np

__all__ = [
    "FieldSpec",
    "DirichletCharacter",
    "SplittingProfile",
    "euler_totient",
    "multiplicative_order",
    "splitting_profile",
    "compositions_count",
    "dedekind_coefficient",
    "dedekind_coefficient_table",
    "coefficients_via_characters",
    "g_coefficient",
    "g_coefficient_table",
    "weight_aprime",
    "factorize",
]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as a sorted list of (p, e) pairs."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    # trial division over 6k +- 1
    while p * p <= n:
        for q in (p, p + 2):
            if n % q == 0:
                e = 0
                while n % q == 0:
                    n //= q
                    e += 1
                out.append((q, e))
        p += 6
    if n > 1:
        out.append((n, 1))
    return out


def euler_totient(d: int) -> int:
    if d < 1:
        raise ValueError("totient needs d >= 1")
    phi = 1
    for p, e in factorize(d):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def multiplicative_order(p: int, m: int) -> int:
    """Least f >= 1 with p**f == 1 (mod m); requires gcd(p, m) == 1."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    if m == 1:
        return 1
    if math.gcd(p, m) != 1:
        raise ValueError(f"gcd({p}, {m}) != 1: order undefined")
    # order divides the group exponent; walk divisors of phi(m)
    phi = euler_totient(m)
    order = phi
    for q, _ in factorize(phi):
        while order % q == 0 and pow(p, order // q, m) == 1:
            order //= q
    return order


def _primitive_root_prime_power(q: int, p: int, e: int) -> int:
    """Primitive root mod q = p**e for odd p (also handles q in {2, 4})."""
    if q == 2:
        return 1
    if q == 4:
        return 3
    phi_p = p - 1
    prime_divs = [r for r, _ in factorize(phi_p)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // r, p) != 1 for r in prime_divs):
            g = cand
            break
    assert g is not None
    if e == 1:
        return g
    # lift to p**e: g works unless g^(p-1) == 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _unit_group_generators(d: int) -> list[tuple[int, int]]:
    """CRT-lifted generators (g, order) of the cyclic factors of (Z/dZ)*."""
    factors = factorize(d)
    gens = []
    for p, e in factors:
        q = p**e
        cof = d // q
        locals_ = []
        if p == 2 and e >= 3:
            locals_ = [(q - 1, 2), (5, 2 ** (e - 2))]
        elif p == 2 and e == 2:
            locals_ = [(3, 2)]
        elif p == 2 and e == 1:
            locals_ = []
        else:
            locals_ = [(_primitive_root_prime_power(q, p, e), euler_totient(q))]
        for g, order in locals_:
            if cof == 1:
                gens.append((g % d, order))
            else:
                # x = g mod q, x = 1 mod d/q
                inv = pow(cof, -1, q)
                x = (1 + cof * ((g - 1) * inv % q)) % d
                gens.append((x, order))
    return gens


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod d with exact root-of-unity values.

    value_index[x] is k such that chi(x) = exp(2*pi*i*k/order_den), or -1
    when gcd(x, d) > 1.  The inducing primitive character is stored the
    same way modulo the conductor.
    """

    modulus: int
    order_den: int
    value_index: tuple[int, ...]
    conductor: int
    primitive_index: tuple[int, ...]

    @property
    def is_principal(self) -> bool:
        return all(k <= 0 for k in self.value_index)

    def __call__(self, n: int) -> complex:
        k = self.value_index[n % self.modulus]
        if k < 0:
            return 0j
        return cmath.exp(2j * cmath.pi * k / self.order_den)

    def primitive_value(self, n: int) -> complex:
        """chi*(n), the value of the inducing primitive character."""
        k = self.primitive_index[n % self.conductor]
        if k < 0:
            return 0j
        return cmath.exp(2j * cmath.pi * k / self.order_den)

    def primitive_value_array(self, nmax: int) -> np.ndarray:
        """chi*(n) for n = 0..nmax as complex128."""
        idx = np.array(self.primitive_index, dtype=np.int64)
        k = idx[np.arange(nmax + 1) % self.conductor]
        vals = np.exp(2j * np.pi * k / self.order_den)
        vals[k < 0] = 0.0
        return vals


def _build_characters(d: int) -> tuple[DirichletCharacter, ...]:
    gens = _unit_group_generators(d)
    orders = [n for _, n in gens]
    exponent = math.lcm(*orders) if orders else 1
    phi = euler_totient(d)

    # discrete log of every unit w.r.t. the generator tuple
    units = [x for x in range(d) if math.gcd(x, d) == 1] if d > 1 else [0]
    dlog: dict[int, tuple[int, ...]] = {}
    if d == 1:
        dlog[0] = ()
    else:
        # enumerate the whole group as products of generator powers
        reps = [1]
        exps = [()]
        for g, n in gens:
            new_reps, new_exps = [], []
            for r, e in zip(reps, exps):
                cur = r
                for a in range(n):
                    new_reps.append(cur)
                    new_exps.append(e + (a,))
                    cur = (cur * g) % d
            reps, exps = new_reps, new_exps
        for r, e in zip(reps, exps):
            dlog[r] = e
        assert len(dlog) == phi, "unit group enumeration incomplete"

    divisors = sorted(
        c for c in range(1, d + 1) if d % c == 0
    )

    chars = []
    # all tuples (k_i) with k_i mod n_i
    ktuples = [()]
    for _, n in gens:
        ktuples = [t + (k,) for t in ktuples for k in range(n)]
    for kt in ktuples:
        value_index = [-1] * d
        if d == 1:
            value_index = [0]
        else:
            for x, a in dlog.items():
                acc = 0
                for k_i, a_i, n_i in zip(kt, a, orders):
                    acc = (acc + k_i * a_i * (exponent // n_i)) % exponent
                value_index[x] = acc
        # conductor: least c | d with chi trivial on units = 1 mod c
        conductor = d
        for c in divisors:
            ok = all(
                value_index[x] == 0
                for x in dlog
                if x % c == 1 % c
            )
            if ok:
                conductor = c
                break
        # primitive character table mod conductor
        prim = [-1] * conductor
        if conductor == 1:
            prim = [0]
        else:
            for y in range(conductor):
                if math.gcd(y, conductor) != 1:
                    continue
                x = y
                while math.gcd(x, d) != 1:
                    x += conductor
                prim[y] = value_index[x % d]
        chars.append(
            DirichletCharacter(
                modulus=d,
                order_den=exponent,
                value_index=tuple(value_index),
                conductor=conductor,
                primitive_index=tuple(prim),
            )
        )
    assert len(chars) == phi
    return tuple(chars)


@dataclass(frozen=True)
class SplittingProfile:
    """Splitting data (e, f, r) of a rational prime: e*f*r = phi(d)."""

    p: int
    e: int
    f: int
    r: int


@dataclass(frozen=True)
class FieldSpec:
    """The cyclotomic field Q(omega_d) with its character table."""

    d: int
    totient: int
    characters: tuple[DirichletCharacter, ...]
    _split_cache: dict = dataclass_field(default_factory=dict, repr=False, compare=False)

    @staticmethod
    @lru_cache(maxsize=None)
    def make(d: int) -> "FieldSpec":
        if d < 3:
            raise ValueError("cyclotomy modulus must be >= 3")
        return FieldSpec(d=d, totient=euler_totient(d), characters=_build_characters(d))

    @property
    def nonprincipal(self) -> tuple[DirichletCharacter, ...]:
        return tuple(c for c in self.characters if not c.is_principal)

    def splitting(self, p: int) -> SplittingProfile:
        prof = self._split_cache.get(p)
        if prof is None:
            prof = splitting_profile(p, self)
            self._split_cache[p] = prof
        return prof

    def coefficient_prime_power(self, p: int, k: int) -> int:
        """a_K(p**k) from the splitting profile of p."""
        prof = self.splitting(p)
        if k % prof.f != 0:
            return 0
        return compositions_count(k // prof.f, prof.r)


def splitting_profile(p: int, field: FieldSpec) -> SplittingProfile:
    d = field.d
    if d % p != 0:
        f = multiplicative_order(p, d)
        return SplittingProfile(p=p, e=1, f=f, r=field.totient // f)
    # ramified: d = p^alpha * m with p coprime to m
    m = d
    alpha = 0
    while m % p == 0:
        m //= p
        alpha += 1
    e = euler_totient(p**alpha)
    f = 1 if m == 1 else multiplicative_order(p, m)
    return SplittingProfile(p=p, e=e, f=f, r=euler_totient(m) // f)


def compositions_count(j: int, r: int) -> int:
    """Ways to write j as an ordered sum of r non-negative integers."""
    if j < 0 or r < 1:
        raise ValueError("need j >= 0 and r >= 1")
    return math.comb(j + r - 1, r - 1)


def dedekind_coefficient(n: int, field: FieldSpec) -> int:
    """a_K(n): multiplicative, a_K(p^k) counts prime-ideal factorizations."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = 1
    for p, e in factorize(n):
        out *= field.coefficient_prime_power(p, e)
        if out == 0:
            return 0
    return out


def _smallest_prime_factor_sieve(nmax: int) -> np.ndarray:
    spf = np.zeros(nmax + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, nmax + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def dedekind_coefficient_table(field: FieldSpec, nmax: int) -> np.ndarray:
    """a_K(n) for n = 0..nmax (index 0 unused, set to 0)."""
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    spf = _smallest_prime_factor_sieve(nmax)
    table = np.zeros(nmax + 1, dtype=np.int64)
    table[1] = 1
    pp_cache: dict[tuple[int, int], int] = {}
    for n in range(2, nmax + 1):
        p = int(spf[n])
        m = n
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        key = (p, e)
        coeff = pp_cache.get(key)
        if coeff is None:
            coeff = field.coefficient_prime_power(p, e)
            pp_cache[key] = coeff
        table[n] = coeff * table[m]
    return table


def coefficients_via_characters(
    field: FieldSpec, nmax: int, tol: float = 1e-6
) -> np.ndarray:
    """Independent oracle for a_K via the L-function factorization.

    Convolves the all-ones sequence (zeta) with chi*(n) for every
    non-principal chi mod d.  Raises if any resulting value is farther
    than tol from a non-negative integer.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    coeffs = np.ones(nmax + 1, dtype=np.complex128)
    coeffs[0] = 0.0
    for chi in field.nonprincipal:
        b = chi.primitive_value_array(nmax)
        b[0] = 0.0
        out = np.zeros(nmax + 1, dtype=np.complex128)
        for i in range(1, nmax + 1):
            ci = coeffs[i]
            if ci == 0.0:
                continue
            jmax = nmax // i
            out[i::i] += ci * b[1 : jmax + 1]
        coeffs = out
    rounded = np.rint(coeffs.real).astype(np.int64)
    dev = np.abs(coeffs - rounded)
    dev[0] = 0.0
    worst = float(dev.max())
    if worst > tol or rounded.min() < 0:
        raise ArithmeticError(
            f"character convolution did not yield clean integers "
            f"(worst deviation {worst:.3e})"
        )
    return rounded


def g_coefficient(n: int, field: FieldSpec, ell: int) -> float:
    """Coefficient a(n) of the derivative-augmented series.

    a(n) = a_K(n) * (log n)^ell for n >= 3; the n = 1, 2 coefficients pick
    up the extra 1 + a_K(2) 2^{-s} terms of the defining function (at
    ell = 0 this makes a(1) = 2).
    """
    if n < 1 or ell < 0:
        raise ValueError("need n >= 1 and ell >= 0")
    if n == 1:
        return 2.0 if ell == 0 else 1.0
    ak = dedekind_coefficient(n, field)
    if n == 2:
        return ak + ak * math.log(2.0) ** ell
    return ak * math.log(n) ** ell


def g_coefficient_table(field: FieldSpec, nmax: int, ell: int) -> np.ndarray:
    """a(n) for n = 0..nmax (index 0 unused)."""
    ak = dedekind_coefficient_table(field, nmax)
    n = np.arange(nmax + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        logs = np.log(n)
    logs[0] = 0.0
    out = ak * logs**ell
    out[1] = 2.0 if ell == 0 else 1.0
    if nmax >= 2:
        out[2] = ak[2] + ak[2] * math.log(2.0) ** ell
    return out


def weight_aprime(n: int, field: FieldSpec) -> float:
    """a'_K(n) = ((phi(d)+1)/2)^omega(n) on squarefree n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    factors = factorize(n)
    if any(e > 1 for _, e in factors):
        raise ValueError(f"{n} is not squarefree")
    return ((field.totient + 1) / 2.0) ** len(factors)
