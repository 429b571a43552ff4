"""Layered extremal sets and exact GCD sums.

Builds the per-layer prime sets P_k and element sets M_k, their product
set M, and evaluates the plain and coefficient-weighted GCD double sums
together with the diagnostic quantities of the lower-bound construction
(restricted divisor sums, the layer quantities u_k/H/h/rho, and the
leading-order comparison curve).

All set elements are FactoredInteger; pairwise sums run on exponent
matrices through the active backend and are accumulated exactly (fsum),
so results do not depend on how rows are partitioned across workers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import backend
from .factored import ONE, FactoredInteger
from .fields import FieldSpec

__all__ = [
    "LayeredSetParams",
    "Layer",
    "iterated_log",
    "sieve_primes_in_class",
    "build_layer",
    "build_product_set",
    "gcd_sum_generic",
    "gcd_sum_weighted",
    "layer_product_identity_check",
    "sigma_restricted",
    "appendix_quantities",
    "asymptotic_lower_bound",
    "export_set",
    "import_set",
    "sum_report",
]

# enumeration guard for fully expanded product sets
DEFAULT_GLOBAL_CAP = 200_000
# sieve refuses ranges whose expected output would not fit in memory
MAX_SIEVE_PRIMES = 50_000_000


def iterated_log(x: float, j: int) -> float:
    """log_j(x): log applied j times; rejects x where any iterated log <= 1."""
    for _ in range(j):
        if x <= 1.0:
            raise ValueError(f"iterated log hit a value <= 1 (got {x})")
        x = math.log(x)
    if x <= 1.0:
        raise ValueError(f"iterated log produced a value <= 1 (got {x})")
    return x


def sieve_primes_in_class(lo: float, hi: float, d: int) -> list[int]:
    """All primes p in (lo, hi] with p = 1 (mod d), ascending."""
    if not (2 <= lo < hi <= 1e10):
        raise ValueError("need 2 <= lo < hi <= 1e10")
    estimate = (hi - lo) / max(1.0, math.log(hi)) / max(1, d - 1)
    if estimate > MAX_SIEVE_PRIMES:
        raise MemoryError(
            f"range (%g, %g] would hold ~%d qualifying primes; "
            f"split it into segments of at most ~%g" % (lo, hi, estimate, 1e9)
        )
    lo_i, hi_i = int(math.floor(lo)), int(math.floor(hi))
    base = _simple_sieve(int(math.isqrt(hi_i)) + 1)
    out: list[int] = []
    seg = 1 << 22
    start = max(2, lo_i + 1)
    while start <= hi_i:
        stop = min(start + seg, hi_i + 1)
        mask = np.ones(stop - start, dtype=bool)
        for p in base:
            if p * p >= stop:
                break
            first = max(p * p, ((start + p - 1) // p) * p)
            mask[first - start :: p] = False
        for n in np.flatnonzero(mask):
            val = start + int(n)
            if val > 1 and val % d == 1 % d:
                out.append(val)
        start = stop
    return out


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@dataclass(frozen=True)
class LayeredSetParams:
    """Construction parameters (N, alpha, beta, delta) over a field."""

    n_size: int
    alpha: float
    beta: float
    delta: float
    field: FieldSpec

    def __post_init__(self):
        if not (1.0 < self.alpha < math.e):
            raise ValueError("alpha must lie in (1, e)")
        if self.beta <= 1.0:
            raise ValueError("beta must exceed 1")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.beta * self.delta * math.log(self.alpha) >= 1.0:
            raise ValueError("parameters must satisfy beta*delta*log(alpha) < 1")

    @property
    def max_layer(self) -> int:
        return int(iterated_log(self.n_size, 2) ** self.delta)

    def layer_width(self, k: int) -> int:
        log_n = iterated_log(self.n_size, 1)
        log3_n = iterated_log(self.n_size, 3)
        return 2 * int(self.beta * log_n / (2 * k * k * log3_n))

    def prime_range(self, k: int) -> tuple[float, float]:
        log_n = iterated_log(self.n_size, 1)
        log2_n = iterated_log(self.n_size, 2)
        base = self.field.totient * log_n * log2_n
        return (base * self.alpha**k, base * self.alpha ** (k + 1))


@dataclass
class Layer:
    k: int
    primes: list[int]
    width: int  # the even bound W_k on omega(l) + omega(q)
    product: FactoredInteger  # W = prod of the layer primes
    elements: list[FactoredInteger]
    truncated: bool = False
    empty_range: bool = False


def build_layer(
    params: LayeredSetParams,
    k: int,
    cap: int,
    prime_override: list[int] | None = None,
    width_override: int | None = None,
) -> Layer:
    """Enumerate M_k = { (l/q) W : l q | W, omega(l), omega(q) <= W_k/2 }.

    Elements come out in lexicographic (omega(q), omega(l), factor list)
    order, so the full product W is always first; `cap` truncates the
    enumeration and sets the flag.  `prime_override` and `width_override`
    replace the analytic prime range and W_k for desk-scale runs where
    that range holds no primes.
    """
    if not (1 <= k <= max(1, params.max_layer)):
        raise ValueError(f"layer index {k} outside 1..{params.max_layer}")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if prime_override is not None:
        primes = sorted(prime_override)
        if any(p % params.field.d != 1 for p in primes):
            raise ValueError("override primes must be = 1 mod d")
    else:
        lo, hi = params.prime_range(k)
        primes = sieve_primes_in_class(max(2.0, lo), hi, params.field.d)
    if width_override is not None:
        if width_override < 0 or width_override % 2:
            raise ValueError("width override must be even and >= 0")
        width = width_override
    else:
        width = params.layer_width(k)
    if not primes:
        return Layer(k, [], width, ONE, [], empty_range=True)

    w_full = FactoredInteger.from_factors((p, 1) for p in primes)
    half = width // 2
    elements: list[FactoredInteger] = []
    truncated = False
    for nq in range(0, half + 1):
        for nl in range(0, half + 1):
            for q_set in itertools.combinations(primes, nq):
                rest = [p for p in primes if p not in q_set]
                for l_set in itertools.combinations(rest, nl):
                    factors = []
                    for p in primes:
                        if p in q_set:
                            continue
                        factors.append((p, 2 if p in l_set else 1))
                    elements.append(FactoredInteger.from_factors(factors))
                    if len(elements) >= cap:
                        truncated = True
                        break
                if truncated:
                    break
            if truncated:
                break
        if truncated:
            break
    if truncated:
        # count what a full enumeration would have produced
        n = len(primes)
        total = sum(
            math.comb(n, i) * math.comb(n - i, j)
            for i in range(half + 1)
            for j in range(half + 1)
        )
        truncated = total > len(elements)
    return Layer(k, primes, width, w_full, elements, truncated=truncated)


def build_product_set(
    layers: list[Layer], global_cap: int = DEFAULT_GLOBAL_CAP
) -> list[FactoredInteger]:
    """All products prod_k m_k with m_k from each layer's element list."""
    size = 1
    for layer in layers:
        size *= max(1, len(layer.elements))
    if size > global_cap:
        raise ValueError(
            f"product set would hold {size} elements (cap {global_cap})"
        )
    out = [ONE]
    for layer in layers:
        if not layer.elements:
            continue
        out = [m * e for m in out for e in layer.elements]
    return out


def _support_union(elements: list[FactoredInteger]) -> list[int]:
    primes: set[int] = set()
    for m in elements:
        primes.update(p for p, _ in m.factors)
    return sorted(primes)


def _exponent_matrix(elements, primes) -> np.ndarray:
    index = {p: i for i, p in enumerate(primes)}
    mat = np.zeros((len(elements), len(primes)), dtype=np.int64)
    for row, m in enumerate(elements):
        for p, e in m.factors:
            mat[row, index[p]] = e
    return mat


def _pair_sum(elements, sigma, aktab_fn) -> float:
    if not elements:
        raise ValueError("empty set")
    if len(set(elements)) != len(elements):
        raise ValueError("set elements must be distinct")
    primes = _support_union(elements)
    mat = _exponent_matrix(elements, primes)
    emax = int(mat.max(initial=0))
    logp = np.array([math.log(p) for p in primes], dtype=np.float64)
    aktab = np.ones((max(1, len(primes)), emax + 1), dtype=np.float64)
    for i, p in enumerate(primes):
        for e in range(emax + 1):
            aktab[i, e] = aktab_fn(p, e)
    rows = backend.gcd_pair_rows(mat, logp, aktab, float(sigma))
    return len(elements) + 2.0 * math.fsum(rows)


def gcd_sum_generic(elements: list[FactoredInteger], sigma: float) -> float:
    """S_sigma(M) = sum over pairs of ((m,n)/[m,n])^sigma."""
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1]")
    return _pair_sum(elements, sigma, lambda p, e: 1.0)


def gcd_sum_weighted(
    elements: list[FactoredInteger], sigma: float, field: FieldSpec
) -> float:
    """S_sigma(M, a_K): quotients weighted by the field coefficients."""
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1]")
    return _pair_sum(
        elements, sigma, lambda p, e: float(field.coefficient_prime_power(p, e))
    )


def layer_product_identity_check(
    layers: list[Layer],
    sigma: float,
    field: FieldSpec,
    global_cap: int = DEFAULT_GLOBAL_CAP,
) -> tuple[float, float]:
    """(lhs, rhs) of the product identity: weighted sum over the product
    set versus the product of per-layer weighted sums."""
    seen: set[int] = set()
    for layer in layers:
        support = set(layer.primes)
        if seen & support:
            raise ValueError("layers must have pairwise disjoint prime supports")
        seen |= support
    product_set = build_product_set(layers, global_cap)
    lhs = gcd_sum_weighted(product_set, sigma, field)
    rhs = 1.0
    for layer in layers:
        if layer.elements:
            rhs *= gcd_sum_weighted(layer.elements, sigma, field)
    return lhs, rhs


def sigma_restricted(
    field: FieldSpec, w: FactoredInteger, r_bound: int, coprime_to: FactoredInteger = ONE
) -> float:
    """sum of a_K(n)/sqrt(n) over n | W with omega(n) <= R, gcd(n, r) = 1.

    W must be squarefree; computed through elementary symmetric sums of
    the per-prime values, never by divisor enumeration.
    """
    if not w.is_squarefree:
        raise ValueError("W must be squarefree")
    if r_bound < 0:
        raise ValueError("R must be >= 0")
    excluded = coprime_to.prime_support()
    values = [
        field.coefficient_prime_power(p, 1) / math.sqrt(p)
        for p, _ in w.factors
        if p not in excluded
    ]
    # e_j via the one-prime-at-a-time DP, truncated at degree R
    esym = [1.0] + [0.0] * min(r_bound, len(values))
    for v in values:
        for j in range(min(r_bound, len(esym) - 1), 0, -1):
            esym[j] += v * esym[j - 1]
    return math.fsum(esym)


def appendix_quantities(params: LayeredSetParams, k: int, nu: float) -> dict:
    """Closed-form layer quantities u_k, w_k, H, h, rho at finite parameters.

    Also reports the optimizing nu* = sqrt(h)/e with rho(nu*) = 4 delta
    sqrt(h)/e.  When h <= nu^2 the log in rho goes negative; the value is
    returned as-is with a flag.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    log_n = iterated_log(params.n_size, 1)
    log2_n = iterated_log(params.n_size, 2)
    log3_n = iterated_log(params.n_size, 3)
    phi = params.field.totient
    sqrt_alpha = math.sqrt(params.alpha)
    u_k = int((nu / k) * math.sqrt(log_n / (log2_n * log3_n)))
    h = math.e**2 * params.beta * phi * (sqrt_alpha - 1) / (sqrt_alpha + 1)
    big_h = (
        2 * k * math.e * math.sqrt(phi) * (sqrt_alpha - 1) * params.alpha ** (k / 2)
        * math.sqrt(log3_n) / nu
    )
    rho = 2 * params.delta * nu * math.log(h / nu**2) if h > 0 else float("-inf")
    nu_star = math.sqrt(h) / math.e
    return {
        "u_k": u_k,
        "w_k": params.layer_width(k),
        "H": big_h,
        "h": h,
        "rho": rho,
        "nu_star": nu_star,
        "rho_star": 4 * params.delta * math.sqrt(h) / math.e,
        "log_negative": h <= nu**2,
    }


def asymptotic_lower_bound(n_size: float, field: FieldSpec) -> float:
    """Leading-order comparison curve exp(2 sqrt(phi(d) log N log3 N / log2 N))."""
    if n_size < math.exp(math.exp(math.e)):
        raise ValueError("N too small for the iterated logarithms")
    log_n = math.log(n_size)
    log2_n = math.log(log_n)
    log3_n = math.log(log2_n)
    return math.exp(
        2.0 * math.sqrt(field.totient) * math.sqrt(log_n * log3_n / log2_n)
    )


def export_set(elements: list[FactoredInteger]) -> str:
    return "\n".join(m.format_line() for m in elements) + "\n"


def import_set(text: str) -> list[FactoredInteger]:
    return [
        FactoredInteger.parse_line(line)
        for line in text.splitlines()
        if line.strip()
    ]


def sum_report(
    sigma: float, field: FieldSpec, elements, value: float, truncated: bool
) -> dict:
    """JSON-ready record for one GCD-sum evaluation."""
    return {
        "sigma": sigma,
        "d": field.d,
        "set_size": len(elements),
        "value": value,
        "truncated": bool(truncated),
    }
