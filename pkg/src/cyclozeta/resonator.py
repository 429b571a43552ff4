"""Resonators and the multiplicative weight machinery.

Two constructions: the binned-frequency resonator over a layered product
set (critical line), and the multiplicative-weight resonator over the
divisor-closed set M_d carved out of supp(f) by per-layer prime-count
thresholds.  Includes the normalized coefficient quantity A_d in both its
double-sum and Euler-product forms and the Rankin-trick diagnostics.

Desk-scale note: the analytic prime ranges are empty for any feasible N,
so prime supports, layer assignments and f values can all be injected;
every identity checked here (A_d equality, divisor closure, the Rankin
bounds) is exact on the injected fragment.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .factored import ONE, FactoredInteger
from .fields import FieldSpec
from .gcdsums import iterated_log, sieve_primes_in_class
from .kernel import gaussian_phi

__all__ = [
    "WeightFunction",
    "Resonator",
    "build_weight",
    "delta_threshold",
    "classify_in_m_d",
    "enumerate_support",
    "build_resonator_critical",
    "build_resonator_weighted",
    "resonator_value",
    "gaussian_moment",
    "a_d_quantity",
    "prop_main_term",
    "rankin_exclusion_diagnostic",
    "small_divisor_tail_diagnostic",
    "sigma_for_depth",
]

VARIANTS = ("near_critical", "mid_strip")


@dataclass(frozen=True)
class WeightFunction:
    """Multiplicative weight f on squarefree products of the primes P_d."""

    sigma: float
    c_d: float
    gamma: float
    alpha_res: float
    n_size: int
    field: FieldSpec
    variant: str
    primes: tuple[int, ...]
    layers: dict  # k -> tuple of primes (the P_{k,d} partition)
    f_values: dict  # p -> f(p) > 0

    def f_of(self, n: FactoredInteger) -> float:
        if n.is_one:
            return 1.0
        out = 1.0
        for p, e in n.factors:
            if e > 1 or p not in self.f_values:
                return 0.0
            out *= self.f_values[p]
        return out


def _weight_value(p, sigma, c_d, n_size, field, variant) -> float:
    log_n = iterated_log(n_size, 1)
    log2_n = iterated_log(n_size, 2)
    log3_n = iterated_log(n_size, 3)
    den = math.log(p) - log2_n - log3_n - math.log(field.totient)
    if den <= 0:
        raise ValueError(
            f"prime {p} rejected: log p must exceed log2 N + log3 N + log phi(d)"
        )
    if variant == "near_critical":
        num = log_n ** (1 - sigma) * log2_n**sigma / log3_n ** (1 - sigma)
    else:
        num = log_n ** (1 - sigma) * log2_n**sigma / log3_n
    return c_d * num / (p**sigma * den)


def build_weight(
    sigma: float,
    c_d: float,
    gamma: float,
    alpha_res: float,
    n_size: int,
    field: FieldSpec,
    variant: str = "near_critical",
    prime_override: list[int] | None = None,
    layer_override: dict | None = None,
    f_override: dict | None = None,
) -> WeightFunction:
    """Tabulate f over P_d (honest ranges, or injected toy supports).

    f_override supplies explicit per-prime values, bypassing the formula;
    that is the desk-scale path, since the formula's denominator forces
    log p beyond log2 N + log3 N + log phi(d).
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must lie in (0, 1)")
    if not (1.0 < alpha_res < 1.0 / gamma):
        raise ValueError("alpha_res must lie in (1, 1/gamma)")
    cd_max = math.sqrt(field.totient / (math.e - 1.0))
    if not (1.0 <= c_d <= cd_max + 1e-12):
        raise ValueError(f"c_d must lie in [1, {cd_max:.6f}] for d = {field.d}")
    log_n = iterated_log(n_size, 1)
    log2_n = iterated_log(n_size, 2)

    if prime_override is not None:
        primes = tuple(sorted(prime_override))
        if any(p % field.d != 1 for p in primes):
            raise ValueError("override primes must be = 1 mod d")
    else:
        lo = math.e * field.totient * log_n * log2_n
        hi = field.totient * log_n * math.exp(log2_n**gamma) * log2_n
        primes = tuple(sieve_primes_in_class(max(2.0, lo), max(lo + 1, hi), field.d))

    if layer_override is not None:
        layers = {int(k): tuple(sorted(v)) for k, v in layer_override.items()}
        assigned = [p for v in layers.values() for p in v]
        if sorted(assigned) != sorted(set(assigned)) or not set(assigned) <= set(primes):
            raise ValueError("layer override must partition a subset of P_d")
    else:
        layers = {}
        kmax = int(log2_n**gamma)
        for k in range(1, kmax + 1):
            lo = math.e**k * field.totient * log_n * log2_n
            hi = math.e ** (k + 1) * field.totient * log_n * log2_n
            layers[k] = tuple(p for p in primes if lo < p <= hi)

    if f_override is not None:
        f_values = {int(p): float(v) for p, v in f_override.items()}
        if set(f_values) != set(primes):
            raise ValueError("f override must cover exactly P_d")
    else:
        f_values = {
            p: _weight_value(p, sigma, c_d, n_size, field, variant) for p in primes
        }
    if any(v <= 0 for v in f_values.values()):
        raise ValueError("f(p) must be positive on P_d")
    return WeightFunction(
        sigma=sigma,
        c_d=c_d,
        gamma=gamma,
        alpha_res=alpha_res,
        n_size=n_size,
        field=field,
        variant=variant,
        primes=primes,
        layers=layers,
        f_values=f_values,
    )


def delta_threshold(weight: WeightFunction, k: int) -> float:
    """The layer-k prime-count threshold separating M_{k,d}."""
    log_n = iterated_log(weight.n_size, 1)
    log3_n = iterated_log(weight.n_size, 3)
    num = weight.alpha_res * log_n ** (2 - 2 * weight.sigma)
    if weight.variant == "near_critical":
        return num / (k * k * log3_n ** (2 - 2 * weight.sigma))
    return num / (k * k * log3_n)


def classify_in_m_d(weight: WeightFunction, n: FactoredInteger) -> bool:
    """True iff n avoids every M_{k,d}: fewer than Delta_k of its prime
    divisors lie in P_{k,d}, for all layers k."""
    if not n.is_squarefree:
        raise ValueError("supp(f) holds squarefree integers only")
    support = n.prime_support()
    if not support <= set(weight.primes):
        raise ValueError("prime support must lie inside P_d")
    for k, layer in weight.layers.items():
        count = len(support & set(layer))
        if count >= delta_threshold(weight, k):
            return False
    return True


def enumerate_support(
    weight: WeightFunction, count_cap: int, log_max: float | None = None
) -> tuple[list[FactoredInteger], bool]:
    """supp(f), breadth-first by number of prime factors, lexicographic
    inside each level; capped by element count and largest log."""
    out: list[FactoredInteger] = []
    truncated = False
    for r in range(len(weight.primes) + 1):
        for combo in itertools.combinations(weight.primes, r):
            m = FactoredInteger.from_factors((p, 1) for p in combo)
            if log_max is not None and m.log_value > log_max:
                continue
            out.append(m)
            if len(out) >= count_cap:
                truncated = True
                break
        if truncated:
            break
    return out, truncated


@dataclass(frozen=True)
class Resonator:
    """R(t) = sum r(h) h^{-it} over binned frequencies."""

    variant: str
    ratio: float  # bins are powers of 1 + logT/T
    log_freqs: tuple[float, ...]
    weights: tuple[float, ...]
    freq_ints: tuple  # exact integer when < 2**63, else the factored line

    @property
    def r0(self) -> float:
        return float(math.fsum(self.weights))

    def to_json(self) -> str:
        return json.dumps(
            {
                "variant": self.variant,
                "ratio": self.ratio,
                "entries": [
                    {"h": h, "log_h": lh, "r": r}
                    for h, lh, r in zip(self.freq_ints, self.log_freqs, self.weights)
                ],
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(text: str) -> "Resonator":
        obj = json.loads(text)
        entries = obj["entries"]
        return Resonator(
            variant=obj["variant"],
            ratio=obj["ratio"],
            log_freqs=tuple(e["log_h"] for e in entries),
            weights=tuple(e["r"] for e in entries),
            freq_ints=tuple(e["h"] for e in entries),
        )


def _freq_repr(m: FactoredInteger):
    value = m.to_int()
    return value if value < 2**63 else m.format_line()


def _bin_index(log_value: float, log_ratio: float) -> int:
    return int(math.floor(log_value / log_ratio + 1e-12))


def build_resonator_critical(elements, big_t: float) -> Resonator:
    """Bin a product set by ratio 1 + logT/T; one frequency per nonempty
    bin (its minimum), weight sqrt(bin count)."""
    if not elements:
        raise ValueError("empty frequency set")
    if big_t <= math.e:
        raise ValueError("T must exceed e")
    elems = [
        m if isinstance(m, FactoredInteger) else FactoredInteger.from_int(int(m))
        for m in elements
    ]
    ratio = 1.0 + math.log(big_t) / big_t
    log_ratio = math.log(ratio)
    bins: dict[int, list[FactoredInteger]] = {}
    for m in elems:
        bins.setdefault(_bin_index(m.log_value, log_ratio), []).append(m)
    log_freqs, weights, reprs = [], [], []
    for j in sorted(bins):
        members = bins[j]
        h = min(members)
        log_freqs.append(h.log_value)
        weights.append(math.sqrt(len(members)))
        reprs.append(_freq_repr(h))
    return Resonator(
        variant="critical",
        ratio=ratio,
        log_freqs=tuple(log_freqs),
        weights=tuple(weights),
        freq_ints=tuple(reprs),
    )


def build_resonator_weighted(
    weight: WeightFunction, big_t: float, support_cap: int
) -> Resonator:
    """Weighted resonator over M_d: frequencies are bin minima of M_d,
    r(m_j)^2 sums f(n)^2 over the three-bin window around bin j."""
    if big_t <= math.e:
        raise ValueError("T must exceed e")
    support, truncated = enumerate_support(weight, support_cap)
    members = [n for n in support if classify_in_m_d(weight, n)]
    if not members:
        raise ValueError("empty support after the M_d restriction")
    ratio = 1.0 + math.log(big_t) / big_t
    log_ratio = math.log(ratio)
    bins: dict[int, list[FactoredInteger]] = {}
    f2: dict[int, float] = {}
    for n in members:
        j = _bin_index(n.log_value, log_ratio)
        bins.setdefault(j, []).append(n)
        f2[j] = f2.get(j, 0.0) + weight.f_of(n) ** 2
    log_freqs, weights, reprs = [], [], []
    for j in sorted(bins):
        h = min(bins[j])
        # window (1 + logT/T)^(j-1) <= n <= (1 + logT/T)^(j+2): bins j-1..j+1
        mass = f2.get(j - 1, 0.0) + f2.get(j, 0.0) + f2.get(j + 1, 0.0)
        log_freqs.append(h.log_value)
        weights.append(math.sqrt(mass))
        reprs.append(_freq_repr(h))
    return Resonator(
        variant="weighted",
        ratio=ratio,
        log_freqs=tuple(log_freqs),
        weights=tuple(weights),
        freq_ints=tuple(reprs),
    )


def resonator_value(res: Resonator, t):
    """R(t) = sum r(h) exp(-i t log h), scalar or array t."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    logh = np.array(res.log_freqs)
    r = np.array(res.weights)
    out = (r[None, :] * np.exp(-1j * np.outer(t_arr, logh))).sum(axis=1)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return complex(out[0])
    return out


def gaussian_moment(res: Resonator, big_t: float, step: float) -> dict:
    """integral of |R(t)|^2 Phi(t logT / T) dt, two independent ways.

    Quadrature on a uniform grid (trapezoid; the grid must resolve the
    fastest oscillation: step <= pi / log h_max) against the closed-form
    pairwise evaluation sqrt(2 pi) (T/logT) sum r r' Phi((T/logT) log(h/h')).
    """
    log_hmax = max(res.log_freqs)
    if log_hmax > 0 and step > math.pi / log_hmax:
        raise ValueError(f"step {step} too coarse; need <= {math.pi / log_hmax:.6f}")
    scale = big_t / math.log(big_t)
    half = 9.0 * scale

    def quad(h: float) -> float:
        t = np.arange(-half, half + h, h)
        vals = np.abs(resonator_value(res, t)) ** 2 * gaussian_phi(t / scale)
        return float(np.trapezoid(vals, dx=h))

    q1, q2 = quad(step), quad(step / 2.0)
    if abs(q2 - q1) > 1e-7 * max(1.0, abs(q2)):
        raise ValueError(f"step {step} too coarse: refinement moved {abs(q2 - q1):.3e}")
    logh = np.array(res.log_freqs)
    r = np.array(res.weights)
    gaps = scale * (logh[:, None] - logh[None, :])
    closed = math.sqrt(2.0 * math.pi) * scale * float(
        (r[:, None] * r[None, :] * gaussian_phi(gaps)).sum()
    )
    return {"quadrature": q2, "closed_form": closed}


def a_d_quantity(weight: WeightFunction, mode: str, support_cap: int = 1 << 20) -> dict:
    """A_d: normalized double-sum form or Euler-product form.

    The two agree exactly when supp(f) is fully enumerated; a truncated
    sum is flagged and is a lower bound.
    """
    sigma = weight.sigma
    phi = weight.field.totient
    if mode == "product_form":
        value = 1.0
        for p in weight.primes:
            fp = weight.f_values[p]
            value *= (1.0 + fp * fp + phi * fp * p**-sigma) / (1.0 + fp * fp)
        return {"mode": mode, "value": value, "truncated": False}
    if mode != "sum_form":
        raise ValueError("mode must be sum_form or product_form")
    support, truncated = enumerate_support(weight, support_cap)
    norm = math.fsum(weight.f_of(n) ** 2 for n in support)
    total = 0.0
    for n in support:
        fn = weight.f_of(n)
        n_val = math.exp(sigma * n.log_value)
        inner = 0.0
        divisors = [
            FactoredInteger.from_factors((p, 1) for p in combo)
            for r in range(n.omega + 1)
            for combo in itertools.combinations([p for p, _ in n.factors], r)
        ]
        for q in divisors:
            cof = n.divide_exact(q)
            inner += (
                phi ** cof.omega
                * weight.f_of(q)
                * math.exp(sigma * q.log_value)
            )
        total += fn / n_val * inner
    return {"mode": mode, "value": total / norm, "truncated": truncated}


def prop_main_term(weight: WeightFunction, delta_param: float) -> float:
    """Leading-order comparison curve for the weighted construction."""
    if not (0.0 < delta_param < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    log_n = iterated_log(weight.n_size, 1)
    log2_n = iterated_log(weight.n_size, 2)
    log3_n = iterated_log(weight.n_size, 3)
    s = weight.sigma
    return math.exp(
        delta_param
        * weight.gamma
        * weight.c_d
        * log_n ** (1 - s)
        * log3_n**s
        / log2_n**s
    )


def rankin_exclusion_diagnostic(weight: WeightFunction, b: float) -> list[dict]:
    """Per-layer Rankin bound b^-Delta_k exp((b-1) sum f(p)^2) against the
    exact normalized mass of the all-in-layer excluded set."""
    if b <= 1.0:
        raise ValueError("Rankin parameter b must exceed 1")
    out = []
    for k in sorted(weight.layers):
        layer = weight.layers[k]
        delta_k = delta_threshold(weight, k)
        fsq = [weight.f_values[p] ** 2 for p in layer]
        bound = b**-delta_k * math.exp((b - 1.0) * math.fsum(fsq))
        norm = 1.0
        for v in fsq:
            norm *= 1.0 + v
        exact = 0.0
        for r in range(len(layer) + 1):
            if r < delta_k:
                continue
            for combo in itertools.combinations(range(len(layer)), r):
                term = 1.0
                for i in combo:
                    term *= fsq[i]
                exact += term
        exact /= norm
        out.append(
            {
                "k": k,
                "delta_k": delta_k,
                "rankin_bound": bound,
                "exact_excluded": exact,
                "holds": exact <= bound * (1.0 + 1e-12),
            }
        )
    return out


def small_divisor_tail_diagnostic(
    weight: WeightFunction,
    eta: int,
    eps: float,
    n_param: float,
    support_cap: int = 4096,
) -> dict:
    """Exact small-divisor tail sum against its Rankin majorant, per n in M_d.

    tail(n) = sum over q | n with q >= N^(eps/3 eta) of a_K(q)/(f(q) q^sigma);
    majorant(n) = N^(-eps/12 eta) prod over p | n of (1 + phi/(f(p) p^(sigma-1/4))).
    """
    sigma = weight.sigma
    phi = weight.field.totient
    threshold_log = (eps / (3.0 * eta)) * math.log(n_param)
    shrink = n_param ** (-eps / (12.0 * eta))
    support, _ = enumerate_support(weight, support_cap)
    rows = []
    for n in support:
        if not classify_in_m_d(weight, n):
            continue
        primes = [p for p, _ in n.factors]
        tail = 0.0
        for r in range(len(primes) + 1):
            for combo in itertools.combinations(primes, r):
                logq = math.fsum(math.log(p) for p in combo)
                if logq < threshold_log:
                    continue
                fq = 1.0
                for p in combo:
                    fq *= weight.f_values[p]
                tail += phi ** len(combo) / (fq * math.exp(sigma * logq))
        majorant = shrink
        for p in primes:
            majorant *= 1.0 + phi / (weight.f_values[p] * p ** (sigma - 0.25))
        rows.append(
            {
                "n": n.format_line(),
                "tail": tail,
                "majorant": majorant,
                "holds": tail <= majorant * (1.0 + 1e-12),
            }
        )
    return {"rows": rows, "all_hold": all(r["holds"] for r in rows)}


def sigma_for_depth(depth: float, big_t: float) -> float:
    """The near-critical abscissa 1/2 + D / log2 T."""
    if depth <= 0:
        raise ValueError("depth must be positive")
    return 0.5 + depth / iterated_log(big_t, 2)
