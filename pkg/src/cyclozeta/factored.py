"""Integers kept in fully factored form.

Elements of the layered product sets are far too large for fixed-width
integers (the layer product W alone overflows), so every element is a
sorted (prime, exponent) list with its log-magnitude cached.  gcd, lcm
and exact division are componentwise on exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

__all__ = ["FactoredInteger", "ONE"]


@total_ordering
@dataclass(frozen=True)
class FactoredInteger:
    factors: tuple[tuple[int, int], ...]
    log_value: float

    @staticmethod
    def from_factors(factors) -> "FactoredInteger":
        factors = tuple(sorted((int(p), int(e)) for p, e in factors if e != 0))
        if any(e < 0 for _, e in factors):
            raise ValueError("negative exponent")
        primes = [p for p, _ in factors]
        if len(set(primes)) != len(primes):
            raise ValueError("repeated prime in factor list")
        logv = math.fsum(e * math.log(p) for p, e in factors)
        return FactoredInteger(factors, logv)

    @staticmethod
    def from_int(n: int) -> "FactoredInteger":
        from .fields import factorize

        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return ONE
        return FactoredInteger.from_factors(factorize(n))

    def to_int(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def __mul__(self, other: "FactoredInteger") -> "FactoredInteger":
        merged = dict(self.factors)
        for p, e in other.factors:
            merged[p] = merged.get(p, 0) + e
        return FactoredInteger.from_factors(merged.items())

    def divide_exact(self, other: "FactoredInteger") -> "FactoredInteger":
        merged = dict(self.factors)
        for p, e in other.factors:
            merged[p] = merged.get(p, 0) - e
            if merged[p] < 0:
                raise ValueError("not an exact divisor")
        return FactoredInteger.from_factors(merged.items())

    def gcd(self, other: "FactoredInteger") -> "FactoredInteger":
        mine = dict(self.factors)
        out = []
        for p, e in other.factors:
            if p in mine:
                out.append((p, min(e, mine[p])))
        return FactoredInteger.from_factors(out)

    def lcm(self, other: "FactoredInteger") -> "FactoredInteger":
        merged = dict(self.factors)
        for p, e in other.factors:
            merged[p] = max(merged.get(p, 0), e)
        return FactoredInteger.from_factors(merged.items())

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def is_one(self) -> bool:
        return not self.factors

    def prime_support(self) -> frozenset[int]:
        return frozenset(p for p, _ in self.factors)

    def __lt__(self, other: "FactoredInteger") -> bool:
        if self.factors == other.factors:
            return False
        # log comparison with exact tie-break on the factor tuples
        if abs(self.log_value - other.log_value) > 1e-12:
            return self.log_value < other.log_value
        return self.to_int() < other.to_int()

    def format_line(self) -> str:
        if not self.factors:
            return "1"
        return " ".join(f"{p}^{e}" for p, e in self.factors)

    @staticmethod
    def parse_line(line: str) -> "FactoredInteger":
        line = line.strip()
        if not line or line == "1":
            return ONE
        factors = []
        for token in line.split():
            p, _, e = token.partition("^")
            factors.append((int(p), int(e) if e else 1))
        return FactoredInteger.from_factors(factors)


ONE = FactoredInteger(factors=(), log_value=0.0)
