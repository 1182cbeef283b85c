"""Lower bounds -a_E(gamma, n) >= C * n^(k-1) and the search caps they imply."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import factor, valuation
from .lattice import LatticeSpec

__all__ = ["UnsupportedRankError", "BoundConstant", "constant_C", "bound_for", "search_cap", "zeta"]

mpmath.mp.dps = 30


class UnsupportedRankError(ValueError):
    pass


def zeta(s) -> float:
    """Riemann zeta for real s > 1 (mpmath, ~30 digits)."""
    s = float(s)
    if s <= 1:
        raise ValueError("zeta(s) needs s > 1 here")
    return float(mpmath.zeta(s))


@dataclass(frozen=True)
class BoundConstant:
    k: Fraction
    d: int
    N: int
    value_formula: float
    value_used: float

    def to_json(self) -> dict:
        return {"k": str(self.k), "d": self.d, "N": self.N,
                "value_formula": self.value_formula, "value_used": self.value_used}


def constant_C(k, d: int, N: int) -> BoundConstant:
    """The constant C_{k,d,N}.

    ``value_formula`` carries the prefactor 2^(k+1) pi^k / (sqrt(d) Gamma(k));
    ``value_used`` is half of it, i.e. the same expression with (2 pi)^k,
    which is the normalisation the exact coefficients satisfy.
    """
    k = Fraction(k)
    if k.denominator not in (1, 2) or k < Fraction(3, 2):
        raise ValueError(f"k = {k} is not m/2 with m >= 3")
    if d < 1 or N < 1:
        raise ValueError("d and N must be positive")
    if d % N:
        raise ValueError(f"N = {N} does not divide d = {d}")
    kf = float(k)
    pref = 2 ** (kf + 1) * math.pi**kf / (math.sqrt(d) * math.gamma(kf))
    primes = sorted(set(factor(2 * d)))
    prod = 1.0
    if k.denominator == 1:
        if k < 3:
            raise UnsupportedRankError("even branch needs zeta(k-1) < 2, i.e. m >= 6")
        main = (2 - zeta(kf - 1)) / zeta(kf)
        for p in primes:
            prod *= p ** ((3 - 2 * kf) * valuation(N, p)) * (1 - 1 / p)
    else:
        if k < Fraction(5, 2):
            raise UnsupportedRankError("odd branch needs m >= 5")
        z = zeta(kf - 0.5)
        main = (2 - z) / z
        for p in primes:
            prod *= p ** ((3 - 2 * kf) * valuation(N, p)) * (1 - 1 / p) / (1 - p ** (1 - 2 * kf))
    formula = pref * main * prod
    return BoundConstant(k, d, N, formula, formula / 2)


def bound_for(L: LatticeSpec) -> BoundConstant:
    return constant_C(Fraction(L.rank, 2), L.expected_d, L.split_N)


def search_cap(L: LatticeSpec, T) -> Fraction:
    """Integer cap with C_used * n^(k-1) > T for every n >= cap."""
    T = Fraction(T)
    if T <= 0:
        raise ValueError("threshold must be positive")
    C = bound_for(L).value_used
    e = Fraction(L.rank, 2) - 1
    x = (float(T) / C) ** (1 / float(e))
    cap = math.floor(x) + 1
    # guard against float rounding right at an integer
    while C * cap ** float(e) <= float(T):
        cap += 1
    return Fraction(cap)
