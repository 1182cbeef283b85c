"""Exact number-theoretic primitives.

Kronecker symbols, Bernoulli numbers, exact Dirichlet L-values for real
characters, fundamental discriminants and twisted divisor sums.  Values
that carry powers of pi or square roots are returned as
:class:`SymbolicConstant` so that cancellation can be checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint

__all__ = [
    "ParityError",
    "DiscriminantError",
    "SymbolicConstant",
    "QuadChar",
    "kronecker",
    "bernoulli",
    "bernoulli_poly",
    "generalized_bernoulli",
    "l_value_exact",
    "zeta_exact_even",
    "core_discriminant",
    "twisted_divisor_sum",
    "mobius",
    "factor",
    "squarefree_part",
    "divisors",
    "valuation",
]


class ParityError(ValueError):
    """Character parity does not match the evaluation point."""


class DiscriminantError(ValueError):
    pass


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple:
    return tuple(sorted(factorint(n).items()))


def factor(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` as ``{p: e}``."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    if n == 1:
        return {}
    return dict(_factor_cached(n))


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero integer or Fraction."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of 0")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor(n).items():
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: ``n = squarefree_part(n) * t**2``."""
    if n == 0:
        raise ValueError("squarefree part of 0")
    out = 1
    for p, e in factor(n).items():
        if e % 2:
            out *= p
    return out if n > 0 else -out


def mobius(n: int) -> int:
    f = factor(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol (a | b)."""
    a, b = int(a), int(b)
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    k = 1
    if v % 2 and a % 8 in (3, 5):
        k = -k
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    # Jacobi symbol loop, b odd positive
    a %= b
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                k = -k
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            k = -k
        a %= b
    return k if b == 1 else 0


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k with B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    if k % 2:
        return Fraction(0)
    # sum_{j<k} C(k+1, j) B_j = -(k+1) B_k
    acc = sum(math.comb(k + 1, j) * bernoulli(j) for j in range(k))
    return -acc / (k + 1)


def bernoulli_poly(k: int, x) -> Fraction:
    x = Fraction(x)
    return sum(math.comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))


def core_discriminant(D: int) -> tuple[int, Fraction]:
    """Split ``D = fund * f**2`` with ``fund`` a fundamental discriminant (or 1).

    ``f`` is returned as a Fraction; it is integral whenever D is 0 or 1 mod 4.
    """
    D = int(D)
    if D == 0:
        raise DiscriminantError("D must be nonzero")
    d0 = squarefree_part(D)
    fund = d0 if d0 % 4 == 1 else 4 * d0
    f2 = Fraction(D, fund)
    f = Fraction(math.isqrt(f2.numerator), math.isqrt(f2.denominator))
    if f * f != f2:  # pragma: no cover - squarefree_part guarantees a square
        raise DiscriminantError(f"{D} / {fund} is not a square")
    return fund, f


@dataclass(frozen=True)
class QuadChar:
    """Real Dirichlet character n -> (D | n).

    For a fundamental discriminant D the character is primitive of conductor
    |D|.  Non-fundamental D give the imprimitive character of modulus |D|.
    """

    D: int

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)

    @property
    def modulus(self) -> int:
        return abs(self.D)

    @property
    def is_primitive(self) -> bool:
        return self.D == core_discriminant(self.D)[0] if self.D % 4 in (0, 1) else False

    @property
    def conductor(self) -> int:
        return abs(core_discriminant(self.D)[0])

    def primitive(self) -> "QuadChar":
        return QuadChar(core_discriminant(self.D)[0])

    @property
    def parity(self) -> int:
        """chi(-1)."""
        return 1 if self.D > 0 else -1


TRIVIAL = QuadChar(1)


@dataclass(frozen=True)
class SymbolicConstant:
    """Exact value ``r * pi**pi_exp * sqrt(rad)``.

    ``rad`` is a squarefree positive integer.  ``pi_exp`` is kept as a
    Fraction so that Gamma at half integers (a rational multiple of
    sqrt(pi)) stays representable; it is integral for all final values.
    """

    r: Fraction
    pi_exp: Fraction = Fraction(0)
    rad: int = 1

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "pi_exp", Fraction(self.pi_exp))
        if self.rad < 1 or squarefree_part(self.rad) != self.rad:
            raise ValueError(f"radicand {self.rad} is not squarefree positive")
        if self.pi_exp.denominator not in (1, 2):
            raise ValueError("pi exponent must be a half integer")

    @classmethod
    def sqrt_of(cls, q) -> "SymbolicConstant":
        """sqrt(q) for a positive rational q."""
        q = Fraction(q)
        if q <= 0:
            raise ValueError("sqrt of nonpositive rational")
        # sqrt(a/b) = sqrt(a*b)/b
        ab = q.numerator * q.denominator
        core = squarefree_part(ab)
        outer = math.isqrt(ab // core)
        return cls(Fraction(outer, q.denominator), 0, core)

    @classmethod
    def pi_power(cls, e) -> "SymbolicConstant":
        return cls(Fraction(1), Fraction(e), 1)

    @property
    def is_rational(self) -> bool:
        return self.pi_exp == 0 and self.rad == 1

    def __mul__(self, other):
        if not isinstance(other, SymbolicConstant):
            return SymbolicConstant(self.r * Fraction(other), self.pi_exp, self.rad)
        g = math.gcd(self.rad, other.rad)
        return SymbolicConstant(
            self.r * other.r * g,
            self.pi_exp + other.pi_exp,
            (self.rad // g) * (other.rad // g),
        )

    __rmul__ = __mul__

    def inverse(self) -> "SymbolicConstant":
        if self.r == 0:
            raise ZeroDivisionError("inverse of zero constant")
        return SymbolicConstant(1 / (self.r * self.rad), -self.pi_exp, self.rad)

    def __truediv__(self, other):
        if not isinstance(other, SymbolicConstant):
            return SymbolicConstant(self.r / Fraction(other), self.pi_exp, self.rad)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __float__(self) -> float:
        return float(self.r) * math.pi ** float(self.pi_exp) * math.sqrt(self.rad)

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.r

    def __str__(self) -> str:
        parts = [str(self.r)]
        if self.pi_exp:
            parts.append(f"pi^{self.pi_exp}")
        if self.rad != 1:
            parts.append(f"sqrt({self.rad})")
        return "*".join(parts)


def generalized_bernoulli(k: int, chi: QuadChar = TRIVIAL) -> Fraction:
    """B_{k,chi} = f^(k-1) sum_{a=1}^{f} chi(a) B_k(a/f) over the modulus f of chi."""
    f = chi.modulus
    total = sum(chi(a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1) if chi(a))
    return Fraction(f) ** (k - 1) * total


def l_value_exact(s: int, chi: QuadChar = TRIVIAL) -> SymbolicConstant:
    """L(s, chi) for a primitive real character with chi(-1) = (-1)^s.

    Returned as rational * pi^s / sqrt(f) (times sqrt(f)^2 bookkeeping).
    """
    if s < 1:
        raise ValueError("s must be a positive integer")
    if chi.D != 1 and chi.primitive() != chi:
        raise ValueError(f"character {chi.D} is not primitive")
    if chi.parity != (-1) ** s:
        raise ParityError(f"chi(-1) = {chi.parity} does not match s = {s}")
    if s == 1 and chi.D == 1:
        raise ValueError("zeta has a pole at 1")
    f = chi.modulus
    delta = 0 if chi.parity == 1 else 1
    sign = (-1) ** (1 + (s - delta) // 2)
    # L(s,chi) = sign * tau/(2 i^delta) * (2pi/f)^s * B_{s,chi}/s!, tau = i^delta sqrt(f)
    coeff = Fraction(sign, 2) * Fraction(2**s, f**s) * generalized_bernoulli(s, chi) / math.factorial(s)
    return SymbolicConstant(coeff, s, 1) * SymbolicConstant.sqrt_of(f)


def zeta_exact_even(s: int) -> SymbolicConstant:
    if s < 2 or s % 2:
        raise ValueError("argument must be an even integer >= 2")
    return l_value_exact(s, TRIVIAL)


def twisted_divisor_sum(s: int, n: int, chi: QuadChar | None = None) -> Fraction:
    """sum_{t | n} chi(t) t^s."""
    if n < 1:
        raise ValueError("n must be positive")
    total = Fraction(0)
    for t in divisors(n):
        c = 1 if chi is None else chi(t)
        if c:
            total += c * Fraction(t) ** s
    return total
