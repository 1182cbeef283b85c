"""Fourier coefficients of the vector valued Eisenstein series of weight m/2.

For gamma in L'/L and n in Z - Q(gamma), n > 0, the coefficient factors as

    a_E(gamma, n) = (-1)^{b+/2} (2 pi)^k n^{k-1} / (sqrt|L'/L| Gamma(k))
                    * prod_{p | 2 det S} delta_p(gamma, n) * P_good(n)

with k = m/2.  The densities delta_p at the finitely many bad primes come
from :mod:`singweight.local_counts`; the Euler product P_good over the
remaining primes is written through Dirichlet L-values and divisor sums:

* m even, D = (-1)^{m/2} det S:
      P_good = sigma_{1-k}(n~, chi_{4D}) / L(k, chi_{4D})
* m odd, s = k - 1/2, A = (-1)^{(m+1)/2} 2 det S n (squares cleared),
  Dc the fundamental discriminant of A and f the good-prime part of
  sqrt(A / Dc):
      P_good = L(s, chi_Dc) / zeta(2s)
               * sum_{t | f} mu(t) chi_Dc(t) t^{-s} sigma_{1-2s}(f/t)
               * prod_{p | 2 det S} (1 - chi_Dc(p) p^{-s}) / (1 - p^{-2s})

Transcendental factors are tracked with :class:`SymbolicConstant`; a
coefficient that fails to come out rational raises
:class:`NonCancellationError`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .arith import (
    QuadChar,
    SymbolicConstant,
    core_discriminant,
    factor,
    l_value_exact,
    mobius,
    divisors,
    twisted_divisor_sum,
    valuation,
)
from .lattice import DiscriminantGroup, FqmElement, LatticeSpec, discriminant_group
from .local_counts import LocalCounter

__all__ = [
    "NonCancellationError",
    "EisensteinCoefficient",
    "EisensteinSeries",
    "EisensteinTable",
    "OrbitGroup",
    "coefficient",
    "expansion_table",
    "series_for",
    "frac_str",
    "parse_frac",
    "CoefficientCache",
]


class NonCancellationError(ArithmeticError):
    """A pi or square-root factor survived in an Eisenstein coefficient."""


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


def _gamma_half(k: Fraction) -> SymbolicConstant:
    """Gamma(k) for k in (1/2) Z_{>0}."""
    if k.denominator == 1:
        return SymbolicConstant(math.factorial(int(k) - 1))
    s = int(k - Fraction(1, 2))
    # Gamma(s + 1/2) = (2s)! / (4^s s!) sqrt(pi)
    return SymbolicConstant(Fraction(math.factorial(2 * s), 4**s * math.factorial(s)), Fraction(1, 2))


def _rational_power(x: Fraction, e: Fraction) -> SymbolicConstant:
    """x^e for positive rational x and half-integral e."""
    x = Fraction(x)
    if e.denominator == 1:
        return SymbolicConstant(x ** int(e))
    base = x ** int(math.floor(e))
    return SymbolicConstant.sqrt_of(x) * base


@dataclass(frozen=True)
class EisensteinCoefficient:
    gamma: FqmElement
    n: Fraction
    value: Fraction


class EisensteinSeries:
    """Coefficient engine for one lattice (caches groups and local counters)."""

    def __init__(self, lattice: LatticeSpec):
        self.lattice = lattice
        self.gram = lattice.gram
        self.m = self.gram.rank
        self.k = Fraction(self.m, 2)
        self.det = self.gram.det
        self.d = abs(self.det)
        self.bplus = lattice.signature[0]
        self.bad_primes = sorted(factor(2 * self.det))
        self._counters = {p: LocalCounter(self.gram, p) for p in self.bad_primes}
        self._cache: dict = {}

    @cached_property
    def group(self) -> DiscriminantGroup:
        return discriminant_group(self.gram)

    @cached_property
    def prefactor_const(self) -> SymbolicConstant:
        """(-1)^{b+/2} (2 pi)^k / (sqrt(d) Gamma(k)), without n^{k-1}."""
        sign = -1 if (self.bplus // 2) % 2 else 1
        two_pi_k = _rational_power(Fraction(2), self.k) * SymbolicConstant.pi_power(self.k)
        return two_pi_k * sign / (SymbolicConstant.sqrt_of(self.d) * _gamma_half(self.k))

    # -- good-prime Euler product -------------------------------------------

    @cached_property
    def _even_data(self):
        k = int(self.k)
        D = (-1) ** (self.m // 2) * self.det
        fund, _ = core_discriminant(D) if D % 4 in (0, 1) else core_discriminant(4 * D)
        prim = QuadChar(fund)
        L = l_value_exact(k, prim)
        # remove Euler factors at p | 2D: chi_{4D} vanishes there
        corr = Fraction(1)
        for p in factor(2 * D):
            corr *= 1 - Fraction(prim(p), p**k)
        return QuadChar(4 * D), L * corr

    def _good_even(self, n: Fraction) -> SymbolicConstant:
        k = int(self.k)
        chi, L = self._even_data
        ntilde = 2 * self.d**2 * n
        assert ntilde.denominator == 1
        sigma = twisted_divisor_sum(1 - k, int(ntilde), chi)
        return sigma / L

    def _good_odd(self, n: Fraction) -> SymbolicConstant:
        s = int(self.k - Fraction(1, 2))
        A = (-1) ** ((self.m + 1) // 2) * 2 * self.det * n * n.denominator**2
        assert A.denominator == 1
        fund, f = core_discriminant(int(A))
        psi = QuadChar(fund)
        # good-prime part of f
        fg = 1
        for p, e in factor(f.numerator).items():
            if p not in self.bad_primes:
                fg *= p**e
        corr_sum = Fraction(0)
        for t in divisors(fg):
            mu = mobius(t)
            if mu and psi(t):
                corr_sum += mu * psi(t) * Fraction(1, t**s) * twisted_divisor_sum(1 - 2 * s, fg // t)
        bad = Fraction(1)
        for p in self.bad_primes:
            bad *= (1 - Fraction(psi(p), p**s)) / (1 - Fraction(1, p ** (2 * s)))
        L = l_value_exact(s, psi)
        zeta2s = l_value_exact(2 * s, QuadChar(1))
        return L / zeta2s * (corr_sum * bad)

    def good_local_factor(self, n, p: int) -> Fraction:
        """The Euler factor of P_good at a good prime p (equals delta_p)."""
        n = Fraction(n)
        if p in self.bad_primes:
            raise ValueError(f"{p} divides 2 det S")
        if self.m % 2 == 0:
            k = int(self.k)
            chi, _ = self._even_data
            c = chi(p)
            a = valuation(2 * self.d**2 * n, p)
            return (1 - Fraction(c, p**k)) * sum(Fraction(c * p) ** j / Fraction(p**k) ** j for j in range(a + 1))
        s = int(self.k - Fraction(1, 2))
        A = (-1) ** ((self.m + 1) // 2) * 2 * self.det * n * n.denominator**2
        fund, f = core_discriminant(int(A))
        c = QuadChar(fund)(p)
        b = valuation(f, p)
        g = Fraction(1)
        if b:
            g = twisted_divisor_sum(1 - 2 * s, p**b) - Fraction(c, p**s) * twisted_divisor_sum(1 - 2 * s, p ** (b - 1))
        return g * (1 - Fraction(1, p ** (2 * s))) / (1 - Fraction(c, p**s))

    # -- coefficients ---------------------------------------------------------

    def _check_index(self, gamma: FqmElement, n: Fraction):
        if n <= 0:
            raise ValueError("n must be positive")
        if (n + gamma.qval).denominator != 1:
            raise ValueError(f"n = {n} is not in Z - Q(gamma)")

    def coefficients(self, gamma: FqmElement, ns) -> dict[Fraction, Fraction]:
        """Exact a_E(gamma, n) for all n in ``ns``."""
        ns = [Fraction(x) for x in ns]
        for x in ns:
            self._check_index(gamma, x)
        todo = [x for x in ns if (gamma.coords, x) not in self._cache]
        if todo:
            lift = self.group.lift(gamma.coords)
            dens = {p: self._counters[p].densities(lift, todo) for p in self.bad_primes}
            for x in todo:
                local = Fraction(1)
                for p in self.bad_primes:
                    local *= dens[p][x]
                if local == 0:
                    val = Fraction(0)
                else:
                    good = self._good_even(x) if self.m % 2 == 0 else self._good_odd(x)
                    sym = self.prefactor_const * _rational_power(x, self.k - 1) * good * local
                    if not sym.is_rational:
                        raise NonCancellationError(
                            f"{self.lattice.id}: a_E({gamma.coords}, {x}) = {sym} is not rational")
                    val = sym.r
                self._cache[(gamma.coords, x)] = val
        return {x: self._cache[(gamma.coords, x)] for x in ns}

    def coefficient(self, gamma: FqmElement, n) -> Fraction:
        n = Fraction(n)
        return self.coefficients(gamma, [n])[n]

    def exponents(self, gamma: FqmElement, cap) -> list[Fraction]:
        """All n in Z - Q(gamma) with 0 < n <= cap."""
        cap = Fraction(cap)
        first = (-gamma.qval) % 1 or Fraction(1)
        out = []
        x = first
        while x <= cap:
            out.append(x)
            x += 1
        return out

    def expansion(self, gamma: FqmElement, cap) -> dict[Fraction, Fraction]:
        return self.coefficients(gamma, self.exponents(gamma, cap))


_SERIES: dict[str, EisensteinSeries] = {}


def series_for(lattice: LatticeSpec) -> EisensteinSeries:
    hit = _SERIES.get(lattice.id)
    if hit is None or hit.lattice is not lattice:
        hit = _SERIES[lattice.id] = EisensteinSeries(lattice)
    return hit


def coefficient(L: LatticeSpec, gamma: FqmElement, n) -> Fraction:
    """Exact rational a_E(gamma, n)."""
    return series_for(L).coefficient(gamma, n)


# ---------------------------------------------------------------------------
# tables


@dataclass
class OrbitGroup:
    representative: FqmElement
    members: list[FqmElement]
    expansion: dict[Fraction, Fraction]

    @property
    def size(self) -> int:
        return len(self.members)

    def nonzero(self) -> list[tuple[Fraction, Fraction]]:
        return [(n, v) for n, v in sorted(self.expansion.items()) if v]

    def format_expansion(self) -> str:
        terms = []
        if self.representative.order == 1:
            terms.append("1")
        for n, v in self.nonzero():
            terms.append(f"{frac_str(v)} q^{frac_str(n)}")
        return " ".join(terms) if terms else "0"


@dataclass
class EisensteinTable:
    lattice_id: str
    cap: Fraction
    values: dict[tuple[tuple[int, ...], Fraction], Fraction]
    groups: list[OrbitGroup] = field(default_factory=list)
    elements: list[FqmElement] = field(default_factory=list)

    def get(self, gamma, n) -> Fraction:
        coords = gamma.coords if isinstance(gamma, FqmElement) else tuple(gamma)
        n = Fraction(n)
        if n == 0:
            return Fraction(1) if not any(coords) else Fraction(0)
        return self.values.get((coords, n), Fraction(0))

    def rows(self):
        """(gamma coords, n, value) sorted by gamma then n."""
        return sorted(((c, n, v) for (c, n), v in self.values.items()), key=lambda r: (r[0], r[1]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gamma", "n", "coefficient"])
        for c, n, v in self.rows():
            w.writerow([" ".join(map(str, c)), frac_str(n), frac_str(v)])
        return buf.getvalue()

    def to_json(self, orbits: bool = False) -> str:
        out = {"lattice": self.lattice_id, "cap": frac_str(self.cap)}
        if orbits:
            out["orbits"] = [
                {"representative": list(g.representative.coords), "size": g.size,
                 "order": g.representative.order,
                 "expansion": [[frac_str(n), frac_str(v)] for n, v in g.nonzero()]}
                for g in self.groups
            ]
        else:
            out["coefficients"] = [[list(c), frac_str(n), frac_str(v)] for c, n, v in self.rows()]
        return json.dumps(out, indent=1)


def expansion_table(L: LatticeSpec, cap, cache: "CoefficientCache | None" = None) -> EisensteinTable:
    """All a_E(gamma, n), 0 < n <= cap, grouped by identical expansions.

    Elements are grouped by (order of gamma, full expansion up to cap); both
    are invariant under the orthogonal group of L'/L.
    """
    cap = Fraction(cap)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    es = series_for(L)
    if cache is not None:
        es._cache.update(cache.load(L.id))
    elements = sorted(es.group.elements())
    values = {}
    groups: dict = {}
    for g in elements:
        exp = es.expansion(g, cap)
        for n, v in exp.items():
            values[(g.coords, n)] = v
        key = (g.order, tuple(sorted(exp.items())))
        groups.setdefault(key, []).append(g)
    if cache is not None:
        cache.store(L.id, es._cache)
    orbit_groups = []
    for (_order, exp), members in groups.items():
        members = sorted(members)
        orbit_groups.append(OrbitGroup(members[0], members, dict(exp)))
    orbit_groups.sort(key=lambda g: g.representative.coords)
    return EisensteinTable(L.id, cap, values, orbit_groups, elements)


class CoefficientCache:
    """Append-only JSON-lines store of exact coefficients.

    One line per coefficient: {"lattice", "gamma", "n", "value"} with
    rationals written as "p/q" strings.
    """

    ENV = "SINGWEIGHT_CACHE"

    def __init__(self, path: str | os.PathLike | None = None):
        path = path or os.environ.get(self.ENV)
        self.path = os.fspath(path) if path else None
        self._seen: dict[str, dict] = {}

    def load(self, lattice_id: str) -> dict:
        if lattice_id in self._seen:
            return dict(self._seen[lattice_id])
        out = {}
        if self.path and os.path.exists(self.path):
            with open(self.path) as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        key = (tuple(int(c) for c in rec["gamma"]), Fraction(rec["n"]))
                        val = Fraction(rec["value"])
                    except (ValueError, KeyError, TypeError) as exc:
                        raise ValueError(f"{self.path}:{lineno}: malformed cache record") from exc
                    if rec["lattice"] != lattice_id:
                        continue
                    if key in out and out[key] != val:
                        raise ValueError(f"{self.path}:{lineno}: conflicting cached value")
                    out[key] = val
        self._seen[lattice_id] = dict(out)
        return out

    def store(self, lattice_id: str, values: dict):
        if not self.path:
            return
        known = self._seen.setdefault(lattice_id, {})
        new = {k: v for k, v in values.items() if k not in known}
        if not new:
            return
        with open(self.path, "a") as fh:
            for (coords, n), v in sorted(new.items()):
                fh.write(json.dumps({"lattice": lattice_id, "gamma": list(coords),
                                     "n": frac_str(n), "value": frac_str(v)}) + "\n")
        known.update(new)
