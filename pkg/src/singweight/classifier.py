"""Singular-weight principal parts: exhaustive search per lattice.

A nonnegative symmetric principal part sum a_f(gamma, -n) e_gamma q^-n gives
a Borcherds product of weight -1/2 sum a_f(gamma,-n) a_E(gamma, n).  Since
every a_E(gamma, n) <= 0, only indices with small |a_E| can take part in a
solution of weight n/2 - 1; beyond the search cap of :mod:`bounds` no
nonzero coefficient is small enough.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import search_cap
from .eisenstein import EisensteinTable, expansion_table, frac_str
from .lattice import FqmElement, LatticeSpec, build_catalog, catalog_by_id

__all__ = [
    "CapInsufficientError",
    "GoodIndex",
    "PrincipalPart",
    "SolutionFamily",
    "ClassificationReport",
    "EXPECTED_ADMITTING",
    "good_indices",
    "solve_singular_weight",
    "classify_catalog",
    "admitting_set",
]

# genera admitting holomorphic Borcherds products of singular weight
EXPECTED_ADMITTING = frozenset({
    "n3_2_7p1_4p2",
    "n3_2_7p3_4p2",
    "n3_2_7p1_4p4",
    "n3_2p4_4_7p1",
    "n3_8_7p1",
    "n4_3p5",
    "n6_2m6",
    "n10_2p2",
    "n26_1p1",
})


class CapInsufficientError(RuntimeError):
    pass


@dataclass(frozen=True)
class GoodIndex:
    """gamma (and -gamma when 2 gamma != 0) at exponent -n."""

    gamma: FqmElement
    partner: FqmElement
    n: Fraction
    a_E: Fraction
    contribution: Fraction

    @property
    def is_pair(self) -> bool:
        return self.gamma != self.partner


@dataclass(frozen=True)
class PrincipalPart:
    """Map (gamma coords, negative exponent) -> positive multiplicity."""

    support: tuple[tuple[tuple[int, ...], Fraction, int], ...]

    @classmethod
    def from_dict(cls, d: dict) -> "PrincipalPart":
        for (c, n), a in d.items():
            if n >= 0 or a < 1:
                raise ValueError("principal part needs n < 0 and a_f >= 1")
        return cls(tuple(sorted((c, Fraction(n), int(a)) for (c, n), a in d.items())))

    def as_dict(self) -> dict:
        return {(c, n): a for c, n, a in self.support}

    def weight(self, table: EisensteinTable) -> Fraction:
        return -Fraction(1, 2) * sum(a * table.get(c, -n) for c, n, a in self.support)

    def to_json(self) -> list:
        return [[list(c), frac_str(n), a] for c, n, a in self.support]

    def __str__(self) -> str:
        return " + ".join(f"{a}*e_{c}q^{frac_str(n)}" for c, n, a in self.support)


@dataclass
class SolutionFamily:
    """Solutions that agree after replacing each gamma by its expansion group."""

    signature: tuple
    representative: PrincipalPart
    count: int


@dataclass
class ClassificationReport:
    lattice_id: str
    weight: Fraction
    cap: Fraction
    good: list[GoodIndex]
    solutions: list[PrincipalPart]
    families: list[SolutionFamily] = field(default_factory=list)
    achieved: list[Fraction] = field(default_factory=list)

    @property
    def admits(self) -> bool:
        return bool(self.solutions)

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice_id,
            "weight": frac_str(self.weight),
            "cap": frac_str(self.cap),
            "good_indices": [
                {"gamma": list(g.gamma.coords), "pair": g.is_pair, "n": frac_str(-g.n),
                 "a_E": frac_str(g.a_E)} for g in self.good],
            "solution_count": len(self.solutions),
            "families": [
                {"size": f.count, "representative": f.representative.to_json()}
                for f in self.families],
        }

    def summary(self) -> str:
        return (f"{self.lattice_id:16s} w={frac_str(self.weight):5s} cap={frac_str(self.cap):3s} "
                f"good={len(self.good):4d} solutions={len(self.solutions):4d} families={len(self.families)}")


def good_indices(L: LatticeSpec, table: EisensteinTable) -> list[GoodIndex]:
    """Indices that can carry part of a singular-weight principal part."""
    w = Fraction(L.n, 2) - 1
    need = search_cap(L, 2 * w)
    if table.cap < need - 1:
        raise CapInsufficientError(f"table cap {table.cap} < required {need - 1}")
    from .lattice import discriminant_group

    G = discriminant_group(L.gram)
    out = []
    for (coords, n), a in sorted(table.values.items()):
        if a == 0:
            continue
        g = G.element(coords)
        neg = G.neg(g)
        if neg == g:
            if -a <= 2 * w:
                out.append(GoodIndex(g, g, n, a, -a / 2))
        elif g < neg and -a <= w:
            out.append(GoodIndex(g, neg, n, a, -a))
    out.sort(key=lambda x: (x.n, x.gamma.coords))
    return out


def _exact_sums(items: list[GoodIndex], target: Fraction):
    """All multiplicity vectors over ``items`` with total contribution = target."""
    sol = []

    def rec(i, rest, acc):
        if rest == 0:
            sol.append(dict(acc))
            return
        if i == len(items):
            return
        c = items[i].contribution
        mult = 0
        while mult * c <= rest:
            if mult:
                acc[i] = mult
            rec(i + 1, rest - mult * c, acc)
            mult += 1
        acc.pop(i, None)

    rec(0, target, {})
    return sol


def solve_singular_weight(L: LatticeSpec, cache=None) -> ClassificationReport:
    w = Fraction(L.n, 2) - 1
    cap = max(search_cap(L, 2 * w), Fraction(1))
    table = expansion_table(L, cap, cache=cache)
    good = good_indices(L, table)
    raw = _exact_sums(good, w) if good else []
    group_of = {}
    for gi, grp in enumerate(table.groups):
        for mbr in grp.members:
            group_of[mbr.coords] = gi
    solutions = []
    fams: dict = {}
    for vec in raw:
        pp = {}
        for i, a in vec.items():
            gi = good[i]
            pp[(gi.gamma.coords, -gi.n)] = a
            pp[(gi.partner.coords, -gi.n)] = a
        part = PrincipalPart.from_dict(pp)
        solutions.append(part)
        sig = tuple(sorted((group_of[c], n, a) for c, n, a in part.support))
        if sig in fams:
            fams[sig].count += 1
        else:
            fams[sig] = SolutionFamily(sig, part, 1)
    solutions.sort(key=lambda s: s.support)
    achieved = [s.weight(table) for s in solutions]
    assert all(x == w for x in achieved), "solver produced a wrong weight"
    families = sorted(fams.values(), key=lambda f: f.representative.support)
    return ClassificationReport(L.id, w, cap, good, solutions, families, achieved)


def classify_catalog(cache=None, ids=None) -> list[ClassificationReport]:
    lattices = build_catalog() if ids is None else [catalog_by_id()[i] for i in ids]
    return [solve_singular_weight(L, cache=cache) for L in lattices]


def admitting_set(reports) -> frozenset:
    return frozenset(r.lattice_id for r in reports if r.admits)


def reports_json(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=1)
