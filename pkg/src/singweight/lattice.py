"""Lattice catalog, discriminant groups and the Q/Z-valued quadratic form.

Lattices are given by integral Gram matrices ``S`` with even diagonal, so
``Q(x) = x^T S x / 2`` is integer valued on ``Z^m``.  The dual lattice is
``S^{-1} Z^m`` and the discriminant group ``L'/L`` is computed from the Smith
normal form of ``S``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, prod

import numpy as np
import sympy

__all__ = [
    "CatalogError",
    "GramMatrix",
    "LatticeSpec",
    "FqmElement",
    "DiscriminantGroup",
    "build_catalog",
    "catalog_by_id",
    "get_lattice",
    "discriminant_group",
    "q_value",
    "element_order",
    "slug",
    "smith_form",
    "block_diagonal",
    "root_lattice",
    "hyperbolic",
    "S8",
    "catalog_json",
]


class CatalogError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Gram matrices


def _as_tuple_matrix(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in rows)


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_tuple_matrix(self.entries))
        m = len(self.entries)
        if any(len(row) != m for row in self.entries):
            raise ValueError("Gram matrix must be square")
        for i in range(m):
            if self.entries[i][i] % 2:
                raise ValueError("Gram matrix must have even diagonal")
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        if self.det == 0:
            raise ValueError("Gram matrix must be nondegenerate")

    @property
    def rank(self) -> int:
        return len(self.entries)

    @cached_property
    def sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.entries)

    @cached_property
    def det(self) -> int:
        return int(self.sympy.det(method="bareiss"))

    @cached_property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        inv = self.sympy.inv()
        return tuple(
            tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(self.rank))
            for i in range(self.rank)
        )

    @cached_property
    def signature(self) -> tuple[int, int]:
        ev = np.linalg.eigvalsh(np.array(self.entries, dtype=float))
        return int((ev > 0).sum()), int((ev < 0).sum())

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def q(self, x) -> Fraction:
        """Q(x) = x^T S x / 2 for a rational vector x."""
        x = [Fraction(c) for c in x]
        S = self.entries
        m = self.rank
        tot = Fraction(0)
        for i in range(m):
            if x[i]:
                tot += x[i] * sum(S[i][j] * x[j] for j in range(m))
        return tot / 2

    def bilinear(self, x, y) -> Fraction:
        S = self.entries
        return sum(
            Fraction(x[i]) * S[i][j] * Fraction(y[j])
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def scaled(self, c: int) -> "GramMatrix":
        return GramMatrix([[c * v for v in row] for row in self.entries])

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def block_diagonal(*blocks) -> GramMatrix:
    mats = [b.entries if isinstance(b, GramMatrix) else _as_tuple_matrix(b) for b in blocks]
    m = sum(len(b) for b in mats)
    out = [[0] * m for _ in range(m)]
    off = 0
    for b in mats:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return GramMatrix(out)


# ---------------------------------------------------------------------------
# root lattices


def _cartan_from_edges(n: int, edges) -> GramMatrix:
    S = [[0] * n for _ in range(n)]
    for i in range(n):
        S[i][i] = 2
    for i, j in edges:
        S[i][j] = S[j][i] = -1
    return GramMatrix(S)


def root_lattice(kind: str, n: int) -> GramMatrix:
    """Cartan matrix of the positive definite root lattice A_n, D_n or E_n."""
    if kind == "A":
        return _cartan_from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "D":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
        return _cartan_from_edges(n, edges)
    if kind == "E":
        if n not in (6, 7, 8):
            raise ValueError("E_n needs n in 6, 7, 8")
        # Bourbaki labels 1..n: chain 1-3-4-5-..-n, node 2 on node 4
        edges = [(0, 2), (2, 3), (1, 3)] + [(i, i + 1) for i in range(3, n - 1)]
        return _cartan_from_edges(n, edges)
    raise ValueError(f"unknown root system {kind}")


def hyperbolic(N: int = 1) -> GramMatrix:
    return GramMatrix([[0, N], [N, 0]])


S8 = GramMatrix([[-8, -4, 0], [-4, -2, -1], [0, -1, -2]])


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class LatticeSpec:
    id: str
    genus_symbol: str
    signature: tuple[int, int]
    gram: GramMatrix
    split_N: int
    expected_d: int
    description: str = ""

    @property
    def n(self) -> int:
        return self.signature[1]

    @property
    def rank(self) -> int:
        return self.gram.rank

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "genus_symbol": self.genus_symbol,
            "n": self.n,
            "gram": self.gram.rows(),
            "expected_d": self.expected_d,
            "split_N": self.split_N,
            "lattice": self.description,
        }


_FACTOR_RE = re.compile(r"(\d+)(?:_\{?(\d+)\}?)?\^\{?([+-])(\d+)\}?")


def slug(genus_symbol: str, n: int) -> str:
    """Stable id, e.g. ``2_7^{+1}4^{+4}`` with n = 3 -> ``n3_2_7p1_4p4``."""
    parts = []
    for q, t, sgn, e in _FACTOR_RE.findall(genus_symbol.replace(" ", "")):
        s = q + (f"_{t}" if t else "") + ("p" if sgn == "+" else "m") + e
        parts.append(s)
    if not parts:
        raise CatalogError(f"cannot parse genus symbol {genus_symbol!r}")
    return f"n{n}_" + "_".join(parts)


def _expected_d_from_symbol(genus_symbol: str) -> int:
    d = 1
    for q, _t, _s, e in _FACTOR_RE.findall(genus_symbol):
        d *= int(q) ** int(e)
    return d


# Each entry: (n, genus symbol, description, blocks) where blocks is a list of
# ("A"|"D"|"E", rank, scale) for X_rank(scale), ("A1", c) for A_1(c),
# ("U", N) for U(N) and ("S8",) for the explicit rank-3 block.
_TABLE = [
    (3, "2_7^{+1}", "A1(-1) + U + U", [("A1", -1), ("U", 1), ("U", 1)]),
    (3, "2_7^{+3}", "A1(-1) + U(2) + U", [("A1", -1), ("U", 2), ("U", 1)]),
    (3, "2_7^{+1}4^{+2}", "A1(-1) + U(4) + U", [("A1", -1), ("U", 4), ("U", 1)]),
    (3, "2_7^{+5}", "A1(-1) + U(2) + U(2)", [("A1", -1), ("U", 2), ("U", 2)]),
    (3, "2_7^{+3}4^{+2}", "A1(-1) + U(2) + U(4)", [("A1", -1), ("U", 2), ("U", 4)]),
    (3, "2_7^{+1}4^{+4}", "A1(-1) + U(4) + U(4)", [("A1", -1), ("U", 4), ("U", 4)]),
    (3, "4_7^{+1}", "A1(-2) + U + U", [("A1", -2), ("U", 1), ("U", 1)]),
    (3, "2^{+2}4_7^{+1}", "A1(-2) + U(2) + U", [("A1", -2), ("U", 2), ("U", 1)]),
    (3, "2^{+4}4_7^{+1}", "A1(-2) + U(2) + U(2)", [("A1", -2), ("U", 2), ("U", 2)]),
    (3, "2_1^{+1}3^{+1}", "A1(-3) + U + U", [("A1", -3), ("U", 1), ("U", 1)]),
    (3, "2_7^{+1}3^{-2}", "A1(-1) + U(3) + U", [("A1", -1), ("U", 3), ("U", 1)]),
    (3, "2_7^{+1}3^{+4}", "A1(-1) + U(3) + U(3)", [("A1", -1), ("U", 3), ("U", 3)]),
    (3, "8_7^{+1}", "A1(-4) + U + U", [("A1", -4), ("U", 1), ("U", 1)]),
    (3, "8_3^{-1}", "S8 + U", [("S8",), ("U", 1)]),
    (3, "2^{+2}8_3^{-1}", "S8 + U(2)", [("S8",), ("U", 2)]),
    (4, "3^{+1}", "A2(-1) + U + U", [("A", 2, -1), ("U", 1), ("U", 1)]),
    (4, "3^{-3}", "A2(-1) + U(3) + U", [("A", 2, -1), ("U", 3), ("U", 1)]),
    (4, "3^{+5}", "A2(-1) + U(3) + U(3)", [("A", 2, -1), ("U", 3), ("U", 3)]),
    (4, "2^{+2}3^{+1}", "A2(-1) + U(2) + U", [("A", 2, -1), ("U", 2), ("U", 1)]),
    (4, "2^{+4}3^{+1}", "A2(-1) + U(2) + U(2)", [("A", 2, -1), ("U", 2), ("U", 2)]),
    (5, "4_5^{-1}", "A3(-1) + U + U", [("A", 3, -1), ("U", 1), ("U", 1)]),
    (5, "2^{+2}4_5^{-1}", "A3(-1) + U(2) + U", [("A", 3, -1), ("U", 2), ("U", 1)]),
    (5, "2^{+4}4_5^{-1}", "A3(-1) + U(2) + U(2)", [("A", 3, -1), ("U", 2), ("U", 2)]),
    (6, "2^{-2}", "D4(-1) + U + U", [("D", 4, -1), ("U", 1), ("U", 1)]),
    (6, "2^{-4}", "D4(-1) + U(2) + U", [("D", 4, -1), ("U", 2), ("U", 1)]),
    (6, "2^{-6}", "D4(-1) + U(2) + U(2)", [("D", 4, -1), ("U", 2), ("U", 2)]),
    (6, "5^{+1}", "A4(-1) + U + U", [("A", 4, -1), ("U", 1), ("U", 1)]),
    (7, "4_3^{-1}", "D5(-1) + U + U", [("D", 5, -1), ("U", 1), ("U", 1)]),
    (7, "2_1^{+1}3^{-1}", "A5(-1) + U + U", [("A", 5, -1), ("U", 1), ("U", 1)]),
    (8, "3^{-1}", "E6(-1) + U + U", [("E", 6, -1), ("U", 1), ("U", 1)]),
    (8, "2_2^{+2}", "D6(-1) + U + U", [("D", 6, -1), ("U", 1), ("U", 1)]),
    (8, "7^{+1}", "A6(-1) + U + U", [("A", 6, -1), ("U", 1), ("U", 1)]),
    (9, "2_1^{+1}", "E7(-1) + U + U", [("E", 7, -1), ("U", 1), ("U", 1)]),
    (9, "4_1^{+1}", "D7(-1) + U + U", [("D", 7, -1), ("U", 1), ("U", 1)]),
    (9, "8_1^{+1}", "A7(-1) + U + U", [("A", 7, -1), ("U", 1), ("U", 1)]),
    (10, "1^{+1}", "E8(-1) + U + U", [("E", 8, -1), ("U", 1), ("U", 1)]),
    (10, "2^{+2}", "E8(-1) + U(2) + U", [("E", 8, -1), ("U", 2), ("U", 1)]),
    (18, "1^{+1}", "2E8(-1) + U + U", [("E", 8, -1), ("E", 8, -1), ("U", 1), ("U", 1)]),
    (26, "1^{+1}", "3E8(-1) + U + U",
     [("E", 8, -1), ("E", 8, -1), ("E", 8, -1), ("U", 1), ("U", 1)]),
]


def _block(spec) -> GramMatrix:
    tag = spec[0]
    if tag == "A1":
        return GramMatrix([[2 * spec[1]]])
    if tag == "U":
        return hyperbolic(spec[1])
    if tag == "S8":
        return S8
    kind, rank, scale = spec
    return root_lattice(kind, rank).scaled(scale)


def _build_entry(n, symbol, description, blocks) -> LatticeSpec:
    gram = block_diagonal(*[_block(b) for b in blocks])
    split_N = min(b[1] for b in blocks if b[0] == "U")
    expected_d = _expected_d_from_symbol(symbol)
    if abs(gram.det) != expected_d:
        raise CatalogError(f"{symbol}: |det| = {abs(gram.det)}, expected {expected_d}")
    sig = gram.signature
    if sig != (2, n):
        raise CatalogError(f"{symbol}: signature {sig}, expected (2, {n})")
    return LatticeSpec(slug(symbol, n), symbol, sig, gram, split_N, expected_d, description)


_CATALOG: list[LatticeSpec] | None = None


def build_catalog() -> list[LatticeSpec]:
    """All 39 simple lattices of signature (2, n), n >= 3."""
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = [_build_entry(*row) for row in _TABLE]
        ids = [e.id for e in _CATALOG]
        if len(set(ids)) != len(ids):  # pragma: no cover
            raise CatalogError("duplicate catalog ids")
    return list(_CATALOG)


def catalog_by_id() -> dict[str, LatticeSpec]:
    return {e.id: e for e in build_catalog()}


def get_lattice(key: str) -> LatticeSpec:
    """Look up a catalog entry by id (or by "n:genus_symbol")."""
    table = catalog_by_id()
    if key in table:
        return table[key]
    for e in table.values():
        if key in (f"{e.n}:{e.genus_symbol}", e.description):
            return e
    raise KeyError(f"unknown lattice id {key!r}")


def catalog_json() -> str:
    return json.dumps([e.to_json() for e in build_catalog()], indent=1)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_form(A):
    """Return (D, U, V) with U*A*V = D diagonal, U and V unimodular.

    The diagonal is nonnegative and ordered by divisibility.
    """
    A = [list(map(int, row)) for row in A]
    m, n = len(A), len(A[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(M, i, j):
        M[i], M[j] = M[j], M[i]

    def swap_cols(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    def add_row(M, src, dst, c):  # row_dst += c * row_src
        M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]

    def add_col(M, src, dst, c):
        for row in M:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(A, t, i)
            swap_rows(U, t, i)
            swap_cols(A, t, j)
            swap_cols(V, t, j)
            piv = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // piv
                if q:
                    add_row(A, t, i, -q)
                    add_row(U, t, i, -q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // piv
                if q:
                    add_col(A, t, j, -q)
                    add_col(V, t, j, -q)
                if A[t][j]:
                    done = False
            if not done:
                continue
            # pivot must divide the remaining block
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv]
            if bad:
                i, _ = bad[0]
                add_row(A, i, t, 1)
                add_row(U, i, t, 1)
                continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V


# ---------------------------------------------------------------------------
# discriminant group


@dataclass(frozen=True, order=True)
class FqmElement:
    coords: tuple[int, ...]
    order: int = field(compare=False)
    qval: Fraction = field(compare=False)

    def __repr__(self) -> str:
        return f"FqmElement({self.coords}, order={self.order}, Q={self.qval})"


@dataclass(frozen=True)
class DiscriminantGroup:
    """L'/L as a product of cyclic groups Z/d_1 x ... x Z/d_r (d_i | d_{i+1}).

    ``lifts[i]`` is a vector of L' (rational coordinates in the basis of L)
    representing the i-th generator.
    """

    gram: GramMatrix
    divisors: tuple[int, ...]
    lifts: tuple[tuple[Fraction, ...], ...]

    @property
    def order(self) -> int:
        return prod(self.divisors)

    @property
    def exponent(self) -> int:
        out = 1
        for d in self.divisors:
            out = out * d // gcd(out, d)
        return out

    def reduce(self, coords) -> tuple[int, ...]:
        return tuple(int(c) % d for c, d in zip(coords, self.divisors))

    def lift(self, coords) -> tuple[Fraction, ...]:
        m = self.gram.rank
        vec = [Fraction(0)] * m
        for c, g in zip(coords, self.lifts):
            if c:
                for i in range(m):
                    vec[i] += c * g[i]
        return tuple(vec)

    def qval(self, coords) -> Fraction:
        q = self.gram.q(self.lift(coords))
        return q - (q.numerator // q.denominator)

    def element(self, coords) -> FqmElement:
        coords = self.reduce(coords)
        return FqmElement(coords, self._order_of(coords), self.qval(coords))

    def _order_of(self, coords) -> int:
        out = 1
        for c, d in zip(coords, self.divisors):
            o = d // gcd(c, d)
            out = out * o // gcd(out, o)
        return out

    def zero(self) -> FqmElement:
        return self.element([0] * len(self.divisors))

    def neg(self, g: FqmElement) -> FqmElement:
        return self.element([-c for c in g.coords])

    def add(self, a: FqmElement, b: FqmElement) -> FqmElement:
        return self.element([x + y for x, y in zip(a.coords, b.coords)])

    def elements(self) -> list[FqmElement]:
        return [self.element(c) for c in itertools.product(*(range(d) for d in self.divisors))]

    def bilinear(self, a: FqmElement, b: FqmElement) -> Fraction:
        v = self.gram.bilinear(self.lift(a.coords), self.lift(b.coords))
        return v - (v.numerator // v.denominator)

    def coords_of_vector(self, vec) -> tuple[int, ...]:
        """Coordinates of the class of a dual vector ``vec`` (basis of L)."""
        # vec = V (c / d)  =>  c = d * V^{-1} vec
        c = [sum(self._vinv[i][j] * Fraction(vec[j]) for j in range(len(vec))) * d
             for i, d in enumerate(self._all_divisors)]
        if any(x.denominator != 1 for x in c):
            raise ValueError("vector is not in the dual lattice")
        full = [int(x) for x in c]
        return self.reduce(full[len(self._all_divisors) - len(self.divisors):])

    @cached_property
    def _snf(self):
        return smith_form(self.gram.entries)

    @cached_property
    def _all_divisors(self) -> tuple[int, ...]:
        D, _, _ = self._snf
        return tuple(D[i][i] for i in range(self.gram.rank))

    @cached_property
    def _vinv(self):
        _, _, V = self._snf
        inv = sympy.Matrix(V).inv()
        return [[Fraction(int(inv[i, j])) for j in range(inv.cols)] for i in range(inv.rows)]


def discriminant_group(gram: GramMatrix) -> DiscriminantGroup:
    """L'/L from the Smith normal form U S V = D.

    L' = S^{-1} Z^m = V D^{-1} Z^m, so ``V e_i / d_i`` generates a cyclic
    factor of order ``d_i``.
    """
    D, _U, V = smith_form(gram.entries)
    m = gram.rank
    divs, lifts = [], []
    for i in range(m):
        d = D[i][i]
        if d > 1:
            divs.append(d)
            lifts.append(tuple(Fraction(V[r][i], d) for r in range(m)))
    # sanity: S * lift integral
    for g in lifts:
        for r in range(m):
            if sum(gram.entries[r][j] * g[j] for j in range(m)).denominator != 1:
                raise AssertionError("generator lift not in the dual lattice")
    return DiscriminantGroup(gram, tuple(divs), tuple(lifts))


def q_value(G: DiscriminantGroup, g: FqmElement) -> Fraction:
    return G.qval(g.coords)


def element_order(G: DiscriminantGroup, g: FqmElement) -> int:
    return G._order_of(G.reduce(g.coords))
