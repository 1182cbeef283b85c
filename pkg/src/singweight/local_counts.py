"""Representation numbers N_{gamma,n}(p^nu) and stabilized local densities.

    N_{gamma,n}(a) = #{ r in L/aL : Q(r - gamma) + n = 0 mod a }

Three routes are provided:

* ``rep_count_naive`` enumerates (Z/p^nu)^m directly (the oracle).
* ``rep_count_U1`` / ``rep_count_UN`` are closed forms for hyperbolic planes.
* ``rep_count`` decomposes S over Z_(p) into blocks of rank <= 2, tabulates
  the value distribution of every shifted block and convolves them.

The block decomposition is carried out with exact rationals whose
denominators are prime to p, so no working precision has to be chosen.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np

from .arith import valuation
from .lattice import GramMatrix

__all__ = [
    "BudgetExceeded",
    "PrecisionError",
    "StabilizationError",
    "Block",
    "BlockChain",
    "ValueDistribution",
    "rep_count_naive",
    "rep_count_U1",
    "rep_count_UN",
    "block_decompose",
    "value_distribution",
    "convolve_cyclic",
    "rep_count",
    "rep_count_peeled",
    "local_density",
    "stable_level",
    "LocalCounter",
    "NAIVE_BUDGET",
    "DIST_BUDGET",
]

NAIVE_BUDGET = 2**26
DIST_BUDGET = 2**22
INF = math.inf


class BudgetExceeded(RuntimeError):
    """The requested enumeration is larger than the configured budget."""


class PrecisionError(ArithmeticError):
    pass


class StabilizationError(ArithmeticError):
    pass


def _val(x: Fraction, p: int) -> float:
    return INF if x == 0 else valuation(x, p)


def _mod(x: Fraction, p: int, modulus: int) -> int:
    """Image of a p-integral rational in Z/modulus (modulus a power of p)."""
    x = Fraction(x)
    if x.denominator % p == 0:
        raise PrecisionError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, modulus) % modulus


# ---------------------------------------------------------------------------
# naive oracle and hyperbolic closed forms


def rep_count_naive(gram, gamma, n, p: int, nu: int, budget: int = NAIVE_BUDGET) -> int:
    """Count r in (Z/p^nu)^m with Q(r - gamma) + n = 0 mod p^nu by enumeration."""
    if not isinstance(gram, GramMatrix):
        gram = GramMatrix(gram)
    m = gram.rank
    q = p**nu
    if q**m > budget:
        raise BudgetExceeded(f"{q}^{m} points exceed the naive budget {budget}")
    gamma = [Fraction(g) for g in gamma]
    n = Fraction(n)
    if (gram.q(gamma) + n).denominator != 1:
        raise ValueError("n + Q(gamma) is not integral")
    if nu == 0:
        return 1
    # counts only depend on gamma mod Z^m; reducing keeps the products small
    gamma = [g - math.floor(g) for g in gamma]
    n -= q * math.floor(n / q)
    # clear denominators: with y = D r - D gamma, D^2 (Q(r - gamma) + n) = y^T S y / 2 + D^2 n
    D = math.lcm(*(g.denominator for g in gamma), n.denominator)
    Dg = [int(g * D) for g in gamma]
    shift = int(n * D * D)
    modulus = q * D * D
    smax = max(abs(x) for row in gram.entries for x in row)
    dtype = object if (q * D) ** 2 * m * m * smax > 2**62 else np.int64
    S = np.array(gram.entries, dtype=dtype)
    count = 0
    total = q**m
    chunk = max(1, 2**18 // q) * q
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = []
        for _ in range(m):
            cols.append(idx % q)
            idx = idx // q
        y = np.stack(cols, axis=1).astype(dtype) * D - np.array(Dg, dtype=dtype)
        val = (y @ S * y).sum(axis=1) // 2 + shift
        count += int((val % modulus == 0).sum())
    return count


def rep_count_U1(n: int, p: int, nu: int) -> int:
    """N^{U}_{0,n}(p^nu) for the hyperbolic plane Q(a, b) = ab."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    o = INF if n == 0 else valuation(n, p)
    if o < nu:
        val = (o + 1) * Fraction(p - 1, p) * p**nu
    else:
        val = nu * Fraction(p - 1, p) * p**nu + p**nu
    assert val.denominator == 1
    return int(val)


def rep_count_UN(gamma, n, N: int, p: int, nu: int) -> int:
    """N^{U(N)}_{gamma,n}(p^nu) for gamma = (g1/N, g2/N) in U(N)' = (1/N) Z^2."""
    g1, g2 = (Fraction(c) * N for c in gamma)
    if g1.denominator != 1 or g2.denominator != 1:
        raise ValueError("gamma must lie in (1/N) Z^2")
    g1, g2 = int(g1), int(g2)
    ell = Fraction(n) + Fraction(g1 * g2, N)
    if ell.denominator != 1:
        raise ValueError("n must lie in Z - Q(gamma)")
    ell = int(ell)
    nu_N = valuation(N, p)
    nu_g = INF if (g1 == 0 and g2 == 0) else valuation(math.gcd(g1, g2), p)
    nu_min = min(nu, nu_g, nu_N)
    if ell % p**nu_min:
        return 0
    if nu_N <= min(nu, nu_g):
        nt = Fraction(N) * Fraction(n) / p ** (2 * nu_N)
        assert nt.denominator == 1
        return p ** (2 * nu_N) * rep_count_U1(int(nt), p, nu - nu_N)
    return p ** (nu + int(min(nu, nu_g)))


# ---------------------------------------------------------------------------
# block decomposition over Z_(p)


@dataclass(frozen=True)
class Block:
    scale: int                 # p-adic valuation of the block's entries
    kind: str                  # "unary", "U", "V"
    matrix: tuple              # 1x1 or 2x2 tuple of Fractions (Gram matrix of the block)
    indices: tuple[int, ...]   # positions in the decomposed basis

    @property
    def rank(self) -> int:
        return len(self.indices)

    def unit(self, p: int) -> Fraction:
        """Unit part u of a unary block p^scale * u."""
        if self.kind != "unary":
            raise AttributeError("binary blocks have no unit coefficient")
        return self.matrix[0][0] / Fraction(p) ** self.scale

    def det(self) -> Fraction:
        M = self.matrix
        return M[0][0] if self.rank == 1 else M[0][0] * M[1][1] - M[0][1] * M[1][0]


@dataclass(frozen=True)
class BlockChain:
    """S' = P^T S P block diagonal over Z_(p); P has p-unit determinant."""

    p: int
    blocks: tuple[Block, ...]
    P: tuple[tuple[Fraction, ...], ...]
    Pinv: tuple[tuple[Fraction, ...], ...]
    precision: str = "exact"

    @property
    def rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    def transform(self, gamma) -> list[Fraction]:
        """Coordinates of gamma in the block basis (P^{-1} gamma)."""
        g = [Fraction(c) for c in gamma]
        return [sum(row[j] * g[j] for j in range(len(g))) for row in self.Pinv]

    def block_shifts(self, gamma) -> list[tuple[Fraction, ...]]:
        g = self.transform(gamma)
        return [tuple(g[i] for i in b.indices) for b in self.blocks]

    def to_json(self) -> str:
        def fr(x):
            return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)

        return json.dumps({
            "p": self.p,
            "precision": self.precision,
            "blocks": [
                {"scale": b.scale, "kind": b.kind, "indices": list(b.indices),
                 "matrix": [[fr(x) for x in row] for row in b.matrix]}
                for b in self.blocks
            ],
            "P": [[fr(x) for x in row] for row in self.P],
        })


def block_decompose(gram, p: int, precision: int | None = None) -> BlockChain:
    """Jordan-type splitting of S over Z_(p) into unary / binary blocks.

    ``precision`` is accepted for interface compatibility; the computation is
    exact, so it only affects the tag stored on the result.
    """
    if not isinstance(gram, GramMatrix):
        gram = GramMatrix(gram)
    m = gram.rank
    M = [[Fraction(x) for x in row] for row in gram.entries]
    P = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]

    def swap(i, j):
        if i == j:
            return
        for row in P:
            row[i], row[j] = row[j], row[i]
        for row in M:
            row[i], row[j] = row[j], row[i]
        M[i], M[j] = M[j], M[i]

    def addmul(src, dst, c):  # basis vector e_dst += c * e_src
        if c == 0:
            return
        for row in P:
            row[dst] += c * row[src]
        for row in M:
            row[dst] += c * row[src]
        M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]

    blocks = []
    k = 0
    while k < m:
        cands = [(_val(M[i][j], p), i, j) for i in range(k, m) for j in range(i, m)]
        e = min(c[0] for c in cands)
        if e == INF:
            raise ValueError("degenerate form")
        diag = [(v, i) for v, i, j in cands if i == j and v == e]
        if not diag and p != 2:
            _, i, j = next(c for c in cands if c[0] == e)
            addmul(j, i, Fraction(1))  # new diagonal S_ii + 2 S_ij + S_jj has valuation e
            diag = [(e, i)]
        if diag:
            i = diag[0][1]
            swap(k, i)
            a = M[k][k]
            for r in range(k + 1, m):
                addmul(k, r, -M[k][r] / a)
            blocks.append(Block(int(e), "unary", ((M[k][k],),), (k,)))
            k += 1
            continue
        # p = 2 and all diagonal entries have larger valuation: binary block
        _, i, j = next(c for c in cands if c[0] == e and c[1] != c[2])
        swap(k, i)
        swap(k + 1, j if j != k else i)
        a, b, c = M[k][k], M[k][k + 1], M[k + 1][k + 1]
        det = a * c - b * b
        for r in range(k + 2, m):
            x, y = M[k][r], M[k + 1][r]
            c1 = (c * x - b * y) / det
            c2 = (a * y - b * x) / det
            addmul(k, r, -c1)
            addmul(k + 1, r, -c2)
        unit_det = det / Fraction(4) ** int(e)
        kind = "U" if _mod(unit_det, 2, 8) == 7 else "V"
        blocks.append(Block(int(e), kind, ((M[k][k], M[k][k + 1]), (M[k + 1][k], M[k + 1][k + 1])),
                            (k, k + 1)))
        k += 2

    # consistency: block diagonal, P p-integral and invertible mod p
    for bl in blocks:
        for i in bl.indices:
            for j in range(m):
                if j not in bl.indices and M[i][j] != 0:
                    raise AssertionError("block decomposition left off-diagonal entries")
    import sympy

    Pm = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in P])
    dP = Fraction(str(Pm.det()))
    if dP == 0 or _val(dP, p) != 0:
        raise PrecisionError("basis change is not invertible over Z_(p)")
    Pi = Pm.inv()
    Pinv = tuple(tuple(Fraction(int(Pi[i, j].p), int(Pi[i, j].q)) for j in range(m)) for i in range(m))
    tag = "exact" if precision is None else f"exact(w={precision})"
    return BlockChain(p, tuple(blocks), tuple(tuple(r) for r in P), Pinv, tag)


# ---------------------------------------------------------------------------
# value distributions


@dataclass(frozen=True)
class ValueDistribution:
    """counts[c] = #{x in (Z/p^nu)^rank : p^s (Q(x - shift) - offset) = c mod p^(nu+s)}.

    ``offset`` is sum_b Q_b(g_b) for the (reduced) block shifts g_b.  Taking it
    out leaves values with denominator p^t instead of p^(2t).
    """

    p: int
    nu: int
    s: int
    rank: int
    counts: np.ndarray = field(repr=False)
    offset: Fraction = Fraction(0)

    @property
    def modulus(self) -> int:
        return self.p ** (self.nu + self.s)

    def total(self) -> int:
        return int(sum(int(c) for c in self.counts))


def _shift_exponent(shift, p: int) -> int:
    vals = [_val(g, p) for g in shift if g != 0]
    return max(0, -min(vals)) if vals else 0


def shift_scale(chain: BlockChain, shifts) -> int:
    """Smallest s making every centred value p^s (Q_b(x - g_b) - Q_b(g_b)) integral."""
    return max((_shift_exponent(g, chain.p) for g in shifts), default=0)


def _block_values(block: Block, shift, p: int, nu: int, s: int) -> np.ndarray:
    """p^s (Q_b(x - g) - Q_b(g)) mod p^(nu+s) for all x in (Z/p^nu)^rank (flattened).

    With h = p^t g this is p^(s-t) (p^t Q_b(x) - x^T M h), an integer.
    """
    t = _shift_exponent(shift, p)
    if s < t:
        raise PrecisionError("scale s too small for the shift denominators")
    M = nu + s
    modM = p**M
    q = p**nu
    r = block.rank
    if q**r > DIST_BUDGET:
        raise BudgetExceeded(f"block enumeration of {q}^{r} points exceeds {DIST_BUDGET}")
    grids = np.meshgrid(*[np.arange(q, dtype=np.int64)] * r, indexing="ij")
    mult = p ** (s - t)
    if p == 2:
        # arithmetic mod 2^64 is exact for residues mod 2^M, M <= 62
        if M > 62:
            raise BudgetExceeded("modulus too large for 64-bit arithmetic")
        mod64 = 2**64
        B = [[_mod(x, 2, mod64) for x in row] for row in block.matrix]
        h = [_mod(Fraction(g) * 2**t, 2, mod64) for g in shift]
        u = [np.uint64(x) for x in (B[0][0], B[0][1] if r == 2 else 0, B[1][1] if r == 2 else 0)]
        with np.errstate(over="ignore"):
            xs = [g.astype(np.uint64) for g in grids]
            if r == 1:
                quad = u[0] * xs[0] * xs[0]
                lin = xs[0] * np.uint64(B[0][0] * h[0] % mod64)
            else:
                quad = u[0] * xs[0] * xs[0] + u[2] * xs[1] * xs[1] + np.uint64(2) * u[1] * xs[0] * xs[1]
                lin = (xs[0] * np.uint64((B[0][0] * h[0] + B[0][1] * h[1]) % mod64)
                       + xs[1] * np.uint64((B[1][0] * h[0] + B[1][1] * h[1]) % mod64))
            v = (quad >> np.uint64(1)) * np.uint64(2**t) - lin
            v = (v * np.uint64(mult)) & np.uint64(modM - 1)
        return v.astype(np.int64).ravel()
    if modM**2 >= 2**62:
        raise BudgetExceeded("modulus too large for 64-bit arithmetic")
    B = [[_mod(x, p, modM) for x in row] for row in block.matrix]
    h = [_mod(Fraction(g) * p**t, p, modM) for g in shift]
    inv2 = pow(2, -1, modM)
    xs = grids
    if r == 1:
        quad = B[0][0] * xs[0] % modM * xs[0] % modM
        lin = xs[0] * (B[0][0] * h[0] % modM) % modM
    else:
        quad = (B[0][0] * xs[0] % modM * xs[0] + B[1][1] * xs[1] % modM * xs[1]
                + 2 * B[0][1] * xs[0] % modM * xs[1]) % modM
        lin = (xs[0] * ((B[0][0] * h[0] + B[0][1] * h[1]) % modM)
               + xs[1] * ((B[1][0] * h[0] + B[1][1] * h[1]) % modM)) % modM
    v = (quad * inv2 % modM * (p**t % modM) - lin) % modM
    v = v * mult % modM
    return v.ravel()


def _block_q(block: Block, g) -> Fraction:
    Mx = block.matrix
    if block.rank == 1:
        return Mx[0][0] * g[0] * g[0] / 2
    return (Mx[0][0] * g[0] * g[0] + 2 * Mx[0][1] * g[0] * g[1] + Mx[1][1] * g[1] * g[1]) / 2


@lru_cache(maxsize=20000)
def _block_distribution_cached(block: Block, shift_key, p: int, nu: int, s: int) -> np.ndarray:
    vals = _block_values(block, shift_key, p, nu, s)
    counts = np.bincount(vals, minlength=p ** (nu + s)).astype(np.int64)
    counts.setflags(write=False)
    return counts


def _shift_key(shift, p: int, nu: int, s: int) -> tuple:
    # x ranges over Z/p^nu, so g only matters modulo p^nu (after clearing p^t)
    t = _shift_exponent(shift, p)
    modR = p ** (nu + 2 * t + 2)
    return tuple(Fraction(_mod(Fraction(g) * p**t, p, modR), p**t) for g in shift)


def block_distribution(block: Block, shift, p: int, nu: int, s: int) -> np.ndarray:
    return _block_distribution_cached(block, _shift_key(shift, p, nu, s), p, nu, s)


def _as_ints(a) -> list[int]:
    return [int(x) for x in a]


def convolve_cyclic(a, b) -> np.ndarray:
    """Exact cyclic convolution of two nonnegative integer count arrays.

    Uses Kronecker substitution with GMP multiplication.
    """
    a, b = np.asarray(a), np.asarray(b)
    L = len(a)
    if len(b) != L:
        raise ValueError("length mismatch")
    if L > DIST_BUDGET:
        raise BudgetExceeded(f"distribution length {L} exceeds {DIST_BUDGET}")
    sa = sum(_as_ints(a)) if a.dtype == object else int(a.sum(dtype=object))
    sb = sum(_as_ints(b)) if b.dtype == object else int(b.sum(dtype=object))
    bound = max(1, sa * sb)
    W = ((bound.bit_length() + 1 + 63) // 64) * 64
    nl = W // 64

    def pack(arr):
        if arr.dtype != object and W == 64:
            return int.from_bytes(np.ascontiguousarray(arr, dtype="<u8").tobytes(), "little")
        return int.from_bytes(b"".join(int(x).to_bytes(W // 8, "little") for x in arr), "little")

    A = gmpy2.mpz(pack(a))
    B = gmpy2.mpz(pack(b))
    C = int(A * B)
    raw = C.to_bytes(((2 * L) * W) // 8, "little")
    limbs = np.frombuffer(raw, dtype="<u8").reshape(2 * L, nl)
    if nl == 1 and bound < 2**63:
        full = limbs[:, 0].astype(np.int64)
        out = full[:L] + full[L:]
        return out
    vals = np.zeros(2 * L, dtype=object)
    for j in range(nl - 1, -1, -1):
        vals = vals * (1 << 64) + limbs[:, j].astype(object)
    out = vals[:L] + vals[L:]
    if bound < 2**63:
        return out.astype(np.int64)
    return out


def value_distribution(chain: BlockChain, shifts, nu: int, s: int | None = None) -> ValueDistribution:
    """Distribution of p^s * sum_b Q_b(x_b - g_b) mod p^(nu+s) over (Z/p^nu)^m."""
    p = chain.p
    if s is None:
        s = shift_scale(chain, shifts)
    L = p ** (nu + s)
    if L > DIST_BUDGET:
        raise BudgetExceeded(f"distribution length {L} exceeds {DIST_BUDGET}")
    acc = np.zeros(L, dtype=np.int64)
    acc[0] = 1
    offset = Fraction(0)
    for block, g in zip(chain.blocks, shifts):
        key = _shift_key(g, p, nu, s)
        offset += _block_q(block, key)
        acc = convolve_cyclic(acc, _block_distribution_cached(block, key, p, nu, s))
    return ValueDistribution(p, nu, s, chain.rank, acc, offset)


# ---------------------------------------------------------------------------
# representation numbers and densities


@lru_cache(maxsize=256)
def _chain_cached(entries, p: int) -> BlockChain:
    return block_decompose(GramMatrix(entries), p)


def _gram(gram) -> GramMatrix:
    return gram if isinstance(gram, GramMatrix) else GramMatrix(gram)


def _target(n, p: int, s: int, modulus: int) -> int:
    return _mod(-Fraction(n) * p**s, p, modulus)


def rep_count(gram, gamma, n, p: int, nu: int) -> int:
    """N_{gamma,n}(p^nu) through block decomposition and convolution."""
    gram = _gram(gram)
    if nu == 0:
        return 1
    chain = _chain_cached(gram.entries, p)
    shifts = chain.block_shifts(gamma)
    s = shift_scale(chain, shifts)
    dist = value_distribution(chain, shifts, nu, s)
    if (Fraction(n) + gram.q(gamma)).denominator != 1:
        raise ValueError("n + Q(gamma) is not integral")
    return int(dist.counts[_target(Fraction(n) + dist.offset, p, s, dist.modulus)])


def rep_count_peeled(l1_gram, gamma1, gamma2, n, N: int, p: int, nu: int) -> int:
    """N^{L1 + U(N)}(p^nu) = sum_c v_{L1}[c] N^{U(N)}(n + c) using the closed form for U(N).

    ``gamma2 = (g1/N, g2/N)`` is the U(N) component of gamma.
    """
    l1 = _gram(l1_gram)
    q = p**nu
    total = 0
    for r in itertools.product(range(q), repeat=l1.rank):
        c = l1.q([ri - Fraction(gi) for ri, gi in zip(r, gamma1)])
        total += rep_count_UN(gamma2, Fraction(n) + c, N, p, nu)
    return total


def dual_q_defect(gram, p: int) -> int:
    """c = max(0, -min v_p(Q(y))) over y in L' (Q(L') subset of p^{-c} Z_p)."""
    gram = _gram(gram)
    A = gram.inverse
    m = gram.rank
    vals = [_val(A[i][i] / 2, p) for i in range(m)]
    vals += [_val(A[i][j], p) for i in range(m) for j in range(i + 1, m)]
    return int(max(0, -min(vals)))


def stable_level(n, p: int, c: int) -> int:
    """Level from which p^{nu(1-m)} N(p^nu) is constant (Hensel bound).

    All solutions have gradient valuation v <= (a + c) / 2 once nu > a = v_p(n),
    and solutions with nu >= 2v + 1 lift uniformly.
    """
    a = valuation(Fraction(n), p)
    return max(1, a + 1, 2 * ((a + c) // 2) + 1)


def local_density(gram, gamma, n, p: int) -> Fraction:
    """Stabilized p^{nu(1-m)} N_{gamma,n}(p^nu) for n > 0."""
    gram = _gram(gram)
    return LocalCounter(gram, p).density(gamma, n)


class LocalCounter:
    """Densities at one prime for one lattice, reusing distributions across n."""

    def __init__(self, gram, p: int):
        self.gram = _gram(gram)
        self.p = p
        self.chain = _chain_cached(self.gram.entries, p)
        self.c = dual_q_defect(self.gram, p)
        self._dists: dict = {}

    def _folded(self, gamma, nu_max: int):
        key = tuple(Fraction(g) for g in gamma)
        hit = self._dists.get(key)
        if hit is not None and hit[0] >= nu_max:
            return hit
        shifts = self.chain.block_shifts(gamma)
        s = shift_scale(self.chain, shifts)
        dist = value_distribution(self.chain, shifts, nu_max, s)
        p = self.p
        folds = {nu_max: dist.counts}
        for nu in range(nu_max - 1, 0, -1):
            folds[nu] = folds[nu + 1].reshape(p, -1).sum(axis=0)
        entry = (nu_max, s, folds, dist.offset)
        self._dists[key] = entry
        return entry

    def densities(self, gamma, ns, check: int = 2) -> dict:
        """Stabilized densities for all n in ``ns`` (same gamma)."""
        ns = [Fraction(x) for x in ns]
        if not ns:
            return {}
        p, m = self.p, self.gram.rank
        levels = {x: stable_level(x, p, self.c) for x in ns}
        nu_max = max(levels.values()) + check
        nu_top, s, folds, off = self._folded(gamma, nu_max)
        out = {}
        for x in ns:
            lev = levels[x]
            vals = []
            for nu in range(lev, lev + check + 1):
                L = p ** (nu + s)
                cnt = int(folds[nu][_target(x + off, p, s, L)])
                # folds[nu] counts x modulo p^nu_top; each class mod p^nu has p^{m(top-nu)} lifts
                cnt_nu = Fraction(cnt, p ** (m * (nu_top - nu)))
                vals.append(cnt_nu / Fraction(p) ** (nu * (m - 1)))
            if any(v != vals[0] for v in vals):
                raise StabilizationError(
                    f"density at p={p}, n={x} did not stabilize: {[str(v) for v in vals]}")
            out[x] = vals[0]
        return out

    def density(self, gamma, n) -> Fraction:
        return self.densities(gamma, [n])[Fraction(n)]

    def count(self, gamma, n, nu: int) -> int:
        """N_{gamma,n}(p^nu) read off the cached distribution."""
        if nu == 0:
            return 1
        nu_top, s, folds, off = self._folded(gamma, nu)
        L = self.p ** (nu + s)
        cnt = int(folds[nu][_target(Fraction(n) + off, self.p, s, L)])
        q, r = divmod(cnt, self.p ** (self.gram.rank * (nu_top - nu)))
        assert r == 0
        return q
