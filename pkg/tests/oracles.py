"""Brute-force references used only by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


def components(entries) -> list[list[int]]:
    """Index sets of the orthogonal summands visible in the Gram matrix."""
    m = len(entries)
    seen, out = set(), []
    for i in range(m):
        if i in seen:
            continue
        stack, comp = [i], []
        seen.add(i)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in range(m):
                if b not in seen and entries[a][b]:
                    seen.add(b)
                    stack.append(b)
        out.append(sorted(comp))
    return out


@lru_cache(maxsize=None)
def _summand_values(S: tuple, Dg: tuple, D: int, q: int) -> np.ndarray:
    """Histogram of y^T S y / 2 mod q D^2 over y = D r - D gamma, r in (Z/q)^k."""
    k = len(S)
    M = q * D * D
    Sa = np.array(S, dtype=np.int64)
    hist = np.zeros(M, dtype=np.int64)
    total = q**k
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = []
        for _ in range(k):
            cols.append(idx % q)
            idx //= q
        y = np.stack(cols, axis=1) * D - np.array(Dg, dtype=np.int64)
        val = ((y @ Sa) * y).sum(axis=1) // 2
        hist += np.bincount(val % M, minlength=M)
    return hist


@lru_cache(maxsize=4096)
def _summand_convolution(entries: tuple, gamma: tuple, D: int, q: int) -> tuple:
    M = q * D * D
    dist = np.zeros(M, dtype=object)
    dist[0] = 1
    for comp in components(entries):
        S = tuple(tuple(entries[i][j] for j in comp) for i in comp)
        Dg = tuple(int(gamma[i] * D) for i in comp)
        h = _summand_values(S, Dg, D, q).astype(object)
        new = np.zeros(M, dtype=object)
        for v in np.nonzero(h)[0]:
            new += np.roll(dist, int(v)) * h[v]
        dist = new
    return tuple(int(x) for x in dist)


def rep_count_by_summands(gram, gamma, n, p: int, nu: int) -> int:
    """N_{gamma,n}(p^nu) by enumerating each orthogonal summand separately."""
    gamma = tuple(Fraction(g) for g in gamma)
    n = Fraction(n)
    q = p**nu
    # one D for every n in Z - Q(gamma), so the distribution is shared
    D = math.lcm(*(g.denominator for g in gamma), n.denominator)
    dist = _summand_convolution(tuple(map(tuple, gram.entries)), gamma, D, q)
    M = q * D * D
    return dist[int((-n * D * D) % M)]


def rep_count_UN_brute(g1: int, g2: int, N: int, n: Fraction, p: int, nu: int) -> int:
    """#{(a, b) mod p^nu : Q((a, b) - gamma) + n = 0}, gamma = (g1/N, g2/N) in U(N)'."""
    q = p**nu
    cnt = 0
    for a, b in itertools.product(range(q), repeat=2):
        val = N * (a - Fraction(g1, N)) * (b - Fraction(g2, N)) + n
        if val.denominator == 1 and val.numerator % q == 0:
            cnt += 1
    return cnt
