import random
from fractions import Fraction

import pytest

from oracles import rep_count_UN_brute, rep_count_by_summands
from singweight.eisenstein import series_for
from singweight.lattice import GramMatrix, build_catalog, discriminant_group, hyperbolic
from singweight.local_counts import (
    NAIVE_BUDGET,
    BudgetExceeded,
    LocalCounter,
    block_decompose,
    convolve_cyclic,
    local_density,
    rep_count,
    rep_count_naive,
    rep_count_peeled,
    rep_count_U1,
    rep_count_UN,
    value_distribution,
)

U = hyperbolic(1)


def gamma_sample(L, size=50, seed=0):
    G = discriminant_group(L.gram)
    els = G.elements()
    if len(els) > size:
        els = random.Random(seed).sample(els, size)
    return [G.lift(g.coords) for g in els]


def test_naive_examples():
    assert rep_count_naive(U, (0, 0), 1, 2, 1) == 1
    assert rep_count_naive(U, (0, 0), 0, 2, 1) == 3
    assert rep_count_naive(GramMatrix([[2]]), (0,), 5, 3, 0) == 1
    with pytest.raises(BudgetExceeded):
        rep_count_naive(hyperbolic(1), (0, 0), 1, 2, 14)


def test_closed_form_examples():
    assert rep_count_U1(1, 2, 1) == 1
    assert rep_count_U1(4, 2, 1) == 3
    assert rep_count_U1(6, 3, 2) == 12
    assert rep_count_UN((Fraction(1, 2), 0), 3, 2, 2, 1) == 2
    for n in range(-5, 6):
        assert rep_count_UN((0, 0), n, 1, 3, 2) == rep_count_U1(n, 3, 2)


def test_block_decompose_shapes():
    ch = block_decompose(GramMatrix([[2, 0], [0, 4]]), 3)
    assert [b.rank for b in ch.blocks] == [1, 1]
    ch = block_decompose(hyperbolic(4), 2)
    assert [b.rank for b in ch.blocks] == [2]
    from singweight.lattice import root_lattice

    ch = block_decompose(root_lattice("E", 8), 2)
    assert [b.rank for b in ch.blocks] == [2, 2, 2, 2]


def test_value_distribution_unary():
    ch = block_decompose(GramMatrix([[4]]), 3)  # Q = 2x^2
    dist = value_distribution(ch, [(Fraction(0),)], 1, 0)
    assert list(dist.counts) == [1, 0, 2]


def test_convolution_matches_orthogonal_sum():
    a = [1, 0, 2]
    assert list(convolve_cyclic(a, a)) == [1, 4, 4]
    g = GramMatrix([[4, 0], [0, 4]])
    assert [rep_count(g, (0, 0), -c, 3, 1) for c in range(3)] == [1, 4, 4]


def test_crt_multiplicativity():
    g = GramMatrix([[2, 1, 0], [1, 2, 0], [0, 0, -4]])
    for n in range(-6, 6):
        lhs = rep_count_naive(g, (0, 0, 0), n, 2, 2) * rep_count_naive(g, (0, 0, 0), n, 3, 1)
        # direct count modulo 12
        cnt = 0
        for x in range(12):
            for y in range(12):
                for z in range(12):
                    if (x * x + x * y + y * y - 2 * z * z + n) % 12 == 0:
                        cnt += 1
        assert lhs == cnt


# the full oracle comparison over the catalog
@pytest.mark.parametrize("L", build_catalog(), ids=lambda L: L.id)
def test_rep_count_catalog_oracle(L):
    checked = 0
    for lift in gamma_sample(L):
        q = L.gram.q(lift)
        for p in (2, 3):
            for nu in (1, 2):
                naive_ok = (p**nu) ** L.rank <= 2**14
                for j in range(p**nu):
                    n = j - q
                    got = rep_count(L.gram, lift, n, p, nu)
                    want = (rep_count_naive(L.gram, lift, n, p, nu) if naive_ok
                            else rep_count_by_summands(L.gram, lift, n, p, nu))
                    assert got == want, (lift, n, p, nu)
                    checked += 1
    assert checked > 0


def _random_gram(rng):
    while True:
        m = rng.randint(1, 4)
        A = [[0] * m for _ in range(m)]
        for i in range(m):
            A[i][i] = 2 * rng.randint(-5, 5)
            for j in range(i + 1, m):
                A[i][j] = A[j][i] = rng.randint(-10, 10)
        try:
            return GramMatrix(A)
        except ValueError:
            continue


def test_rep_count_random_small_lattices():
    rng = random.Random(2024)
    done = 0
    while done < 200:
        g = _random_gram(rng)
        G = discriminant_group(g)
        els = G.elements()
        gam = [x - (x.numerator // x.denominator) for x in G.lift(rng.choice(els).coords)]
        p = rng.choice((2, 3, 5))
        nu = rng.randint(1, 3)
        if (p**nu) ** g.rank > 2**20:
            continue
        base = g.q(gam)
        for j in rng.sample(range(-20, 20), 4):
            n = j - base
            assert rep_count(g, gam, n, p, nu) == rep_count_naive(g, gam, n, p, nu), (g.entries, gam, n, p, nu)
        done += 1


def test_closed_forms_randomized():
    rng = random.Random(7)
    for _ in range(1000):
        p = rng.choice((2, 3, 5))
        nu = rng.randint(0, 3)
        n = rng.randint(-50, 50)
        assert rep_count_U1(n, p, nu) == rep_count_naive(U, (0, 0), n, p, nu)
    for _ in range(1000):
        p = rng.choice((2, 3, 5))
        nu = rng.randint(0, 3)
        N = rng.randint(1, 8)
        g1, g2 = rng.randrange(N), rng.randrange(N)
        n = Fraction(rng.randint(-50, 50)) - Fraction(g1 * g2, N)
        assert rep_count_UN((Fraction(g1, N), Fraction(g2, N)), n, N, p, nu) == rep_count_UN_brute(g1, g2, N, n, p, nu)


def test_peeled_path_agrees():
    rng = random.Random(11)
    for L in build_catalog():
        if L.n > 4:
            continue
        N = L.split_N
        # the last hyperbolic block is U(N') with the split N' on a 2x2 corner
        i = L.rank - 2
        Nl = L.gram.entries[i][i + 1]
        l1 = GramMatrix([row[:i] for row in L.gram.entries[:i]])
        for lift in rng.sample(gamma_sample(L), min(5, len(gamma_sample(L)))):
            q = L.gram.q(lift)
            for p in (2, 3):
                n = rng.randint(0, 5) - q
                assert rep_count_peeled(l1, lift[:i], lift[i:], n, Nl, p, 2) == rep_count(L.gram, lift, n, p, 2)
        assert Nl >= N


def test_density_times_power_reproduces_count():
    L = {x.id: x for x in build_catalog()}["n3_2_7p1_4p4"]
    G = discriminant_group(L.gram)
    lc = LocalCounter(L.gram, 2)
    for g in G.elements()[:30]:
        lift = G.lift(g.coords)
        n = 3 - L.gram.q(lift)
        if n <= 0:
            n += 1
        dens = lc.density(lift, n)
        assert dens == local_density(L.gram, lift, n, 2)
        for nu in (8, 9):
            assert dens * Fraction(2) ** (nu * (L.rank - 1)) == rep_count(L.gram, lift, n, 2, nu)


def test_good_prime_factor_matches_counted_density():
    for L in build_catalog():
        if L.rank > 8:
            continue
        E = series_for(L)
        G = discriminant_group(L.gram)
        lift0 = G.lift(G.zero().coords)
        for p in (3, 5, 7):
            if (2 * L.expected_d) % p == 0:
                continue
            lc = LocalCounter(L.gram, p)
            for n in range(1, 30):
                assert E.good_local_factor(n, p) == lc.density(lift0, n), (L.id, n, p)
