import json
import math
from fractions import Fraction as F

import pytest

from singweight.bounds import bound_for, search_cap
from singweight.eisenstein import (
    CoefficientCache,
    coefficient,
    expansion_table,
    frac_str,
    parse_frac,
    series_for,
)
from singweight.lattice import build_catalog, discriminant_group


def _q(pairs):
    return {F(n): F(v) for n, v in pairs}


# orbit size -> expansions (exponent, coefficient), exponents <= 12
REFERENCE_4P4 = [
    (1, _q([(1, -10), (4, -70), (5, -48), (8, -120), (9, -250), (12, -240)])),
    (120, _q([(1, -4), (2, -8), (3, -16), (4, -32), (5, -32), (6, -48), (7, -64), (8, -64),
              (9, -100), (10, -112), (11, -112), (12, -128)])),
    (15, _q([(1, -4), (2, -8), (3, -16), (4, -32), (5, -32), (6, -48), (7, -64), (8, -64),
             (9, -100), (10, -112), (11, -112), (12, -128)])),
    (120, _q([("3/4", -2), ("7/4", -8), ("11/4", -14), ("15/4", -24), ("19/4", -38), ("23/4", -40),
              ("27/4", -56), ("31/4", -80), ("35/4", -76), ("39/4", -104), ("43/4", -126),
              ("47/4", -112)])),
    (120, _q([("1/2", -1), ("3/2", -6), ("5/2", -14), ("7/2", -20), ("9/2", -31), ("11/2", -46),
              ("13/2", -50), ("15/2", -68), ("17/2", -92), ("19/2", -82), ("21/2", -108),
              ("23/2", -148)])),
    (120, _q([("1/4", "-1/2"), ("5/4", -4), ("9/4", "-25/2"), ("13/4", -20), ("17/4", -24),
              ("21/4", -40), ("25/4", "-121/2"), ("29/4", -60), ("33/4", -72), ("37/4", -100),
              ("41/4", -96), ("45/4", -124)])),
    (10, _q([("1/4", -1), ("9/4", -25), ("17/4", -48), ("25/4", -121), ("33/4", -144),
             ("41/4", -192)])),
    (6, _q([("5/4", -8), ("13/4", -40), ("21/4", -80), ("29/4", -120), ("37/4", -200),
            ("45/4", -248)])),
]


def _nonzero(d):
    return {n: v for n, v in d.items() if v}


def test_reference_table(table_4p4):
    groups = [(g.size, _nonzero(g.expansion)) for g in table_4p4.groups]
    assert sorted(s for s, _ in groups) == sorted(s for s, _ in REFERENCE_4P4)
    remaining = list(groups)
    for size, exp in REFERENCE_4P4:
        hit = (size, exp)
        assert hit in remaining, f"no group of size {size} with the expected expansion"
        remaining.remove(hit)
    assert table_4p4.get((0,) * 5, 0) == 1


def test_order_two_elements_split(by_id):
    L = by_id["n3_2_7p1_4p4"]
    G = discriminant_group(L.gram)
    cand = [g for g in G.elements() if g.order == 2 and g.qval == F(3, 4)]
    first = [coefficient(L, g, F(1, 4)) for g in cand]
    assert sorted(first) == [-1] * 10 + [0] * 6
    for g, v in zip(cand, first):
        if v:
            assert coefficient(L, g, F(49, 4)) == -337
        else:
            assert coefficient(L, g, F(5, 4)) == -8
    halves = [g for g in G.elements() if g.order == 4 and g.qval == F(3, 4)
              and coefficient(L, g, F(1, 4)) == F(-1, 2)]
    assert len(halves) == 120
    assert coefficient(L, halves[0], F(49, 4)) == F(-337, 2)


@pytest.mark.parametrize("lid,want", [("n10_1p1", -504), ("n18_1p1", -264), ("n26_1p1", -24)])
def test_unimodular(by_id, lid, want):
    L = by_id[lid]
    assert coefficient(L, discriminant_group(L.gram).zero(), 1) == want


def test_unimodular_second_coefficients(by_id):
    # E_4 = 1 + 240 sum sigma_3 q^n, weight 6 - k ... as a check on n-dependence:
    # for E8 + U + U the scalar series is E_6 = 1 - 504 sum sigma_5(n) q^n
    L = by_id["n10_1p1"]
    z = discriminant_group(L.gram).zero()
    for n in range(1, 8):
        assert coefficient(L, z, n) == -504 * sum(d**5 for d in range(1, n + 1) if n % d == 0)
    L = by_id["n26_1p1"]
    z = discriminant_group(L.gram).zero()
    # weight 14: E_14 = 1 - 24 sum sigma_13(n) q^n
    for n in range(1, 5):
        assert coefficient(L, z, n) == -24 * sum(d**13 for d in range(1, n + 1) if n % d == 0)


def test_index_validation(by_id):
    L = by_id["n3_8_7p1"]
    G = discriminant_group(L.gram)
    g = G.element((1,))
    with pytest.raises(ValueError):
        coefficient(L, g, 1)
    with pytest.raises(ValueError):
        coefficient(L, G.zero(), -1)


def test_frac_roundtrip():
    for x in (F(0), F(-337, 2), F(49, 4), F(7)):
        assert parse_frac(frac_str(x)) == x


def test_csv_and_json_ordering(table_4p4):
    lines = table_4p4.to_csv().splitlines()
    assert lines[0] == "gamma,n,coefficient"
    keys = [(tuple(map(int, r.split(",")[0].split())), F(r.split(",")[1])) for r in lines[1:]]
    assert keys == sorted(keys)
    data = json.loads(table_4p4.to_json(orbits=True))
    assert sorted(o["size"] for o in data["orbits"]) == [1, 6, 10, 15, 120, 120, 120, 120]


def test_cache_roundtrip(tmp_path, by_id):
    L = by_id["n3_2_7p3"]
    path = tmp_path / "coeffs.jsonl"
    t1 = expansion_table(L, 6, cache=CoefficientCache(path))
    assert path.exists() and path.stat().st_size > 0
    cached = CoefficientCache(path).load(L.id)
    assert cached == {k: v for k, v in t1.values.items()}
    t2 = expansion_table(L, 6, cache=CoefficientCache(path))
    assert t2.values == t1.values
    size = path.stat().st_size
    expansion_table(L, 6, cache=CoefficientCache(path))
    assert path.stat().st_size == size


def test_cache_rejects_conflicts(tmp_path):
    path = tmp_path / "bad.jsonl"
    rec = {"lattice": "x", "gamma": [0], "n": "1", "value": "-2"}
    path.write_text(json.dumps(rec) + "\n" + json.dumps({**rec, "value": "-3"}) + "\n")
    with pytest.raises(ValueError):
        CoefficientCache(path).load("x")
    path.write_text("not json\n")
    with pytest.raises(ValueError):
        CoefficientCache(path).load("x")


@pytest.mark.parametrize("L", build_catalog(), ids=lambda L: L.id)
def test_invariants_up_to_cap(L):
    """Nonpositivity, +-gamma symmetry, exact rationality and the lower bound."""
    cap = max(search_cap(L, L.n - 2), F(1))
    t = expansion_table(L, cap)  # NonCancellationError would propagate
    G = discriminant_group(L.gram)
    b = bound_for(L)
    k = F(L.rank, 2)
    for (coords, n), v in t.values.items():
        assert isinstance(v, F)
        assert v <= 0
        assert t.get(G.neg(G.element(coords)).coords, n) == v
        if v:
            assert -float(v) >= b.value_used * float(n) ** float(k - 1) * (1 - 1e-12)


def test_siegel_product_numeric(by_id):
    """Truncated product over all primes agrees with the exact value."""
    L = by_id["n3_2_7p1_4p4"]
    es = series_for(L)
    G = es.group
    g = G.zero()
    n = F(5)
    k = F(L.rank, 2)
    pref = (2 * math.pi) ** float(k) * float(n) ** float(k - 1) / (math.sqrt(L.expected_d) * math.gamma(float(k)))
    prod = 1.0
    lift = G.lift(g.coords)
    from singweight.local_counts import LocalCounter

    for p in [2, 3, 5, 7, 11, 13]:
        prod *= float(LocalCounter(L.gram, p).density(lift, n))
    for p in range(17, 20000):
        if all(p % q for q in range(2, int(p**0.5) + 1)):
            prod *= float(es.good_local_factor(n, p))
    assert -pref * prod == pytest.approx(float(coefficient(L, g, n)), rel=1e-3)
