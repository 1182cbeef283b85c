import itertools
import math

import numpy as np
import pytest

from singweight.theta import (
    CASES,
    EVEN_CHARS,
    IllConditionedError,
    NoSampleError,
    REALIZATIONS,
    SiegelPoint,
    ThetaChar,
    divisor_equation,
    divisor_theta_class,
    good_elements,
    heegner_sample,
    random_point,
    theta_constant,
    v_bilinear,
    v_norm,
    verify_case,
    x_of_z,
)

I2 = SiegelPoint(1j, 0, 1j)


def test_even_characteristics():
    assert len(EVEN_CHARS) == 10
    with pytest.raises(ValueError):
        ThetaChar(1, 0, 1, 0)


def test_theta_values():
    assert abs(theta_constant(ThetaChar(1, 1, 1, 1), I2)) < 1e-10
    genus1 = math.pi ** 0.25 / math.gamma(0.75)
    assert theta_constant(ThetaChar(0, 0, 0, 0), I2) == pytest.approx(genus1**2, abs=1e-10)
    assert abs(theta_constant(ThetaChar(0, 0, 0, 0), I2) - 1.18034) < 1e-5
    with pytest.raises(IllConditionedError):
        theta_constant(ThetaChar(0, 0, 0, 0), SiegelPoint(1e-4j, 0, 1j))


def test_theta_even_under_shift():
    # theta_{00b}(Z + B) for integral even B only changes by a character sign
    rng = np.random.default_rng(3)
    for _ in range(20):
        Z = random_point(rng)
        for ch in EVEN_CHARS:
            a = theta_constant(ch, Z)
            b = theta_constant(ch, SiegelPoint(Z.z1 + 2, Z.z2, Z.z3))
            assert abs(abs(a) - abs(b)) < 1e-9


def test_theta_1111_vanishes_on_z2_zero():
    rng = np.random.default_rng(1)
    pts = heegner_sample((0, 0, 0, 0, 1), 30, rng)
    for Z in pts:
        assert abs(Z.z2) < 1e-12
        assert abs(theta_constant(ThetaChar(1, 1, 1, 1), Z)) < 1e-10


def test_x_of_z_properties():
    rng = np.random.default_rng(0)
    X = x_of_z(I2)
    assert np.allclose(X, [1, 1, 1j, 1j, 0])
    for _ in range(1000):
        Z = random_point(rng)
        X = x_of_z(Z)
        re, im = X.real, X.imag
        assert abs(v_norm(X)) < 1e-10
        assert abs(v_norm(re) - 1) < 1e-10 and abs(v_norm(im) - 1) < 1e-10
        assert abs(v_bilinear(re, im)) < 1e-10


def test_divisor_equation_is_pairing():
    rng = np.random.default_rng(5)
    for _ in range(200):
        Z = random_point(rng)
        x = rng.integers(-5, 6, size=5)
        X = x_of_z(Z)
        scale = math.sqrt(np.linalg.det(Z.imag))
        # (x, X(Z)) is proportional to the divisor equation
        assert abs(v_bilinear(x, X) * scale - divisor_equation(x, Z)) < 1e-9


def test_congruence_classes():
    assert divisor_theta_class((0, 0, 0, 0, 1)) == ThetaChar(1, 1, 1, 1)
    assert divisor_theta_class((0, 2, 0, 0, 1)) == ThetaChar(0, 0, 1, 1)
    assert divisor_theta_class((2, -2, 2, 2, 1)) == ThetaChar(0, 0, 0, 0)
    with pytest.raises(ValueError):
        divisor_theta_class((2, 2, 2, 2, 1))  # Q = 7


def test_congruence_table_injective():
    seen = {}
    r = range(-8, 9)
    for x in itertools.product(r, repeat=5):
        if v_norm(x) != -1:
            continue
        ch = divisor_theta_class(x)
        if ch is not None:
            seen.setdefault(ch, 0)
            seen[ch] += 1
    assert len(seen) == 10


def test_divisor_class_vanishing():
    rng = np.random.default_rng(9)
    for x in [(0, 0, 0, 0, 1), (0, 2, 0, 0, 1), (2, -2, 2, 2, 1), (0, 0, 2, 0, 1)]:
        ch = divisor_theta_class(x)
        for Z in heegner_sample(x, 10, rng):
            assert abs(divisor_equation(x, Z)) < 1e-12
            assert abs(theta_constant(ch, Z)) < 1e-8


def test_heegner_sample_rejects_boundary():
    with pytest.raises(NoSampleError):
        heegner_sample((0, 0, 0, 1, 0), 5, np.random.default_rng(0), tries=200)
    with pytest.raises(ValueError):
        heegner_sample((0, 0, 0, 0, 0), 1)


@pytest.mark.parametrize("case", sorted(REALIZATIONS))
def test_realization_matches_catalog_genus(case, by_id):
    from singweight.lattice import discriminant_group

    real = REALIZATIONS[case]
    G = discriminant_group(real.gram)
    H = discriminant_group(by_id[real.catalog_id].gram)
    assert G.order == H.order
    qs = sorted((g.order, g.qval) for g in G.elements())
    assert qs == sorted((g.order, g.qval) for g in H.elements())


def test_good_element_counts():
    counts = {c: len(good_elements(REALIZATIONS[c])) for c in REALIZATIONS}
    assert counts == {"5.1": 1, "5.2": 1, "5.3": 8, "5.4": 10, "5.5": 70}  # one entry per +-pair


@pytest.mark.parametrize("case", sorted(CASES))
def test_verify_case(case):
    r = verify_case(case, seed=0)
    assert r.passed, r.to_json()
    for p in r.pairs:
        assert p.max_on_divisor < 1e-8 and p.n_divisor >= 20
        assert p.min_off_divisor > 1e-3 and p.n_control >= 100
