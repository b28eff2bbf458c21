import json
import random
from fractions import Fraction

import pytest

from cantorwave.laurent import (LaurentPoly, RatC, autocorrelation, evaluate,
                                haar_integral, inner_product)
from conftest import random_poly, random_ratc


def P(coeffs):
    return LaurentPoly(coeffs)


class TestRatC:
    def test_exact_roundtrip(self):
        rng = random.Random(1)
        for _ in range(200):
            a, b = random_ratc(rng), random_ratc(rng)
            assert (a + b) - b == a

    def test_division(self):
        a = RatC(Fraction(3), Fraction(4))
        assert a / a == 1
        assert RatC.of(1) / RatC(Fraction(0), Fraction(1)) == RatC(Fraction(0), Fraction(-1))
        with pytest.raises(ZeroDivisionError):
            a / RatC.of(0)

    def test_conjugation_involution(self):
        rng = random.Random(2)
        for _ in range(100):
            a = random_ratc(rng)
            assert a.conjugate().conjugate() == a
            assert a.abs2() == (a * a.conjugate()).re


class TestAdd:
    def test_cancellation(self):
        assert P({1: 1, -1: 1}) + P({-1: -1}) == P({1: 1})

    def test_identity(self):
        rng = random.Random(3)
        for _ in range(30):
            p = random_poly(rng)
            assert p + LaurentPoly.zero() == p

    def test_weight_assembly(self):
        got = P({0: 1, 2: Fraction(1, 2)}) + P({-2: Fraction(1, 2)})
        assert got == P({0: 1, 2: Fraction(1, 2), -2: Fraction(1, 2)})


class TestMul:
    def test_monomials(self):
        assert P({2: 1}) * P({-2: 1}) == LaurentPoly.one()

    def test_hand_expansion(self):
        assert P({0: 1, 2: 1}) * P({0: 1, -2: 1}) == P({0: 2, 2: 1, -2: 1})

    def test_identity(self):
        rng = random.Random(4)
        for _ in range(30):
            p = random_poly(rng)
            assert p * LaurentPoly.one() == p

    def test_ring_axioms(self):
        rng = random.Random(5)
        for _ in range(40):
            p, q, r = (random_poly(rng, max_terms=4, span=4) for _ in range(3))
            assert (p + q) + r == p + (q + r)
            assert p + q == q + p
            assert (p * q) * r == p * (q * r)
            assert p * q == q * p
            assert p * (q + r) == p * q + p * r


class TestAutocorrelation:
    def test_cantor_numerator(self):
        got = autocorrelation(P({0: 1, 2: 1}))
        assert got == P({0: 2, 2: 1, -2: 1})
        assert got * Fraction(1, 2) == P({0: 1, 2: Fraction(1, 2),
                                          -2: Fraction(1, 2)})

    def test_unimodular_monomial(self):
        for k in (-3, 0, 5):
            assert autocorrelation(P({k: 1})) == LaurentPoly.one()

    def test_haar_numerator(self):
        assert autocorrelation(P({0: 1, 1: 1})) == P({0: 2, 1: 1, -1: 1})

    def test_hermitian_on_random(self):
        rng = random.Random(6)
        for _ in range(50):
            p = random_poly(rng)
            assert autocorrelation(p).is_hermitian()


class TestIntegrals:
    def test_haar_constant_extraction(self):
        assert haar_integral(P({0: 1, 2: Fraction(1, 2),
                                -2: Fraction(1, 2)})) == 1
        assert haar_integral(P({5: 1})) == 0
        assert haar_integral(LaurentPoly.zero()) == 0

    def test_inner_orthogonality(self):
        assert inner_product(P({1: 1}), P({1: 1})) == 1
        assert inner_product(P({1: 1}), P({2: 1})) == 0
        p = P({0: 1, 2: Fraction(1, 2)})
        assert inner_product(p, p) == Fraction(5, 4)

    def test_parseval(self):
        rng = random.Random(7)
        for _ in range(50):
            p = random_poly(rng)
            expected = sum((c.abs2() for _k, c in p.items()), Fraction(0))
            got = haar_integral(autocorrelation(p))
            assert got == RatC(expected, Fraction(0))

    def test_inner_positive_definite(self):
        rng = random.Random(8)
        for _ in range(50):
            p = random_poly(rng)
            v = inner_product(p, p)
            assert v.im == 0 and v.re >= 0
            assert (v.re == 0) == (not p)


class TestEvaluate:
    def test_at_zero(self):
        assert abs(evaluate(P({0: 1, 2: 1}), 0) - 2) < 1e-14

    def test_third_turn(self):
        import cmath
        got = evaluate(P({0: 1, 2: 1}), Fraction(1, 3))
        want = 1 + cmath.exp(4j * cmath.pi / 3)
        assert abs(got - want) < 1e-12
        assert abs(abs(got)**2 - 1.0) < 1e-12

    def test_quarter_turn(self):
        assert abs(evaluate(P({1: 1}), Fraction(1, 4)) - 1j) < 1e-14


class TestSerialization:
    def test_exact_roundtrip(self):
        rng = random.Random(9)
        for _ in range(30):
            p = random_poly(rng)
            blob = json.dumps(p.to_json_dict())
            assert LaurentPoly.from_json_dict(json.loads(blob)) == p

    def test_shape(self):
        p = P({-2: Fraction(1, 2), 0: RatC(Fraction(1), Fraction(-2, 3))})
        assert p.to_json_dict() == {"-2": [1, 2, 0, 1], "0": [1, 1, -2, 3]}
