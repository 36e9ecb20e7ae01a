#!/usr/bin/env python3
"""
Tests for Laurent polynomials, specializations and Q(j) arithmetic.
sympy is used as an independent oracle.
"""

import random
from fractions import Fraction

import pytest
import sympy

from app.coeff import (
    J, CycloQ3, DivisionError, LaurentPoly, RingMismatchError, RingSpec, Specialization,
    cy_inv, cy_mul, lp_add, lp_mul, lp_specialize, phi_specialization,
)

RING = RingSpec(("a", "b", "c"), frozenset({"c"}))
G26_RING = RingSpec(("a", "b", "c", "d", "e"), frozenset({"c", "e"}))


def test_parse_and_print_canonical():
    p = RING.parse("b + 2*a*c^-1 - a*c^-1")
    assert str(p) == "b + a*c^-1"
    assert LaurentPoly.parse(str(p), RING) == p


def test_arithmetic_matches_sympy():
    p = RING.parse("a^2 - 3*b*c + c^-2")
    q = RING.parse("(a + c)*(b - c^-1)")
    assert sympy.expand((p * q).to_sympy() - p.to_sympy() * q.to_sympy()) == 0
    assert sympy.expand((p + q).to_sympy() - (p.to_sympy() + q.to_sympy())) == 0
    assert sympy.expand((p ** 3).to_sympy() - p.to_sympy() ** 3) == 0
    assert lp_add(p, q) == p + q
    assert lp_mul(p, q) == p * q


def test_negative_power_of_non_invertible_variable_is_rejected():
    with pytest.raises(ValueError):
        RING.parse("a^-1")


def test_ring_mismatch():
    other = RingSpec(("a", "b", "c"))
    with pytest.raises(RingMismatchError):
        lp_add(RING.parse("a"), other.parse("a"))


def test_units_and_inverse():
    assert RING.parse("-c^2").is_unit()
    assert not RING.parse("a").is_unit()
    assert not RING.parse("2*c").is_unit()
    assert RING.parse("c^3").inverse() == RING.parse("c^-3")
    with pytest.raises(DivisionError):
        RING.parse("a + c").inverse()


def test_divide_exact():
    ring = RingSpec(("c",))
    assert ring.parse("c^9").divide_exact(ring.parse("c")) == ring.parse("c^8")
    with pytest.raises(DivisionError):
        ring.parse("c^2 + 1").divide_exact(ring.parse("c"))
    with pytest.raises(DivisionError):
        ring.parse("3*c").divide_exact(ring.parse("2*c"))


def test_specialize_and_substitute():
    s = Specialization(RING, {"a": "1/2", "b": 0, "c": 3})
    p = RING.parse("a*c^-1 + b + 4")
    assert p.specialize(s) == Fraction(1, 6) + 4
    assert lp_specialize(p, s) == p.specialize(s)
    assert RING.parse("a - c").substitute({"a": J, "b": 0, "c": 1}, CycloQ3(1)) == J - 1


def test_specialization_validation():
    with pytest.raises(ValueError):
        Specialization(RING, {"a": 1, "b": 1})
    with pytest.raises(ValueError):
        Specialization(RING, {"a": 1, "b": 1, "c": 0})
    with pytest.raises(ValueError):
        Specialization(RING, {"a": 1, "b": 1, "c": 1, "z": 2})


def test_random_specialization_is_seeded():
    first = Specialization.random(G26_RING, 11)
    assert first == Specialization.random(G26_RING, 11)
    assert first.fingerprint() == Specialization.random(G26_RING, 11).fingerprint()
    assert all(v != 0 for v in first.values.values())


def test_parse_specialization():
    s = Specialization.parse("a=1/2, b=-3; c=7", RING)
    assert s.values == {"a": Fraction(1, 2), "b": Fraction(-3), "c": Fraction(7)}
    assert str(s) == "a=1/2, b=-3, c=7"


def test_phi_specialization_is_an_involution():
    s = Specialization.random(G26_RING, 3)
    twin = phi_specialization(s)
    assert twin.values["c"] == 1 / s.values["c"]
    assert twin.values["a"] == -s.values["b"] / s.values["c"]
    assert phi_specialization(twin) == s


def test_cyclotomic_arithmetic_matches_sympy():
    w = sympy.Rational(-1, 2) + sympy.sqrt(3) * sympy.I / 2

    def as_sympy(z: CycloQ3):
        return sympy.Rational(z.r0.numerator, z.r0.denominator) + sympy.Rational(z.r1.numerator, z.r1.denominator) * w

    u = CycloQ3(Fraction(2, 3), -5)
    v = CycloQ3(7, Fraction(1, 4))
    assert sympy.expand(as_sympy(cy_mul(u, v)) - as_sympy(u) * as_sympy(v)) == 0
    assert sympy.expand(as_sympy(cy_inv(u)) * as_sympy(u) - 1) == 0
    assert J * J == -1 - J
    assert J ** 3 == CycloQ3(1)
    assert (u * u.conjugate()).r1 == 0
    assert u.norm() == (u * u.conjugate()).r0


def test_cyclotomic_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        CycloQ3(0).inverse()


def random_poly(rng: random.Random, ring: RingSpec = RING, max_terms: int = 3) -> LaurentPoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        exps = tuple(rng.randint(-2, 2) if v in ring.invertible else rng.randint(0, 2) for v in ring.variables)
        terms[exps] = rng.randint(-5, 5)
    return LaurentPoly(ring, terms)


def random_cyclo(rng: random.Random) -> CycloQ3:
    return CycloQ3(Fraction(rng.randint(-9, 9), rng.randint(1, 9)), Fraction(rng.randint(-9, 9), rng.randint(1, 9)))


def test_laurent_ring_axioms_on_random_triples():
    rng = random.Random(2024)
    zero, one = RING.zero(), RING.one()
    for _ in range(1000):
        p, q, r = random_poly(rng), random_poly(rng), random_poly(rng)
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)
        assert p + q == q + p
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r
        assert p + zero == p and p * one == p
        assert p - p == zero


def test_specialization_is_a_ring_homomorphism():
    rng = random.Random(99)
    for seed in range(200):
        s = Specialization.random(RING, seed)
        p, q = random_poly(rng), random_poly(rng)
        assert (p * q).specialize(s) == p.specialize(s) * q.specialize(s)
        assert (p + q).specialize(s) == p.specialize(s) + q.specialize(s)
        assert (p - q).specialize(s) == p.specialize(s) - q.specialize(s)


def test_cyclotomic_field_axioms_on_random_inputs():
    rng = random.Random(5)
    one = CycloQ3(1)
    for _ in range(500):
        u, v, w = random_cyclo(rng), random_cyclo(rng), random_cyclo(rng)
        assert (u * v) * w == u * (v * w)
        assert u * v == v * u
        assert u * (v + w) == u * v + u * w
        assert (u + v) + w == u + (v + w)
        if u != CycloQ3(0):
            assert u * u.inverse() == one
            assert cy_mul(u, cy_inv(u)) == one


def test_root_of_unity_identities():
    assert 1 + J + J * J == CycloQ3(0)
    assert J ** 3 == 1
    assert J != 1


def test_constants_hash_like_ints():
    three = LaurentPoly.constant(RING, 3)
    assert three == 3
    assert hash(three) == hash(3)
    assert len({three, 3}) == 1
    assert hash(RING.zero()) == hash(0)
    assert hash(RING.parse("c")) == hash(RING.parse("c"))
    assert hash(CycloQ3(5)) == hash(5)
    assert hash(CycloQ3(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert len({CycloQ3(2), 2}) == 1
