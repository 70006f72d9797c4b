"""Coefficient ring: exact Laurent arithmetic in A^(1/2) and the v_i."""

import random
from fractions import Fraction

import pytest

from arcalg import (
    ArityError,
    LaurentPoly,
    Monomial,
    a_half_power,
    a_power,
    const,
    delta,
    one,
    v_power,
    zero,
)


def rand_poly(rng, arity, max_terms=3):
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        mono = Monomial(
            rng.randint(-4, 4), tuple(rng.randint(-2, 2) for _ in range(arity))
        )
        terms[mono] = rng.randint(-5, 5)
    return LaurentPoly(arity, terms)


def test_additive_inverse():
    A = a_power(1, 0)
    assert (A + (-A)).is_zero
    assert A + (-A) == zero(0)


def test_term_merge():
    A = a_power(1, 0)
    Ainv = a_power(-1, 0)
    s = (A + Ainv) + (-(A * A) - Ainv * Ainv)
    assert s == -a_power(2, 0) + A + Ainv - a_power(-2, 0)


def test_coefficient_addition():
    v1 = v_power(1, 1)
    assert v1 + v1 == v1 * 2


def test_binomial_square():
    A = a_power(1, 0)
    assert (A - A ** -1) ** 2 == a_power(2, 0) - const(2, 0) + a_power(-2, 0)


def test_delta_square():
    d = delta(0)
    assert d * d == a_power(1, 0) + const(2, 0) + a_power(-1, 0)
    assert str(d * d) == "A + 2 + A^-1"


def test_monomial_inverse():
    v1 = v_power(1, 2)
    assert v_power(1, 2, -1) * v1 == one(2)


def test_arity_mismatch():
    with pytest.raises(ArityError):
        a_power(1, 0) + a_power(1, 1)
    with pytest.raises(ArityError):
        v_power(1, 1) * v_power(1, 2)


def test_unit_inverse():
    u = a_half_power(3, 2) * v_power(2, 2, -1)
    inv = u.try_unit_inverse()
    assert inv is not None and u * inv == one(2)
    assert (u * 2).try_unit_inverse() is None
    assert (u + one(2)).try_unit_inverse() is None


def test_specialize_powers_of_a():
    assert a_power(2, 0).specialize(2) == 16
    assert delta(0).specialize(2) == Fraction(5, 2)


def test_specialize_v_monomial():
    p = v_power(1, 2, -1) * v_power(2, 2)
    assert p.specialize(1, (3, 5)) == Fraction(5, 3)


def test_specialize_rejects_zero():
    with pytest.raises(ValueError):
        delta(0).specialize(0)
    with pytest.raises(ValueError):
        v_power(1, 1).specialize(1, (0,))


def test_ring_axioms_random():
    rng = random.Random(20240311)
    for _ in range(1000):
        p = rand_poly(rng, 2)
        q = rand_poly(rng, 2)
        r = rand_poly(rng, 2)
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r


def test_specialize_is_homomorphism():
    rng = random.Random(987)
    vals = (Fraction(2), (Fraction(3, 2), Fraction(-5)))
    for _ in range(300):
        p = rand_poly(rng, 2)
        q = rand_poly(rng, 2)
        assert (p * q).specialize(*vals) == p.specialize(*vals) * q.specialize(*vals)
        assert (p + q).specialize(*vals) == p.specialize(*vals) + q.specialize(*vals)


def test_canonical_print_order():
    # graded order, largest degree first
    p = -(a_power(1, 2) * v_power(1, 2, -1) * v_power(2, 2, -1)) * (
        a_power(1, 2) - a_power(-1, 2)
    )
    assert str(p) == "-A^2*v1^-1*v2^-1 + v1^-1*v2^-1"


def test_half_power_print():
    assert str(a_half_power(1, 0)) == "A^(1/2)"
    assert str(a_half_power(-3, 0)) == "A^(-3/2)"
    assert str(a_half_power(4, 0)) == "A^2"
    assert str(zero(0)) == "0"


def test_hash_and_equality():
    rng = random.Random(5)
    for _ in range(100):
        p = rand_poly(rng, 1)
        q = LaurentPoly(1, dict(p.terms()))
        assert p == q and hash(p) == hash(q)
