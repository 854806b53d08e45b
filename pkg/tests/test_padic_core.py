import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiccf.padic_core import (
    InsufficientPrecision,
    PAdicApprox,
    PartialQuotient,
    balanced_digits,
    check_prime,
    digits_value,
    s_floor,
    s_of,
    t_floor,
    t_of,
    vp_rational,
)
from padiccf.quad_field import HenselRoot, QuadInt, digits_of_quad

from conftest import brute_digits, primes


def test_vp_rational_examples():
    assert vp_rational(75, 5) == 2
    assert vp_rational(Fraction(1, 75), 5) == -2
    for p in (3, 5, 7):
        assert vp_rational(1, p) == 0
        assert vp_rational(0, p) == math.inf


@pytest.mark.parametrize("p", [2, 1, 0, 9, 15, -3])
def test_check_prime_rejects(p):
    with pytest.raises(ValueError):
        check_prime(p)


def test_balanced_digits_examples():
    six = balanced_digits(6, 7, 0, 1)
    assert six.digits == (-1, 1)
    assert -1 + 1 * 7 == 6
    assert balanced_digits(0, 5, 0, 4).digits == (0,) * 5
    fifth = balanced_digits(Fraction(1, 5), 5, -1, -1)
    assert fifth.start == -1 and fifth.digits == (1,)


def test_balanced_digits_rejects_empty_window():
    with pytest.raises(ValueError):
        balanced_digits(3, 5, 2, 1)


@settings(max_examples=200, deadline=None)
@given(primes, st.integers(-3000, 3000), st.integers(1, 3000), st.integers(-3, 1), st.integers(0, 2))
def test_balanced_digits_match_brute_force(p, num, den, lo, width):
    x = Fraction(num, den)
    hi = lo + width
    got = balanced_digits(x, p, lo, hi)
    assert list(got.digits) == brute_digits(x, p, lo, hi)


@settings(max_examples=200, deadline=None)
@given(primes, st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6))
def test_digits_reproduce_value_modulo_window(p, num, den):
    x = Fraction(num, den)
    lo = min(0, vp_rational(x, p)) if x else 0
    approx = balanced_digits(x, p, lo, 8)
    assert vp_rational(x - approx.truncated_value(), p) >= 9


def test_s_and_t_on_square_root_examples():
    root = HenselRoot(30, 7)
    sqrt30 = digits_of_quad(QuadInt.sqrt(30), root, 0, 3)
    assert s_floor(sqrt30) == 3
    shifted = digits_of_quad(QuadInt(3, 1, 1, 30), root, 0, 3)
    assert s_floor(shifted) == -1
    # valuation >= 1 leaves nothing at index <= 0
    assert s_floor(PAdicApprox(7, 1, (2, 1))) == 0
    assert t_floor(PAdicApprox(7, 0, (2, 1))) == 0


def test_floors_of_zero_are_zero():
    zero = PAdicApprox(5, 0, ())
    assert s_floor(zero) == 0 and t_floor(zero) == 0


def test_floors_need_enough_digits():
    short = PAdicApprox(7, -3, (1, 2))
    with pytest.raises(InsufficientPrecision):
        s_floor(short)
    with pytest.raises(InsufficientPrecision):
        t_floor(short)
    assert t_floor(PAdicApprox(7, -3, (1, 2, 3))) == Fraction(1, 343) + Fraction(2, 49) + Fraction(3, 7)


@st.composite
def j_elements(draw, p):
    n = draw(st.integers(0, 5))
    bound = (p ** (n + 1) - 1) // 2
    a = draw(st.integers(-bound, bound).filter(lambda a: n == 0 or a % p))
    return PartialQuotient(a, n if a else 0, p)


@st.composite
def k_elements(draw, p):
    n = draw(st.integers(1, 5))
    bound = (p ** n - 1) // 2
    a = draw(st.integers(-bound, bound).filter(lambda a: a % p))
    return PartialQuotient(a, n, p)


@st.composite
def j_pairs(draw):
    p = draw(primes)
    return draw(j_elements(p)), draw(j_elements(p))


@st.composite
def k_pairs(draw):
    p = draw(primes)
    return draw(k_elements(p)), draw(k_elements(p))


@settings(max_examples=300, deadline=None)
@given(j_pairs())
def test_J_pairs_differ_in_nonpositive_valuation(pair):
    a, b = pair
    assert a.in_J() and b.in_J()
    if a != b:
        assert vp_rational(a.value - b.value, a.prime) <= 0


@settings(max_examples=300, deadline=None)
@given(k_pairs())
def test_K_pairs_differ_in_negative_valuation(pair):
    a, b = pair
    assert a.in_K() and b.in_K()
    if a != b:
        assert vp_rational(a.value - b.value, a.prime) < 0


@settings(max_examples=300, deadline=None)
@given(primes, st.integers(-6, 2), st.lists(st.integers(-6, 6), min_size=1, max_size=12))
def test_floor_bounds_and_valuations(p, start, raw):
    half = (p - 1) // 2
    digits = tuple(max(-half, min(half, d)) for d in raw)
    # pad so the window always reaches index 0
    need = max(0, 1 - (start + len(digits)))
    approx = PAdicApprox(p, start, digits + (0,) * need)
    x = approx.truncated_value()
    t = t_floor(approx)
    s = s_floor(approx)
    assert abs(t) < Fraction(1, 2)
    assert abs(s) < Fraction(p, 2)
    assert vp_rational(x - s, p) >= 1
    assert vp_rational(x - t, p) >= 0
    if t:
        assert PartialQuotient.from_fraction(t, p).in_K()
    if s:
        assert PartialQuotient.from_fraction(s, p).in_J()


@settings(max_examples=200, deadline=None)
@given(j_pairs())
def test_partial_quotient_digit_round_trip(pair):
    q = pair[0]
    p = q.prime
    lo = -q.p_exponent
    approx = balanced_digits(q.value, p, lo, 0)
    assert approx.truncated_value() == q.value
    assert s_of(q.value, p) == q.value
    assert balanced_digits(approx.truncated_value(), p, lo, 0) == approx


def test_partial_quotient_serialization():
    assert str(PartialQuotient(-5, 1, 7)) == "-5/7"
    assert str(PartialQuotient(3, 0, 7)) == "3"
    assert str(PartialQuotient.from_fraction(Fraction(-7, 25), 5)) == "-7/25"
    for text in ("-5/7", "3", "0", "62/125"):
        p = 7 if "7" in text else 5
        assert str(PartialQuotient.parse(text, p)) == text
    with pytest.raises(ValueError):
        PartialQuotient.from_fraction(Fraction(1, 3), 5)
    with pytest.raises(ValueError):
        PartialQuotient(0, 2, 5)


def test_membership_predicates():
    assert PartialQuotient(3, 0, 7).in_J() and not PartialQuotient(3, 0, 7).in_K()
    assert PartialQuotient(2, 1, 7).in_K() and PartialQuotient(2, 1, 7).in_J()
    assert not PartialQuotient(4, 1, 7).in_K()  # 4/7 > 1/2
    assert not PartialQuotient(4, 0, 7).in_J()  # 4 > 7/2


def test_approx_serialization_round_trip():
    a = PAdicApprox(7, -1, (3, 1, -2))
    assert str(a) == "p=7 v=-1 digits=[3,1,-2,...]"
    assert PAdicApprox.parse(str(a)) == a
    assert PAdicApprox.parse("p=5 v=0 digits=[]").is_zero()
    with pytest.raises(ValueError):
        PAdicApprox(5, 0, (3,))


def test_t_and_s_of_rationals():
    assert s_of(Fraction(22, 7), 7) == Fraction(22, 7)
    assert t_of(Fraction(22, 7), 7) == Fraction(1, 7)
    assert t_of(5, 7) == 0
    assert digits_value([-1, 1], 7) == 6
