from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

ODD_PRIMES = (3, 5, 7, 11, 13)


def _vp(x: Fraction, p: int) -> float:
    if x == 0:
        return float("inf")
    v, n, d = 0, x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def brute_digits(x: Fraction, p: int, lo: int, hi: int) -> list[int]:
    """Balanced digits at ``lo..hi`` by exhaustive search: the unique digit
    string from ``min(lo, v_p(x))`` to ``hi`` agreeing with ``x`` past ``hi``."""
    half = (p - 1) // 2
    base = lo if x == 0 else min(lo, int(_vp(x, p)))
    for digs in product(range(-half, half + 1), repeat=hi - base + 1):
        val = sum(Fraction(d) * Fraction(p) ** (base + i) for i, d in enumerate(digs))
        if _vp(x - val, p) > hi:
            return list(digs[lo - base:])
    raise AssertionError("no digit string found")


def brute_squares_mod(p: int) -> set[int]:
    return {k * k % p for k in range(p)}


primes = st.sampled_from(ODD_PRIMES)
