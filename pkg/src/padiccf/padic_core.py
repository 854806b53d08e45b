"""Balanced-digit p-adic arithmetic on exact rationals.

Digits are taken in the balanced range ``-(p-1)/2 .. (p-1)/2``.  Everything
here is exact: rationals are :class:`fractions.Fraction` and digit windows
are produced by modular reduction with carry.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

INF = math.inf


class InsufficientPrecision(ValueError):
    """Raised when a digit window does not reach the indices a floor needs."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    # deterministic Miller-Rabin for n < 3.3e24
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    """Validate that ``p`` is an odd prime and return it."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise TypeError(f"prime must be an int, got {type(p).__name__}")
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    return p


def vp_int(n: int, p: int) -> int | float:
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(x: Fraction | int, p: int) -> int | float:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def split_p(n: int, p: int) -> tuple[int, int]:
    """Return ``(v, u)`` with ``n = p**v * u`` and ``p`` not dividing ``u``."""
    if n == 0:
        raise ValueError("zero has no unit part")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def symmetric_mod(n: int, m: int) -> int:
    """The representative of ``n mod m`` in ``(-m/2, m/2]``; for odd ``m`` the
    interval is symmetric."""
    r = n % m
    if 2 * r > m:
        r -= m
    return r


@dataclass(frozen=True)
class PAdicApprox:
    """A window of balanced digits ``digits[i]`` at index ``start + i``.

    Digits below ``start`` are zero; digits past the window are unknown.  An
    empty digit tuple is the exact zero.
    """

    prime: int
    start: int
    digits: tuple[int, ...]

    def __post_init__(self):
        half = (self.prime - 1) // 2
        if any(abs(d) > half for d in self.digits):
            raise ValueError(f"digit out of balanced range for p={self.prime}")
        object.__setattr__(self, "digits", tuple(self.digits))

    @property
    def precision(self) -> int:
        return len(self.digits)

    @property
    def stop(self) -> int:
        """One past the highest stored index."""
        return self.start + len(self.digits)

    @property
    def valuation(self) -> int | float:
        """Index of the first nonzero stored digit (``inf`` if none)."""
        for i, d in enumerate(self.digits):
            if d:
                return self.start + i
        return INF

    def is_zero(self) -> bool:
        return not self.digits

    def digit(self, n: int) -> int:
        if n < self.start:
            return 0
        if n >= self.stop:
            raise InsufficientPrecision(f"digit {n} not stored (window ends at {self.stop - 1})")
        return self.digits[n - self.start]

    def truncated_value(self, upto: int | None = None) -> Fraction:
        """Exact value of the digits at indices ``< upto`` (all if None)."""
        hi = self.stop if upto is None else min(upto, self.stop)
        total = 0
        for d in reversed(self.digits[:max(hi - self.start, 0)]):
            total = total * self.prime + d
        return Fraction(total) * Fraction(self.prime) ** self.start

    def __str__(self) -> str:
        body = ",".join(str(d) for d in self.digits)
        tail = ",..." if self.digits else ""
        return f"p={self.prime} v={self.start} digits=[{body}{tail}]"

    _PATTERN = re.compile(r"p=(\d+) v=(-?\d+) digits=\[([^\]]*)\]")

    @classmethod
    def parse(cls, text: str) -> "PAdicApprox":
        m = cls._PATTERN.fullmatch(text.strip())
        if not m:
            raise ValueError(f"cannot parse p-adic approximation: {text!r}")
        items = [s for s in m.group(3).split(",") if s.strip() and s.strip() != "..."]
        return cls(int(m.group(1)), int(m.group(2)), tuple(int(s) for s in items))


@dataclass(frozen=True, order=False)
class PartialQuotient:
    """An element ``numerator / p**p_exponent`` of Z[1/p] in lowest terms."""

    numerator: int
    p_exponent: int
    prime: int

    def __post_init__(self):
        if self.p_exponent < 0:
            raise ValueError("p_exponent must be non-negative")
        if self.numerator == 0:
            if self.p_exponent != 0:
                raise ValueError("zero must have p_exponent 0")
        elif self.p_exponent and self.numerator % self.prime == 0:
            raise ValueError("partial quotient not in lowest terms")

    @classmethod
    def from_fraction(cls, x: Fraction | int, p: int) -> "PartialQuotient":
        x = Fraction(x)
        v, rest = split_p(x.denominator, p)
        if rest != 1:
            raise ValueError(f"{x} is not in Z[1/{p}]")
        return cls(x.numerator, v, p)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.prime ** self.p_exponent)

    @property
    def valuation(self) -> int | float:
        return vp_rational(self.value, self.prime)

    def in_J(self) -> bool:
        """Membership in J_p = Z[1/p] ∩ (-p/2, p/2)."""
        bound = self.prime ** (self.p_exponent + 1)
        return -bound < 2 * self.numerator < bound

    def in_K(self) -> bool:
        """Membership in K_p = Z[1/p] ∩ (-1/2, 1/2) with negative valuation."""
        bound = self.prime ** self.p_exponent
        return self.p_exponent >= 1 and -bound < 2 * self.numerator < bound

    def __str__(self) -> str:
        if self.p_exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{self.prime ** self.p_exponent}"

    @classmethod
    def parse(cls, text: str, p: int) -> "PartialQuotient":
        return cls.from_fraction(Fraction(text.strip()), p)


def _unit_residue(x: Fraction, p: int, shift: int, k: int) -> int:
    """``x * p**shift mod p**k``; the product must be a p-adic integer."""
    y = x * Fraction(p) ** shift
    v, den = split_p(y.denominator, p)
    if v:
        raise ValueError("value is not integral at the requested shift")
    mod = p ** k
    return y.numerator * pow(den, -1, mod) % mod


def digits_from_residue(r: int, p: int, count: int) -> list[int]:
    """Peel ``count`` balanced digits off an integer residue, carrying upward."""
    half = (p - 1) // 2
    out = []
    for _ in range(count):
        d = r % p
        if d > half:
            d -= p
        out.append(d)
        r = (r - d) // p
    return out


def balanced_digits(x: Fraction | int, p: int, lo: int, hi: int) -> PAdicApprox:
    """Balanced digits of ``x`` at indices ``lo..hi`` inclusive.

    The window is widened downward to ``v_p(x)`` when ``lo`` is above it, so
    the carries from lower digits are accounted for; only indices
    ``lo..hi`` are returned.
    """
    if lo > hi:
        raise ValueError(f"empty digit window: lo={lo} > hi={hi}")
    x = Fraction(x)
    if x == 0:
        return PAdicApprox(p, lo, (0,) * (hi - lo + 1))
    base = min(lo, vp_rational(x, p))
    k = hi + 1 - base
    r = _unit_residue(x, p, -base, k)
    digits = digits_from_residue(r, p, k)
    return PAdicApprox(p, lo, tuple(digits[lo - base:]))


def s_floor(x: PAdicApprox) -> Fraction:
    """Sum of the digits at indices ``<= 0``."""
    if x.is_zero() or x.start > 0:
        return Fraction(0)
    if x.stop <= 0:
        raise InsufficientPrecision("s needs the digit at index 0")
    return x.truncated_value(1)


def t_floor(x: PAdicApprox) -> Fraction:
    """Sum of the digits at indices ``<= -1``."""
    if x.is_zero() or x.start >= 0:
        return Fraction(0)
    if x.stop <= -1:
        raise InsufficientPrecision("t needs the digit at index -1")
    return x.truncated_value(0)


def s_of(x: Fraction | int, p: int) -> Fraction:
    """``s`` of an exact rational."""
    x = Fraction(x)
    v = vp_rational(x, p)
    if v == INF or v > 0:
        return Fraction(0)
    return s_floor(balanced_digits(x, p, v, 0))


def t_of(x: Fraction | int, p: int) -> Fraction:
    """``t`` of an exact rational."""
    x = Fraction(x)
    v = vp_rational(x, p)
    if v == INF or v >= 0:
        return Fraction(0)
    return t_floor(balanced_digits(x, p, v, -1))


def sign(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def digits_value(digits: Sequence[int], p: int, start: int = 0) -> Fraction:
    return sum((Fraction(d) * Fraction(p) ** (start + i) for i, d in enumerate(digits)), Fraction(0))
