"""Exact quadratic irrationals ``(a + b*sqrt(D))/c`` embedded in Q_p.

The embedding is fixed by a :class:`HenselRoot`, a lazily extended p-adic
square root of ``D`` on a chosen branch.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

from .padic_core import (
    INF,
    PAdicApprox,
    check_prime,
    digits_from_residue,
    s_floor,
    split_p,
    symmetric_mod,
    t_floor,
    vp_int,
    vp_rational,
)

DEFAULT_PRECISION_CAP = 2 ** 20
INITIAL_PRECISION = 64


class PrecisionError(RuntimeError):
    """The hard digit cap of a root was exceeded."""


class NoSquareRoot(ValueError):
    pass


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_exists(D: int, p: int) -> bool:
    """True iff ``D`` is a nonzero square in Q_p."""
    if D == 0:
        raise ValueError("D must be nonzero")
    v, unit = split_p(D, p)
    return v % 2 == 0 and legendre(unit, p) == 1


def sqrt_mod_prime(a: int, p: int) -> int:
    """Tonelli-Shanks square root of a nonzero residue ``a`` mod ``p``."""
    a %= p
    if legendre(a, p) != 1:
        raise NoSquareRoot(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


class HenselRoot:
    """A p-adic square root of ``D`` refined on demand by Newton steps.

    ``branch=+1`` is the root whose leading balanced digit lies in
    ``1..(p-1)/2``; ``branch=-1`` is its negative.  Precision starts at 64
    digits and doubles; requests beyond ``cap`` raise :class:`PrecisionError`.
    """

    def __init__(self, D: int, p: int, branch: int = 1, precision: int = INITIAL_PRECISION,
                 cap: int = DEFAULT_PRECISION_CAP):
        check_prime(p)
        if D == 0:
            raise ValueError("D must be nonzero")
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if not sqrt_exists(D, p):
            raise NoSquareRoot(f"{D} has no square root in Q_{p}")
        self.prime = p
        self.D = D
        self.branch = branch
        self.cap = cap
        v, self._unit = split_p(D, p)
        self.shift = v // 2
        r0 = sqrt_mod_prime(self._unit, p)
        if symmetric_mod(r0, p) < 0:
            r0 = p - r0
        if branch < 0:
            r0 = p - r0
        self._r = r0
        self._prec = 1
        self._lock = threading.Lock()
        self.ensure(min(max(precision, INITIAL_PRECISION), cap))

    @property
    def precision(self) -> int:
        """Number of correct digits of the unit root ``sqrt(D / p**(2*shift))``."""
        return self._prec

    def ensure(self, n: int) -> None:
        if n <= self._prec:
            return
        if n > self.cap:
            raise PrecisionError(f"need {n} digits of sqrt({self.D}) in Q_{self.prime}, cap is {self.cap}")
        with self._lock:
            while self._prec < n:
                k = min(2 * self._prec, self.cap)
                mod = self.prime ** k
                r = self._r
                self._r = (r - (r * r - self._unit) * pow(2 * r, -1, mod)) % mod
                self._prec = k

    def residue(self, n: int) -> int:
        """``sqrt(D) mod p**n`` as an integer in ``[0, p**n)``."""
        if n <= 0:
            return 0
        need = n - self.shift
        if need <= 0:
            return 0
        self.ensure(need)
        mod = self.prime ** n
        return self._r * self.prime ** self.shift % mod

    def digits(self, count: int) -> PAdicApprox:
        """The first ``count`` balanced digits of ``sqrt(D)`` from index 0."""
        return PAdicApprox(self.prime, 0, tuple(digits_from_residue(self.residue(count), self.prime, count)))

    def __repr__(self):
        return f"HenselRoot(D={self.D}, p={self.prime}, branch={self.branch:+d}, precision={self._prec})"


def hensel_sqrt(D: int, p: int, precision: int = INITIAL_PRECISION, branch: int = 1,
                cap: int = DEFAULT_PRECISION_CAP) -> HenselRoot:
    if D == 0:
        raise ValueError("D must be nonzero")
    return HenselRoot(D, p, branch=branch, precision=precision, cap=cap)


@dataclass(frozen=True)
class QuadInt:
    """``(a + b*sqrt(D)) / c`` in canonical form.

    Canonical means ``gcd(a, b, c) = 1`` and ``c > 0``; a rational value
    (``b = 0``) carries ``D = 0`` and ``branch = +1``.  ``branch`` records
    which p-adic root of ``D`` the symbol ``sqrt(D)`` stands for.
    """

    a: int
    b: int
    c: int
    D: int = 0
    branch: int = 1

    def __post_init__(self):
        a, b, c, D, branch = self.a, self.b, self.c, self.D, self.branch
        if c == 0:
            raise ZeroDivisionError("QuadInt with zero denominator")
        if b == 0:
            D, branch = 0, 1
        elif is_square(D):
            raise ValueError(f"radicand {D} is a perfect square")
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        g = math.gcd(math.gcd(a, b), c)
        if c < 0:
            g = -g
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "c", c // g)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "branch", branch)

    @classmethod
    def rational(cls, x: Fraction | int) -> "QuadInt":
        x = Fraction(x)
        return cls(x.numerator, 0, x.denominator)

    @classmethod
    def sqrt(cls, D: int, branch: int = 1) -> "QuadInt":
        return cls(0, 1, 1, D, branch)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.a, self.c)

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def _coerce(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.b and self.b and (other.D, other.branch) != (self.D, self.branch):
                raise ValueError("operands live in different quadratic embeddings")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadInt.rational(other)
        return NotImplemented

    def _field(self, other: "QuadInt") -> tuple[int, int]:
        return (self.D, self.branch) if self.b else (other.D, other.branch)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D, br = self._field(o)
        return QuadInt(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, D, br)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.c, self.D, self.branch)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D, br = self._field(o)
        return QuadInt(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, self.c * o.c, D, br)

    __rmul__ = __mul__

    def invert(self) -> "QuadInt":
        if not self:
            raise ZeroDivisionError("inverse of zero")
        norm = self.a * self.a - self.b * self.b * self.D
        return QuadInt(self.c * self.a, -self.c * self.b, norm, self.D, self.branch)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.invert()

    def __rtruediv__(self, other):
        return self.invert() * other

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.a, -self.b, self.c, self.D, self.branch)

    def norm(self) -> Fraction:
        """``x * conj(x)`` as a rational."""
        return Fraction(self.a * self.a - self.b * self.b * self.D, self.c * self.c)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a) if self.c == 1 else f"{self.a}/{self.c}"
        sign = "+" if self.b >= 0 else "-"
        return f"({self.a}{sign}{abs(self.b)}*sqrt({self.D}))/{self.c}"

    _QUAD = re.compile(r"\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*([+-]?\d+)\s*\)\s*\)\s*/\s*(\d+)")
    _RAT = re.compile(r"([+-]?\d+)(?:\s*/\s*(\d+))?")

    @classmethod
    def parse(cls, text: str, branch: int = 1) -> "QuadInt":
        """Parse ``"(a+b*sqrt(D))/c"`` or ``"a/c"`` (or a bare integer)."""
        s = text.strip()
        m = cls._QUAD.fullmatch(s)
        if m:
            b = int(m.group(3)) * (1 if m.group(2) == "+" else -1)
            c = int(m.group(5))
            if c == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return cls(int(m.group(1)), b, c, int(m.group(4)), branch)
        m = cls._RAT.fullmatch(s)
        if m:
            c = int(m.group(2)) if m.group(2) else 1
            if c == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return cls(int(m.group(1)), 0, c)
        raise ValueError(f"cannot parse {text!r}; expected '(a+b*sqrt(D))/c' or 'a/c'")


def quad_sub_rational(x: QuadInt, q: Fraction | int) -> QuadInt:
    q = Fraction(q)
    return QuadInt(x.a * q.denominator - q.numerator * x.c, x.b * q.denominator,
                   x.c * q.denominator, x.D, x.branch)


def quad_invert(x: QuadInt) -> QuadInt:
    return x.invert()


def conjugate(x: QuadInt) -> QuadInt:
    return x.conjugate()


def _check_root(x: QuadInt, root: HenselRoot) -> None:
    if x.b and (x.D, x.branch) != (root.D, root.branch):
        raise ValueError(f"root sqrt({root.D}) branch {root.branch:+d} does not embed {x}")


def _numerator_residue(x: QuadInt, root: HenselRoot, n: int) -> int:
    mod = root.prime ** n
    return (x.a + x.b * root.residue(n)) % mod


def vp_quad(x: QuadInt, root: HenselRoot | None = None, p: int | None = None) -> int | float:
    """Exact p-adic valuation of ``x`` under the embedding fixed by ``root``.

    The numerator's valuation is bounded by that of its norm
    ``a^2 - b^2 D``, which fixes how many root digits are needed.
    """
    if x.b == 0:
        return vp_rational(x.to_fraction(), p if root is None else root.prime)
    _check_root(x, root)
    p = root.prime
    bound = vp_int(x.a * x.a - x.b * x.b * x.D, p)
    n = bound + 1
    z = _numerator_residue(x, root, n)
    return vp_int(z, p) - vp_int(x.c, p)


def digits_of_quad(x: QuadInt, root: HenselRoot | None, lo: int, hi: int, p: int | None = None) -> PAdicApprox:
    """Balanced digits of the embedded value of ``x`` at indices ``lo..hi``."""
    if lo > hi:
        raise ValueError(f"empty digit window: lo={lo} > hi={hi}")
    if root is None:
        if not x.is_rational():
            raise ValueError("an irrational value needs a root")
        if p is None:
            raise ValueError("p is required for rational values without a root")
    else:
        _check_root(x, root)
        p = root.prime
    width = hi - lo + 1
    if not x:
        return PAdicApprox(p, lo, (0,) * width)
    m, c_unit = split_p(x.c, p)
    # x = u / p**m with u a p-adic integer; digit n of x is digit n+m of u
    count = hi + 1 + m
    if count <= 0:
        return PAdicApprox(p, lo, (0,) * width)
    mod = p ** count
    if x.b == 0:
        num = x.a % mod
    else:
        num = (x.a + x.b * root.residue(count)) % mod
    u = num * pow(c_unit, -1, mod) % mod
    ud = digits_from_residue(u, p, count)
    # ud[i] is the digit at index i - m
    out = [ud[n + m] if n + m >= 0 else 0 for n in range(lo, hi + 1)]
    return PAdicApprox(p, lo, tuple(out))


def quad_s(x: QuadInt, root: HenselRoot | None, p: int) -> Fraction:
    v = vp_quad(x, root, p)
    if v == INF or v > 0:
        return Fraction(0)
    return s_floor(digits_of_quad(x, root, v, 0, p))


def quad_t(x: QuadInt, root: HenselRoot | None, p: int) -> Fraction:
    v = vp_quad(x, root, p)
    if v == INF or v >= 0:
        return Fraction(0)
    return t_floor(digits_of_quad(x, root, v, -1, p))
