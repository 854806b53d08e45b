"""Digit-window reimplementation of the expansion algorithms.

Values are held as ``p**v * (u + O(p**r))`` with ``u`` a unit known modulo
``p**r``.  Nothing here touches the exact engine: the square root is grown
digit by digit, and every subtraction and inversion tracks the precision
it loses.  When fewer than ``GUARD`` digits would remain beyond what a step
reads, a :class:`PrecisionFault` is raised instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

GUARD = 8
DEFAULT_WIDTH = 256
MAX_RETRIES = 4


class PrecisionFault(ArithmeticError):
    pass


def _val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _balanced(r: int, p: int, count: int) -> list[int]:
    half = p // 2
    out = []
    for _ in range(count):
        d = r % p
        if d > half:
            d -= p
        out.append(d)
        r = (r - d) // p
    return out


def _digit_sqrt(unit: int, p: int, count: int, branch: int) -> int:
    """A square root of ``unit`` modulo ``p**count``, one balanced digit at a time."""
    half = p // 2
    first = [d for d in range(1, half + 1) if (d * d - unit) % p == 0]
    if not first:
        raise ValueError(f"{unit} is not a square mod {p}")
    r = first[0] * branch
    pk = p
    for k in range(1, count):
        pk1 = pk * p
        for d in range(-half, half + 1):
            cand = r + d * pk
            if (cand * cand - unit) % pk1 == 0:
                r = cand
                break
        else:
            raise ValueError("digit lift failed")
        pk = pk1
    return r


@dataclass(frozen=True)
class StreamState:
    """``p**v * u`` with ``u`` a unit known mod ``p**r``; ``exact`` marks a
    rational whose window can be trusted to detect exact zero."""

    prime: int
    v: int
    u: int
    r: int
    exact: bool = False

    def digits_upto(self, index: int) -> list[int]:
        """Balanced digits at indices ``v..index``."""
        need = index - self.v + 1
        if need <= 0:
            return []
        if need > self.r - GUARD:
            raise PrecisionFault(f"need {need} digits, only {self.r - GUARD} past the guard")
        return _balanced(self.u, self.prime, need)

    def head(self, index: int) -> Fraction:
        """Sum of the digits at indices ``<= index``."""
        p = self.prime
        total = 0
        for d in reversed(self.digits_upto(index)):
            total = total * p + d
        return Fraction(total) * Fraction(p) ** self.v

    def minus(self, q: Fraction) -> "StreamState | None":
        """``self - q``; None when the difference vanishes on the whole window."""
        p = self.prime
        if q == 0:
            return self
        vq = _val(q.numerator, p) - _val(q.denominator, p)
        m = min(self.v, vq)
        absprec = self.v + self.r
        width = absprec - m
        if width <= 0:
            raise PrecisionFault("subtrahend below the known window")
        mod = p ** width
        qs = q * Fraction(p) ** (-m)
        den = qs.denominator
        z = (self.u * p ** (self.v - m) - qs.numerator * pow(den, -1, mod)) % mod
        if z == 0:
            return None
        k = _val(z, p)
        r = width - k
        if r <= GUARD:
            raise PrecisionFault("difference consumed the guard digits")
        return StreamState(p, m + k, (z // p ** k) % p ** r, r, self.exact)

    def inverse(self) -> "StreamState":
        mod = self.prime ** self.r
        return StreamState(self.prime, -self.v, pow(self.u, -1, mod), self.r, self.exact)


def _start(a: int, b: int, c: int, D: int, p: int, width: int, branch: int) -> StreamState:
    if c == 0:
        raise ZeroDivisionError("zero denominator")
    vc = _val(c, p)
    cu = c // p ** vc
    if b == 0:
        if a == 0:
            raise ValueError("cannot expand zero")
        va = _val(a, p)
        mod = p ** width
        u = (a // p ** va) * pow(cu, -1, mod) % mod
        return StreamState(p, va - vc, u, width, exact=True)
    vd = _val(D, p)
    if vd % 2:
        raise ValueError(f"{D} has no square root in Q_{p}")
    shift = vd // 2
    root = _digit_sqrt(D // p ** vd, p, width + shift, branch)
    n = width + shift
    mod = p ** n
    num = (a + b * p ** shift * root) % mod
    if num == 0:
        raise PrecisionFault("numerator vanishes on the window")
    k = _val(num, p)
    r = n - k
    rmod = p ** r
    u = (num // p ** k) * pow(cu, -1, rmod) % rmod
    return StreamState(p, k - vc, u, r)


def _kind_name(kind) -> str:
    name = getattr(kind, "value", kind)
    return str(name).lower().replace("_", "").replace("-", "")


def _run(a, b, c, D, p, kind, steps, width, branch):
    name = _kind_name(kind)
    if name not in ("browkin1", "browkin2", "browkin2star"):
        raise ValueError(f"unknown algorithm {kind!r}")
    x = _start(a, b, c, D, p, width, branch)
    if name == "browkin2star" and x.v >= 0:
        raise ValueError("Browkin II* needs negative valuation at the start")
    out: list[Fraction] = []
    for n in range(steps):
        if name == "browkin1":
            use_s = True
        elif name == "browkin2":
            use_s = n % 2 == 0
        else:
            use_s = n % 2 == 1
        if use_s:
            q = x.head(0) if x.v <= 0 else Fraction(0)
            rest = x.minus(q)
        else:
            q = x.head(-1) if x.v < 0 else Fraction(0)
            rest = x.minus(q)
            if rest is None and not x.exact:
                raise PrecisionFault("cannot certify the t-branch valuation")
            if rest is None or rest.v != 0:
                q = q - (q > 0) + (q < 0)
                rest = x.minus(q)
        out.append(q)
        if rest is None:
            if not x.exact:
                raise PrecisionFault("difference vanished on the window")
            return out, True
        x = rest.inverse()
    return out, False


@dataclass(frozen=True)
class OracleResult:
    quotients: tuple[Fraction, ...]
    finished: bool
    width: int
    inconclusive: bool = False


def oracle_expand(a: int, b: int, c: int, D: int, p: int, kind, steps: int,
                  width: int = DEFAULT_WIDTH, branch: int = 1, retries: int = MAX_RETRIES) -> OracleResult:
    """Up to ``steps`` partial quotients of ``(a + b*sqrt(D))/c``.

    Faults are retried at doubled width; after ``retries`` doublings the
    result is marked inconclusive with no quotients.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    w = width
    for _ in range(retries + 1):
        try:
            qs, done = _run(a, b, c, D, p, kind, steps, w, branch)
            return OracleResult(tuple(qs), done, w)
        except PrecisionFault:
            w *= 2
    return OracleResult((), False, w // 2, inconclusive=True)
