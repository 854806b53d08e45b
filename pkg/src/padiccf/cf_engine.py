"""The Browkin I / II / II* expansion algorithms and the exact driver.

Complete quotients are carried as exact :class:`QuadInt` values, so
finiteness is an exact equality test and periodicity is a repeated
(complete quotient, step parity) state.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .padic_core import INF, PartialQuotient, check_prime, sign, vp_rational
from .quad_field import (
    DEFAULT_PRECISION_CAP,
    HenselRoot,
    QuadInt,
    is_square,
    quad_s,
    quad_sub_rational,
    quad_t,
    vp_quad,
)

DEFAULT_MAX_STEPS = 20_000


class AlgorithmKind(enum.Enum):
    BROWKIN_I = "browkin1"
    BROWKIN_II = "browkin2"
    BROWKIN_II_STAR = "browkin2star"

    @classmethod
    def parse(cls, name: "str | AlgorithmKind") -> "AlgorithmKind":
        if isinstance(name, cls):
            return name
        key = name.strip().lower().replace("_", "").replace("-", "").replace(" ", "")
        aliases = {
            "browkin1": cls.BROWKIN_I, "browkini": cls.BROWKIN_I, "i": cls.BROWKIN_I,
            "browkin2": cls.BROWKIN_II, "browkinii": cls.BROWKIN_II, "ii": cls.BROWKIN_II,
            "browkin2star": cls.BROWKIN_II_STAR, "browkin2*": cls.BROWKIN_II_STAR,
            "browkiniistar": cls.BROWKIN_II_STAR, "browkinii*": cls.BROWKIN_II_STAR,
            "iistar": cls.BROWKIN_II_STAR, "ii*": cls.BROWKIN_II_STAR,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown algorithm {name!r}") from None

    def uses_s(self, n: int) -> bool:
        """Whether step ``n`` takes ``s`` (otherwise the ``t`` rule)."""
        if self is AlgorithmKind.BROWKIN_I:
            return True
        if self is AlgorithmKind.BROWKIN_II:
            return n % 2 == 0
        return n % 2 == 1


class Status(enum.Enum):
    FINITE = "FINITE"
    PERIODIC = "PERIODIC"
    CAPPED = "CAPPED"


class ReconstructionError(RuntimeError):
    """An expansion does not fold back to its input; indicates an engine bug."""


@dataclass(frozen=True)
class CqState:
    cq: QuadInt
    parity: int | None


class Step(NamedTuple):
    quotient: Fraction
    next: QuadInt | None
    sign_branch: bool


def make_root(x: QuadInt, p: int, cap: int = DEFAULT_PRECISION_CAP) -> HenselRoot | None:
    if x.is_rational():
        return None
    return HenselRoot(x.D, p, branch=x.branch, cap=cap)


def step(x: QuadInt, n: int, kind: AlgorithmKind, root: HenselRoot | None, p: int) -> Step:
    """One step: pick ``b_n`` and form ``1/(x - b_n)``.

    ``next`` is None when ``x == b_n`` exactly, i.e. the expansion ends.
    """
    if not x:
        raise ZeroDivisionError("complete quotient is zero")
    fired = False
    if kind.uses_s(n):
        b = quad_s(x, root, p)
    else:
        b = quad_t(x, root, p)
        # an exact match x == t(x) has infinite valuation, so it takes this branch
        if vp_quad(quad_sub_rational(x, b), root, p) != 0:
            b = b - sign(b)
            fired = True
    rest = quad_sub_rational(x, b)
    if not rest:
        return Step(b, None, fired)
    return Step(b, rest.invert(), fired)


@dataclass(frozen=True)
class Expansion:
    p: int
    algorithm: AlgorithmKind
    input: QuadInt
    status: Status
    preperiod: tuple[PartialQuotient, ...]
    period: tuple[PartialQuotient, ...] | None = None
    sign_branch_log: tuple[int, ...] = ()
    steps_used: int = 0
    witness: CqState | None = None

    @property
    def quotients(self) -> tuple[PartialQuotient, ...]:
        return self.preperiod + (self.period or ())

    @property
    def h(self) -> int | None:
        return len(self.preperiod) if self.status is Status.PERIODIC else None

    @property
    def k(self) -> int | None:
        return len(self.period) if self.status is Status.PERIODIC else None

    def take(self, n: int) -> tuple[PartialQuotient, ...]:
        """The first ``n`` quotients, unrolling the period as needed."""
        qs = list(self.preperiod)
        if self.status is Status.PERIODIC:
            while len(qs) < n:
                qs.extend(self.period)
        else:
            qs.extend(self.period or ())
        return tuple(qs[:n])

    def convergents(self) -> "Convergents":
        return convergents(self.quotients)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "algorithm": self.algorithm.value,
            "input": str(self.input),
            "branch": "plus" if self.input.branch > 0 else "minus",
            "status": self.status.value,
            "preperiod": [str(b) for b in self.preperiod],
            "period": [str(b) for b in self.period or ()],
            "h": self.h,
            "k": self.k,
            "sign_branch_indices": list(self.sign_branch_log),
            "steps_used": self.steps_used,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_text(self) -> str:
        pre = ", ".join(str(b) for b in self.preperiod)
        if self.status is Status.PERIODIC:
            per = ", ".join(str(b) for b in self.period)
            body = f"[{pre}{'; ' if pre else ''}overline({per})]  h={self.h} k={self.k}"
        elif self.status is Status.FINITE:
            body = f"[{pre}]  finite, {self.steps_used} quotient{'' if self.steps_used == 1 else 's'}"
        else:
            body = f"[{pre}, ...]  capped after {self.steps_used} steps"
        return f"{self.input} in Q_{self.p} ({self.algorithm.value}): {body}"


def expand(x: QuadInt, kind: AlgorithmKind | str, p: int, max_steps: int = DEFAULT_MAX_STEPS,
           cap: int = DEFAULT_PRECISION_CAP, root: HenselRoot | None = None) -> Expansion:
    """Expand ``x`` in Q_p until it terminates, repeats a state, or hits ``max_steps``.

    Raises :class:`~padiccf.quad_field.PrecisionError` if the root's digit
    cap is exceeded, which is distinct from a CAPPED result.
    """
    check_prime(p)
    kind = AlgorithmKind.parse(kind)
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if root is None:
        root = make_root(x, p, cap)
    if kind is AlgorithmKind.BROWKIN_II_STAR and not vp_quad(x, root, p) < 0:
        raise ValueError(f"Browkin II* needs negative valuation at the start; v_{p}({x}) = {vp_quad(x, root, p)}")

    alternating = kind is not AlgorithmKind.BROWKIN_I
    seen: dict[CqState, int] = {}
    bs: list[PartialQuotient] = []
    fired: list[int] = []
    cur = x
    n = 0
    while True:
        state = CqState(cur, n % 2 if alternating else None)
        first = seen.get(state)
        if first is not None:
            return Expansion(p, kind, x, Status.PERIODIC, tuple(bs[:first]), tuple(bs[first:]),
                             tuple(fired), n, state)
        if n >= max_steps:
            return Expansion(p, kind, x, Status.CAPPED, tuple(bs), None, tuple(fired), n, None)
        seen[state] = n
        st = step(cur, n, kind, root, p)
        bs.append(PartialQuotient.from_fraction(st.quotient, p))
        if st.sign_branch:
            fired.append(n)
        n += 1
        if st.next is None:
            return Expansion(p, kind, x, Status.FINITE, tuple(bs), None, tuple(fired), n, None)
        cur = st.next


@dataclass(frozen=True)
class Convergents:
    """Numerators ``A`` and denominators ``B`` of ``[b_0, ..., b_n]``."""

    quotients: tuple[Fraction, ...]
    A: tuple[Fraction, ...]
    B: tuple[Fraction, ...]

    def value(self, n: int) -> Fraction:
        return self.A[n] / self.B[n]

    def __len__(self):
        return len(self.A)


def _as_fraction(b) -> Fraction:
    return b.value if isinstance(b, PartialQuotient) else Fraction(b)


def convergents(bs: Iterable) -> Convergents:
    """Run the three-term recurrence from ``A_{-1}=1, A_{-2}=0, B_{-1}=0, B_{-2}=1``."""
    qs = tuple(_as_fraction(b) for b in bs)
    if not qs:
        raise ValueError("need at least one partial quotient")
    A, B = [], []
    a2, a1, b2, b1 = Fraction(0), Fraction(1), Fraction(1), Fraction(0)
    for q in qs:
        a2, a1 = a1, q * a1 + a2
        b2, b1 = b1, q * b1 + b2
        A.append(a1)
        B.append(b1)
    return Convergents(qs, tuple(A), tuple(B))


def valuation_identity_failures(bs: Sequence, p: int) -> list[int]:
    """Indices ``n`` where ``v(A_n) = sum_{i<=n} v(b_i)`` or
    ``v(B_n) = sum_{1<=i<=n} v(b_i)`` fails.

    When ``b_0 = 0`` the numerators are the tail's denominators, so the
    ``A`` sum runs over ``2 <= i <= n`` instead.
    """
    conv = convergents(bs)
    vs = [vp_rational(b, p) for b in conv.quotients]
    bad = []
    lead_zero = conv.quotients[0] == 0
    for n in range(len(vs)):
        if lead_zero:
            want_a = INF if n == 0 else sum(vs[2:n + 1])
        else:
            want_a = sum(vs[:n + 1])
        want_b = sum(vs[1:n + 1])
        if vp_rational(conv.A[n], p) != want_a or vp_rational(conv.B[n], p) != want_b:
            bad.append(n)
    return bad


def approximation_valuations(x: QuadInt, bs: Sequence, p: int, root: HenselRoot | None = None) -> list:
    """``v_p(x - A_n/B_n)`` for every prefix of ``bs``."""
    if root is None:
        root = make_root(x, p)
    conv = convergents(bs)
    return [vp_quad(quad_sub_rational(x, conv.value(n)), root, p) for n in range(len(conv))]


def strictly_increasing(vals: Sequence) -> bool:
    return all(u < w for u, w in zip(vals, vals[1:]))


def _fold_finite(qs: Sequence[Fraction]) -> Fraction:
    val = qs[-1]
    for q in reversed(qs[:-1]):
        val = q + 1 / val
    return val


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    if is_square(x.numerator) and is_square(x.denominator):
        from math import isqrt
        return Fraction(isqrt(x.numerator), isqrt(x.denominator))
    return None


def reconstruct(e: Expansion, max_repeats: int = 256) -> QuadInt:
    """Fold an expansion back to the exact value it represents.

    For a periodic expansion the tail satisfies ``B' y^2 + (B'' - A') y - A'' = 0``
    (primes for the period's last two convergents); of its two roots the one
    the period's convergents approach p-adically is taken.  The result is
    checked against ``e.input``.
    """
    if e.status is Status.CAPPED:
        raise ValueError("cannot reconstruct a capped expansion")
    p = e.p
    if e.status is Status.FINITE:
        out = QuadInt.rational(_fold_finite([b.value for b in e.quotients]))
    else:
        per = convergents(e.period)
        k = len(e.period)
        A1, B1 = per.A[k - 1], per.B[k - 1]
        A2 = per.A[k - 2] if k >= 2 else Fraction(1)
        B2 = per.B[k - 2] if k >= 2 else Fraction(0)
        P, Q, R = B1, B2 - A1, -A2
        disc = Q * Q - 4 * P * R
        D, branch = e.input.D, e.input.branch
        if D == 0 or disc == 0:
            raise ReconstructionError("periodic expansion of a rational value")
        scale = _rational_sqrt(disc / D)
        if scale is None:
            raise ReconstructionError(f"period's discriminant {disc} is not a square multiple of {D}")
        sq = QuadInt(0, 1, 1, D, branch) * scale
        cands = [(sq - Q) / (2 * P), (-sq - Q) / (2 * P)]
        root = HenselRoot(D, p, branch=branch)
        tail = None
        for reps in range(1, max_repeats + 1):
            c = convergents(e.period * reps)
            target = c.value(len(c) - 1)
            v0, v1 = (vp_quad(quad_sub_rational(y, target), root, p) for y in cands)
            if v0 != v1:
                tail = cands[0] if v0 > v1 else cands[1]
                break
        if tail is None:
            raise ReconstructionError("could not tell the attracting root from its conjugate")
        h = len(e.preperiod)
        if h:
            pre = convergents(e.preperiod)
            Ah, Bh = pre.A[h - 1], pre.B[h - 1]
            Ag = pre.A[h - 2] if h >= 2 else Fraction(1)
            Bg = pre.B[h - 2] if h >= 2 else Fraction(0)
            out = (tail * Ah + Ag) / (tail * Bh + Bg)
        else:
            out = tail
    if out != e.input:
        raise ReconstructionError(f"expansion folds to {out}, not {e.input}")
    return out
