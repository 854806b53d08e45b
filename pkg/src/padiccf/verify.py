"""Named check suites shared by the CLI ``verify`` command and the tests."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cf_engine import AlgorithmKind, Status, expand, reconstruct
from .oracle import oracle_expand
from .padic_core import (
    PartialQuotient,
    balanced_digits,
    s_floor,
    t_floor,
    vp_rational,
)
from .quad_field import QuadInt, is_square, sqrt_exists
from .theory import (
    check_galois_necessary,
    check_preperiod_parity,
    conjecture_scan,
    family_instances,
    verify_family,
)

PRIMES = (3, 5, 7, 11, 13)
EXAMPLE_38 = ("(3+1*sqrt(30))/1", 7, AlgorithmKind.BROWKIN_II)
EXAMPLE_Q5 = ("(2+1*sqrt(79))/75", 5, AlgorithmKind.BROWKIN_II_STAR)


@dataclass
class CheckResult:
    name: str
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        head = "PASS" if self.ok else "FAIL"
        tail = "" if self.ok else f" ({len(self.failures)} failures; first: {self.failures[0]})"
        return f"{head} {self.name}{tail}"


def random_J(rng: random.Random, p: int, max_exp: int = 6) -> PartialQuotient:
    n = rng.randint(0, max_exp)
    bound = (p ** (n + 1) - 1) // 2
    while True:
        a = rng.randint(-bound, bound)
        if n == 0 or a % p:
            return PartialQuotient(a, n if a else 0, p)


def random_K(rng: random.Random, p: int, max_exp: int = 6) -> PartialQuotient:
    n = rng.randint(1, max_exp)
    bound = (p ** n - 1) // 2
    while True:
        a = rng.randint(-bound, bound)
        if a % p:
            return PartialQuotient(a, n, p)


def random_approx(rng: random.Random, p: int):
    """A random rational in Z_(p)[1/p] and its digit window through index 0."""
    v = rng.randint(-8, 3)
    num = rng.randint(-10 ** 6, 10 ** 6) or 1
    den = rng.randint(1, 10 ** 6)
    while den % p == 0:
        den //= p
    x = Fraction(num, den) * Fraction(p) ** v
    lo = min(0, int(vp_rational(x, p)))
    return x, balanced_digits(x, p, lo, max(lo, 0) + 4)


def lemma_suite(samples: int = 2000, seed: int = 2022) -> list[CheckResult]:
    rng = random.Random(seed)
    j_fail, k_fail, t_fail, st_fail = [], [], [], []
    for _ in range(samples):
        p = rng.choice(PRIMES)
        a, b = random_J(rng, p), random_J(rng, p)
        if a.value != b.value and not vp_rational(a.value - b.value, p) <= 0:
            j_fail.append(f"{a},{b} in J_{p}")
        a, b = random_K(rng, p), random_K(rng, p)
        if a.value != b.value and not vp_rational(a.value - b.value, p) < 0:
            k_fail.append(f"{a},{b} in K_{p}")
        x, approx = random_approx(rng, p)
        t = t_floor(approx)
        if not abs(t) < Fraction(1, 2):
            t_fail.append(f"|t({x})| = {abs(t)}")
        s = s_floor(approx)
        if vp_rational(x - s, p) < 1 or vp_rational(x - t, p) < 0:
            st_fail.append(f"x={x}, s={s}, t={t}")
    return [
        CheckResult("J_p pairs: v_p(a-b) <= 0", j_fail),
        CheckResult("K_p pairs: v_p(a-b) < 0", k_fail),
        CheckResult("|t(x)| < 1/2", t_fail),
        CheckResult("v_p(x-s(x)) >= 1 and v_p(x-t(x)) >= 0", st_fail),
    ]


def galois_suite() -> list[CheckResult]:
    out = []
    for text, p, kind in (EXAMPLE_38, EXAMPLE_Q5):
        x = QuadInt.parse(text)
        e = expand(x, kind, p)
        r = check_galois_necessary(x, e)
        fails = []
        if not r.implication_holds:
            fails.append("pure periodic run violates the valuation profile")
        if not r.converse_fails:
            fails.append(f"expected a preperiod despite the profile; got h={e.h}")
        out.append(CheckResult(f"valuation profile of {text} in Q_{p} ({kind.value})", fails))
    fails, found = [], 0
    for p in (5, 7):
        for a in range(-3, 4):
            for D in range(2, 80):
                if is_square(D) or not sqrt_exists(D, p):
                    continue
                x = QuadInt(a, 1, 1, D)
                e = expand(x, AlgorithmKind.BROWKIN_II, p, max_steps=400)
                if e.status is Status.PERIODIC and e.h == 0:
                    found += 1
                    r = check_galois_necessary(x, e)
                    if not r.implication_holds:
                        fails.append(f"{x} in Q_{p}")
    if not found:
        fails.append("no purely periodic run found; the check is vacuous")
    out.append(CheckResult("purely periodic runs have |x|_p = 1, |conj x|_p < 1", fails))
    return out


def parity_suite(d_max: int = 300, max_steps: int = 2000) -> list[CheckResult]:
    out = []
    for text, p, kind in (EXAMPLE_38, EXAMPLE_Q5):
        x = QuadInt.parse(text)
        e = expand(x, kind, p)
        out.append(CheckResult(f"preperiod parity of {text} in Q_{p}",
                               [] if check_preperiod_parity(e, x) else [f"h={e.h}"]))
    for p in (5, 7):
        res = conjecture_scan(p, 2, d_max, max_steps=max_steps)
        out.append(CheckResult(f"sqrt(D) preperiod in {{1}} or even, p={p}, D<={d_max}",
                               [f"D={d}" for d in res.parity_failures()]))
    return out


def family_suite(t_max: int = 12, primes=PRIMES) -> list[CheckResult]:
    out = []
    for p in primes:
        fails = []
        for inst in family_instances(p, t_max, branches=(1, -1)):
            v = verify_family(inst)
            if not v.ok:
                fails.append(f"t={inst.t} branch={inst.branch:+d}: {v.diff[0]}")
        out.append(CheckResult(f"period-4 family p={p}, t<={t_max}, both branches", fails))
    return out


def random_quadratic(rng: random.Random, p: int) -> QuadInt:
    while True:
        D = rng.randint(-500, 500)
        if D == 0 or is_square(D) or not sqrt_exists(D, p):
            continue
        b = rng.choice([x for x in range(-20, 21) if x])
        return QuadInt(rng.randint(-100, 100), b, rng.randint(1, 300), D, rng.choice((1, -1)))


def oracle_cases(n: int, seed: int):
    rng = random.Random(seed)
    for _ in range(n):
        p = rng.choice(PRIMES)
        x = random_quadratic(rng, p)
        kind = rng.choice(list(AlgorithmKind))
        yield x, p, kind


def compare_with_oracle(x: QuadInt, p: int, kind: AlgorithmKind, steps: int) -> str | None:
    """None on agreement, ``"inconclusive"``, or a description of the mismatch."""
    from .cf_engine import make_root
    from .quad_field import vp_quad
    if kind is AlgorithmKind.BROWKIN_II_STAR and not vp_quad(x, make_root(x, p), p) < 0:
        kind = AlgorithmKind.BROWKIN_II
    e = expand(x, kind, p, max_steps=steps)
    want = [b.value for b in e.take(steps)]
    r = oracle_expand(x.a, x.b, x.c, x.D, p, kind, steps, branch=x.branch)
    if r.inconclusive:
        return "inconclusive"
    if list(r.quotients) != want:
        return f"{x} in Q_{p} ({kind.value}): oracle {list(map(str, r.quotients))[:6]}... engine {list(map(str, want))[:6]}..."
    return None


def oracle_suite(n: int = 100, steps: int = 50, seed: int = 8) -> list[CheckResult]:
    fails, inconclusive = [], 0
    for x, p, kind in oracle_cases(n, seed):
        res = compare_with_oracle(x, p, kind, steps)
        if res == "inconclusive":
            inconclusive += 1
        elif res:
            fails.append(res)
    if inconclusive * 100 >= n:
        fails.append(f"inconclusive rate {inconclusive}/{n} is not below 1%")
    return [CheckResult(f"oracle agreement on {n} random inputs, {steps} steps", fails)]


def roundtrip_check(x: QuadInt, p: int, kind: AlgorithmKind) -> str | None:
    e = expand(x, kind, p)
    if e.status is Status.CAPPED:
        return f"{x}: capped"
    try:
        reconstruct(e)
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        return f"{x}: {exc}"
    return None


SUITES: dict[str, Callable[[], list[CheckResult]]] = {
    "lemmas": lemma_suite,
    "galois": galois_suite,
    "parity": parity_suite,
    "family": family_suite,
    "oracle": oracle_suite,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key]()]
    try:
        return SUITES[name]()
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}") from None
