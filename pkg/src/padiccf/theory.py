"""Checks of the periodicity results against actual engine runs.

The checkers return reports instead of asserting, so a scan can collect
every counterexample candidate in one pass.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .cf_engine import (
    DEFAULT_MAX_STEPS,
    AlgorithmKind,
    Expansion,
    Status,
    expand,
    make_root,
)
from .padic_core import PartialQuotient, check_prime, split_p, symmetric_mod
from .quad_field import HenselRoot, QuadInt, is_square, sqrt_exists, vp_quad

CSV_HEADER = ("p", "D", "input", "algorithm", "status", "h", "k", "steps", "sign_branch_count")


@dataclass(frozen=True)
class GaloisReport:
    algorithm: AlgorithmKind
    vp_alpha: int
    vp_conj: int
    pure_periodic: bool

    @property
    def norm_alpha_is_one(self) -> bool:
        return self.vp_alpha == 0

    @property
    def norm_conj_lt_one(self) -> bool:
        return self.vp_conj > 0

    @property
    def hypotheses_hold(self) -> bool:
        """The valuation profile the relevant theorem derives from pure periodicity."""
        if self.algorithm is AlgorithmKind.BROWKIN_II:
            return self.norm_alpha_is_one and self.norm_conj_lt_one
        if self.algorithm is AlgorithmKind.BROWKIN_II_STAR:
            return self.vp_alpha < 0 and self.vp_conj == 0
        return True

    @property
    def implication_holds(self) -> bool:
        return not self.pure_periodic or self.hypotheses_hold

    @property
    def converse_fails(self) -> bool:
        """Profile satisfied but the expansion still has a preperiod."""
        return self.hypotheses_hold and not self.pure_periodic


def check_galois_necessary(x: QuadInt, e: Expansion) -> GaloisReport:
    if x.is_rational():
        raise ValueError("conjugate valuations need an irrational input")
    root = make_root(x, e.p)
    pure = e.status is Status.PERIODIC and e.h == 0
    return GaloisReport(e.algorithm, vp_quad(x, root), vp_quad(x.conjugate(), root), pure)


def check_pure_candidate_sqrt(a: int, D: int, p: int) -> bool:
    """Whether ``a + sqrt(D)`` has unit norm and conjugate of norm < 1.

    Decided by ``a ≡ a_0 (mod p)`` with ``a_0`` the leading root digit, and
    cross-checked against the two valuations computed directly.
    """
    if split_p(D, p)[0] != 0:
        raise ValueError("D must be a p-adic unit")
    root = HenselRoot(D, p)
    a0 = symmetric_mod(root.residue(1), p)
    by_digit = (a - a0) % p == 0
    x = QuadInt(a, 1, 1, D)
    by_val = vp_quad(x, root) == 0 and vp_quad(x.conjugate(), root) > 0
    if by_digit != by_val:
        raise AssertionError(f"digit test and valuation test disagree for a={a}, D={D}, p={p}")
    return by_digit


def applicable_parity_rule(e: Expansion, x: QuadInt) -> str | None:
    """Name of the preperiod-length constraint that applies to this run, if any."""
    if x.is_rational():
        return None
    root = make_root(x, e.p)
    va, vc = vp_quad(x, root), vp_quad(x.conjugate(), root)
    if e.algorithm is AlgorithmKind.BROWKIN_II:
        if x.a == 0 and x.c == 1 and abs(x.b) == 1:
            return "sqrt"
        if va == 0 and vc > 0:
            return "even"
    elif e.algorithm is AlgorithmKind.BROWKIN_II_STAR:
        if va < 0 and vc == 0:
            return "odd"
    return None


def check_preperiod_parity(e: Expansion, x: QuadInt) -> bool:
    """True unless an applicable preperiod-length constraint is violated."""
    if e.status is not Status.PERIODIC:
        raise ValueError("parity constraints concern periodic expansions")
    rule = applicable_parity_rule(e, x)
    h = e.h
    if rule == "even":
        return h % 2 == 0
    if rule == "odd":
        return h % 2 == 1
    if rule == "sqrt":
        return h == 1 or h % 2 == 0
    return True


@dataclass(frozen=True)
class FamilyInstance:
    p: int
    t: int
    D: int
    branch: int
    preperiod: tuple[Fraction, ...]
    period: tuple[Fraction, ...]

    @property
    def expected(self) -> tuple[Fraction, ...]:
        return self.preperiod + self.period

    def input(self) -> QuadInt:
        return QuadInt.sqrt(self.D, self.branch)


def family_is_integral(p: int, t: int) -> bool:
    return (1 - p ** t) % (1 - p) ** 2 == 0


def period4_family(p: int, t: int, branch: int = 1) -> FamilyInstance | None:
    """The radicand ``(1 - p^t) p^2 / (1 - p)^2`` with its predicted expansion,
    or None when it is not an integer."""
    check_prime(p)
    if t < 2:
        raise ValueError("t must be at least 2")
    if not family_is_integral(p, t):
        return None
    D = (1 - p ** t) // (1 - p) ** 2 * p * p
    mid = Fraction(-2 * (p ** (t - 1) - 1), (p - 1) * p ** (t - 1))
    s = branch
    pre = (Fraction(0), Fraction(s, p))
    per = (Fraction(-s), s * mid, Fraction(-s), Fraction(2 * s, p))
    return FamilyInstance(p, t, D, branch, pre, per)


@dataclass(frozen=True)
class FamilyVerdict:
    instance: FamilyInstance
    expansion: Expansion
    diff: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.diff

    def __bool__(self) -> bool:
        return self.ok


def verify_family(inst: FamilyInstance, max_steps: int = DEFAULT_MAX_STEPS) -> FamilyVerdict:
    e = expand(inst.input(), AlgorithmKind.BROWKIN_II, inst.p, max_steps=max_steps)
    diff = []
    if e.status is not Status.PERIODIC:
        diff.append(f"status {e.status.value}, expected PERIODIC")
    else:
        if e.h != 2:
            diff.append(f"h={e.h}, expected 2")
        if e.k != 4:
            diff.append(f"k={e.k}, expected 4")
    got = [b.value for b in e.quotients]
    want = list(inst.expected)
    for i in range(max(len(got), len(want))):
        g = got[i] if i < len(got) else None
        w = want[i] if i < len(want) else None
        if g != w:
            diff.append(f"b_{i}: got {g}, expected {w}")
        if len(diff) > 12:
            break
    return FamilyVerdict(inst, e, tuple(diff))


def family_instances(p: int, t_max: int, branches=(1,)) -> list[FamilyInstance]:
    out = []
    for t in range(2, t_max + 1):
        for br in branches:
            inst = period4_family(p, t, br)
            if inst is not None:
                out.append(inst)
    return out


@dataclass(frozen=True)
class ScanRow:
    p: int
    D: int
    input: str
    algorithm: str
    status: str
    h: int | None
    k: int | None
    steps: int
    sign_branch_count: int
    parity_ok: bool | None = None

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in CSV_HEADER} | {"parity_ok": self.parity_ok}

    def csv_fields(self) -> list:
        return [self.p, self.D, self.input, self.algorithm, self.status,
                "" if self.h is None else self.h, "" if self.k is None else self.k,
                self.steps, self.sign_branch_count]


@dataclass
class ScanResult:
    p: int
    algorithm: AlgorithmKind
    d_min: int
    d_max: int
    max_steps: int
    rows: list[ScanRow] = field(default_factory=list)

    def period_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(r.k for r in self.rows if r.status == "PERIODIC").items()))

    def preperiod_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(r.h for r in self.rows if r.status == "PERIODIC").items()))

    def parity_failures(self) -> list[int]:
        return [r.D for r in self.rows if r.parity_ok is False]

    def summary(self) -> dict:
        return {
            "p": self.p,
            "algorithm": self.algorithm.value,
            "d_min": self.d_min,
            "d_max": self.d_max,
            "max_steps": self.max_steps,
            "rows": len(self.rows),
            "status_counts": dict(sorted(Counter(r.status for r in self.rows).items())),
            "period_histogram": {str(k): v for k, v in self.period_histogram().items()},
            "preperiod_histogram": {str(k): v for k, v in self.preperiod_histogram().items()},
            "parity_all_pass": not self.parity_failures(),
            "parity_failures": self.parity_failures(),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def _scan_one(args) -> ScanRow:
    p, D, kind, max_steps = args
    x = QuadInt.sqrt(D)
    e = expand(x, kind, p, max_steps=max_steps)
    parity = check_preperiod_parity(e, x) if e.status is Status.PERIODIC else None
    return ScanRow(p, D, str(x), kind.value, e.status.value, e.h, e.k, e.steps_used,
                   len(e.sign_branch_log), parity)


def scan_radicands(p: int, d_min: int, d_max: int) -> list[int]:
    """Non-square nonzero ``D`` in range whose square root lives in Q_p."""
    return [D for D in range(d_min, d_max + 1)
            if D != 0 and not is_square(D) and sqrt_exists(D, p)]


def conjecture_scan(p: int, d_min: int, d_max: int, kind=AlgorithmKind.BROWKIN_II,
                    max_steps: int = DEFAULT_MAX_STEPS, jobs: int = 1) -> ScanResult:
    """Expand ``sqrt(D)`` for every admissible ``D`` in ``[d_min, d_max]``.

    Rows are sorted by ``D`` regardless of ``jobs``.
    """
    check_prime(p)
    kind = AlgorithmKind.parse(kind)
    if kind is AlgorithmKind.BROWKIN_II_STAR:
        raise ValueError("Browkin II* needs negative valuation; square roots of integers never have it")
    if d_min > d_max:
        raise ValueError("d_min must not exceed d_max")
    tasks = [(p, D, kind, max_steps) for D in scan_radicands(p, d_min, d_max)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_one, tasks, chunksize=8))
    else:
        rows = [_scan_one(t) for t in tasks]
    rows.sort(key=lambda r: r.D)
    return ScanResult(p, kind, d_min, d_max, max_steps, rows)
