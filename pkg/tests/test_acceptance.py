"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line.  Run the whole report with

    pytest tests/test_acceptance.py -s
    python tests/test_acceptance.py
"""

import functools
import random
import time
from fractions import Fraction as F

import pytest

from padiccf.cf_engine import (
    AlgorithmKind,
    Status,
    approximation_valuations,
    expand,
    reconstruct,
    strictly_increasing,
    valuation_identity_failures,
)
from padiccf.padic_core import s_floor, t_floor, vp_rational
from padiccf.quad_field import QuadInt
from padiccf.theory import (
    check_galois_necessary,
    conjecture_scan,
    family_instances,
    period4_family,
    verify_family,
)
from padiccf.verify import compare_with_oracle, oracle_cases, random_approx, random_J, random_K

II = AlgorithmKind.BROWKIN_II
II_STAR = AlgorithmKind.BROWKIN_II_STAR
SEED = 20220601
# capped runs are checked on this many leading quotients
CAPPED_PREFIX = 1000


def report(n, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    return ok


def timed(fn):
    """Cache a run producer together with the wall time of its first call."""
    @functools.cache
    def wrapper():
        t0 = time.perf_counter()
        out = fn()
        return out, time.perf_counter() - t0
    return wrapper


# run producers; each returns a list of (input, expansion)

@timed
def runs_1():
    x = QuadInt(3, 1, 1, 30)
    return [(x, expand(x, II, 7))]


@timed
def runs_2():
    x = QuadInt(2, 1, 75, 79)
    return [(x, expand(x, II_STAR, 5))]


@timed
def runs_3():
    out = []
    for p in (3, 5, 7, 11, 13):
        for inst in family_instances(p, 12, branches=(1, -1)):
            out.append((inst, verify_family(inst)))
    return out


@timed
def runs_4():
    rng = random.Random(SEED)
    out = []
    for p in (3, 5, 7):
        for _ in range(1000):
            q = F(rng.choice((-1, 1)) * rng.randint(1, 10 ** 6), rng.randint(1, 10 ** 6))
            x = QuadInt.rational(q)
            for kind in (AlgorithmKind.BROWKIN_I, II):
                out.append((x, expand(x, kind, p, max_steps=20000)))
    return out


def test_criterion_1_worked_example():
    (run,), dt = runs_1()
    e = run[1]
    want_pre = ["-1", "3/7", "3", "2/7"]
    want_per = ["1", "2/7", "-2", "3/7", "1", "2/7", "2", "1/7", "-1", "-5/7"]
    checks = {
        "quotients": [str(b) for b in e.preperiod] == want_pre and [str(b) for b in e.period] == want_per,
        "h,k": (e.h, e.k) == (4, 10),
        "sign branch at 13 -> -5/7": e.sign_branch_log == (13,) and str(e.quotients[13]) == "-5/7",
        "runtime": dt < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    assert report(1, not bad, f"3+sqrt(30) in Q_7, h={e.h} k={e.k}, {dt:.3f}s" + (f" failed: {bad}" if bad else ""))


def test_criterion_2_browkin_2_star_example():
    (run,), dt = runs_2()
    e = run[1]
    want_pre = ["-7/25", "1", "2/5", "2", "-2/5", "1", "1/5", "2", "-4/25", "2", "1/5", "1", "-2/5", "2", "2/5"]
    want_per = ["1", "-7/25", "-1", "1/5", "2", "9/25", "-1", "-3/5"]
    checks = {
        "quotients": [str(b) for b in e.preperiod] == want_pre and [str(b) for b in e.period] == want_per,
        "h,k": (e.h, e.k) == (15, 8),
        "runtime": dt < 1.0,
    }
    bad = [k for k, v in checks.items() if not v]
    assert report(2, not bad, f"(2+sqrt(79))/75 in Q_5, h={e.h} k={e.k}, {dt:.3f}s" + (f" failed: {bad}" if bad else ""))


def test_criterion_3_period4_family():
    runs, dt = runs_3()
    failed = [f"p={inst.p} t={inst.t} {'+' if inst.branch > 0 else '-'}: {v.diff[0]}"
              for inst, v in runs if not v.ok]
    d975 = period4_family(5, 4).D == -975
    per_p = {p: sum(1 for inst, _ in runs if inst.p == p) for p in (3, 5, 7, 11, 13)}
    ok = not failed and d975 and dt < 30.0
    detail = f"{len(runs)} instances {per_p}, {len(failed)} mismatched, D(5,4)={period4_family(5, 4).D}, {dt:.1f}s"
    if failed:
        detail += "; first: " + "; ".join(failed[:3])
    assert report(3, ok, detail)


def test_criterion_4_rational_finiteness():
    runs, dt = runs_4()
    t0 = time.perf_counter()
    not_finite = [str(x) for x, e in runs if e.status is not Status.FINITE]
    bad_rt = [str(x) for x, e in runs if e.status is Status.FINITE and reconstruct(e) != x]
    dt += time.perf_counter() - t0
    ok = not not_finite and not bad_rt and dt < 60.0
    steps = max(e.steps_used for _, e in runs)
    assert report(4, ok, f"{len(runs)} runs, {len(not_finite)} not finite, {len(bad_rt)} round-trip errors, "
                         f"max steps {steps}, {dt:.1f}s")


def test_criterion_5_lemma_properties():
    rng = random.Random(SEED)
    primes = (3, 5, 7, 11, 13)
    n = 10000
    j_bad = k_bad = t_bad = 0
    for _ in range(n):
        p = rng.choice(primes)
        a, b = random_J(rng, p), random_J(rng, p)
        if a.value != b.value and not vp_rational(a.value - b.value, p) <= 0:
            j_bad += 1
    for _ in range(n):
        p = rng.choice(primes)
        a, b = random_K(rng, p), random_K(rng, p)
        if a.value != b.value and not vp_rational(a.value - b.value, p) < 0:
            k_bad += 1
    for _ in range(n):
        p = rng.choice(primes)
        x, approx = random_approx(rng, p)
        t = t_floor(approx)
        if not abs(t) < F(1, 2) or vp_rational(x - s_floor(approx), p) < 1:
            t_bad += 1
    ok = j_bad == k_bad == t_bad == 0
    assert report(5, ok, f"{n} J_p pairs ({j_bad} bad), {n} K_p pairs ({k_bad} bad), "
                         f"{n} approximations ({t_bad} bad)")


def _identity_checks(x, e, p):
    if e.status is Status.PERIODIC:
        bs = e.take(e.h + 3 * e.k)
    elif e.status is Status.CAPPED:
        bs = e.quotients[:CAPPED_PREFIX]
    else:
        bs = e.quotients
    ident = valuation_identity_failures(bs, p)
    vals = approximation_valuations(x, bs, p)
    return bool(ident), not strictly_increasing(vals)


def test_criterion_6_valuation_identities():
    runs = [(x, e) for x, e in runs_1()[0] + runs_2()[0]]
    runs += [(inst.input(), v.expansion) for inst, v in runs_3()[0]]
    runs += runs_4()[0]
    ident_bad = approx_bad = 0
    for x, e in runs:
        i, a = _identity_checks(x, e, e.p)
        ident_bad += i
        approx_bad += a
    capped = sum(1 for _, e in runs if e.status is Status.CAPPED)
    ok = ident_bad == approx_bad == 0
    assert report(6, ok, f"{len(runs)} runs ({capped} capped, checked on {CAPPED_PREFIX} quotients): "
                         f"{ident_bad} identity failures, {approx_bad} non-decreasing distances")


@pytest.mark.slow
def test_criterion_7_theorem_implications():
    t0 = time.perf_counter()
    parity_bad, pure, pure_bad, periodic = [], 0, [], 0
    for p in (5, 7):
        res = conjecture_scan(p, 2, 2000, max_steps=2000)
        for row in res.rows:
            if row.status != "PERIODIC":
                continue
            periodic += 1
            if not (row.h == 1 or row.h % 2 == 0):
                parity_bad.append(f"p={p} D={row.D} h={row.h}")
            if row.h == 0:
                pure += 1
                x = QuadInt.sqrt(row.D)
                if not check_galois_necessary(x, expand(x, II, p, max_steps=2000)).hypotheses_hold:
                    pure_bad.append(f"sqrt({row.D}) in Q_{p}")
    # purely periodic runs among small a + sqrt(D)
    for p in (5, 7):
        for a in range(-3, 4):
            for D in range(2, 80):
                try:
                    x = QuadInt(a, 1, 1, D)
                    e = expand(x, II, p, max_steps=400)
                except ValueError:
                    continue
                if e.status is Status.PERIODIC and e.h == 0:
                    pure += 1
                    if not check_galois_necessary(x, e).hypotheses_hold:
                        pure_bad.append(f"{x} in Q_{p}")
    x = QuadInt(3, 1, 1, 30)
    w = check_galois_necessary(x, expand(x, II, 7))
    witness_ok = w.hypotheses_hold and not w.pure_periodic
    dt = time.perf_counter() - t0
    ok = not parity_bad and not pure_bad and pure > 0 and witness_ok and dt < 600
    assert report(7, ok, f"{periodic} periodic sqrt(D) runs, {len(parity_bad)} parity violations; "
                         f"{pure} purely periodic runs, {len(pure_bad)} violating; "
                         f"3+sqrt(30) converse witness {'holds' if witness_ok else 'broken'}; {dt:.0f}s")


def test_criterion_8_oracle_equivalence():
    n, steps = 500, 50
    mismatches, inconclusive = [], 0
    for x, p, kind in oracle_cases(n, SEED):
        res = compare_with_oracle(x, p, kind, steps)
        if res == "inconclusive":
            inconclusive += 1
        elif res:
            mismatches.append(res)
    ok = not mismatches and inconclusive * 100 < n
    detail = f"{n} inputs x {steps} steps: {len(mismatches)} mismatches, {inconclusive} inconclusive"
    if mismatches:
        detail += "; first: " + mismatches[0]
    assert report(8, ok, detail)


if __name__ == "__main__":
    import sys
    code = pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"])
    sys.exit(code)
