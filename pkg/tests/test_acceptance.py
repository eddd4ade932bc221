"""Acceptance suite: one test per criterion, exact arithmetic, stated time limits.

A summary with one PASS/FAIL line per criterion is printed at the end of the
pytest run (see conftest.py), or directly with ``python tests/test_acceptance.py``.

Two criteria contain a claim that is false as literally worded. For each, the
literal claim is measured and kept as a strict expected failure, the corrected
claim is asserted, and the summary line reports FAIL with both numbers.
"""
from __future__ import annotations

import time
from fractions import Fraction as F

import pytest

from stableprice.algorithms import budget_additive_approx, bucket_certificate
from stableprice.configlp import integral_opt
from stableprice.instances import gen_random_market, gen_single_minded_lower, gen_submodular_lower
from stableprice.itemset import full_mask, items_of
from stableprice.reproduce import (
    reproduce_budget_additive,
    reproduce_cross_check,
    reproduce_greedy,
    reproduce_single_minded,
    reproduce_solvers,
    reproduce_submodular,
    reproduce_xos,
)
from stableprice.stability import stability_ratio

#: criterion number -> list of (part, passed, detail)
RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


def _record(n: int, part: str, passed: bool, detail: str = "") -> None:
    RESULTS.setdefault(n, []).append((part, passed, detail))


def summary_lines() -> list[str]:
    lines = []
    for n in sorted(RESULTS):
        parts = RESULTS[n]
        ok = all(p for _, p, _ in parts)
        body = "; ".join(f"{name}: {'ok' if p else 'FAILED'}{f' ({d})' if d else ''}" for name, p, d in parts)
        lines.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {body}")
    return lines


def _scenario(n: int, sc, limit: float | None) -> None:
    failed = [c.name for c in sc.checks if not c.passed]
    _record(n, f"{sc.name} checks", not failed, "all pass" if not failed else ", ".join(failed))
    if limit is not None:
        _record(n, f"runtime < {limit:g} s", sc.elapsed < limit, f"{sc.elapsed:.1f} s")
    assert not failed, failed
    if limit is not None:
        assert sc.elapsed < limit


def test_criterion_1_xos_instance():
    sc = reproduce_xos(5, F(1, 100))
    notes = {c.name: c.detail for c in sc.checks}
    assert notes["certificate value = m/2 + 1/(2(m-1)) - delta"] == "SW(y) = 523/200"
    assert notes["best stable welfare = 3/2 - delta"] == "best stable = 149/100"
    _scenario(1, sc, 10)


def test_criterion_2_single_minded_instance():
    start = time.perf_counter()
    sc4 = reproduce_single_minded(4)
    ratio5 = stability_ratio(gen_single_minded_lower(5))
    opt5 = integral_opt(gen_single_minded_lower(5))[1]
    sc5 = reproduce_single_minded(5)
    elapsed = time.perf_counter() - start
    _scenario(2, sc4, None)
    _scenario(2, sc5, None)
    _record(2, "n=5: OPT = 10, ratio = 10/6", opt5 == 10 and ratio5 == F(10, 6), f"OPT = {opt5}, ratio = {ratio5}")
    _record(2, "runtime < 30 s", elapsed < 30, f"{elapsed:.1f} s")
    assert opt5 == 10 and ratio5 == F(5, 3)
    assert elapsed < 30


def test_criterion_3_submodular_certificate():
    sc = reproduce_submodular(4, solve_lp=True)
    _scenario(3, sc, 300)


def _bucket_certificate_k4():
    market = gen_submodular_lower(4)
    return bucket_certificate(market, market.items)


@pytest.mark.xfail(strict=True, reason="the f-terms carry a factor eps; the unscaled gap is 5*eps/12, far below 1/12")
def test_criterion_3b_literal_unscaled_gap():
    cert = _bucket_certificate_k4()
    passed = cert.improvement >= F(1, 12)
    _record(3, "(b) literal SW_y - SW_x >= 1/12", passed,
            f"SW_y - SW_x = {cert.improvement} = {cert.f_gain} * eps; in eps units {cert.f_gain} >= 1/12")
    assert passed


def test_criterion_4_submodular_small_case():
    sc = reproduce_submodular(2)
    assert any(c.name.startswith("gap-1 verdicts") for c in sc.checks)
    _scenario(4, sc, 60)


def test_criterion_5_budget_additive():
    sc = reproduce_budget_additive(500, seed=0, max_m=6)
    _scenario(5, sc, 120)


@pytest.mark.xfail(strict=True, reason="SW >= B2 needs buyer 2's budget to bind on S2; see the decisions ledger")
def test_criterion_5_literal_case_two_budget_bound():
    import random

    rng = random.Random(0)
    case2 = violations = slack_budget = below_v2 = 0
    for _ in range(500):
        m = rng.randint(1, 6)
        market = gen_random_market(rng.getrandbits(64), 2, m, ("budget_additive",))
        res = budget_additive_approx(market)
        if res.case != 2:
            continue
        case2 += 1
        second = market.buyers[0 if res.swapped else 1]
        S2 = full_mask(m) & ~res.s1
        below_v2 += res.welfare < second.value(S2)
        if res.welfare < res.b2:
            violations += 1
            slack_budget += sum((second.values[j] for j in items_of(S2)), F(0)) < res.b2
    _record(5, "literal case-2 SW >= B2", violations == 0,
            f"{violations} of {case2} case-2 instances below B2, {slack_budget} of them with B2 above "
            f"buyer 2's summed values on S2; SW >= v2(S2) fails on {below_v2}")
    assert violations == 0


def test_criterion_6_cross_check_fuzzing():
    _scenario(6, reproduce_cross_check(200, seed=0, max_n=3, max_m=4), 300)


def test_criterion_7_solver_consistency():
    _scenario(7, reproduce_solvers(100, seed=0, max_m=10, gs_count=100), None)


def test_criterion_8_single_minded_greedy():
    _scenario(8, reproduce_greedy((4, 5, 6, 7, 8), count=100, seed=0, max_n=8, max_m=12), None)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(summary_lines()))
