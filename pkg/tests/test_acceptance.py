"""Acceptance criteria 1-9; each test prints one PASS/FAIL line (run with -s to see them)."""
import time

import pytest

from fixtrace import acceptance

SEED = 0
BUDGET = 10.0


def check(key: str, fn, *args):
    t = time.perf_counter()
    ok, detail = fn(SEED, *args)
    seconds = time.perf_counter() - t
    print(f"\ncriterion {key}: {'PASS' if ok and seconds <= BUDGET else 'FAIL'} ({seconds:.2f}s)")
    assert seconds <= BUDGET, f"criterion {key} took {seconds:.2f}s"
    return ok, detail


def test_criterion_1_coefficient_vectors():
    ok, detail = check("1", acceptance.criterion_1)
    assert ok, detail


def test_criterion_2_lefschetz_additivity():
    ok, detail = check("2", acceptance.criterion_2)
    assert ok, detail
    assert detail["shipped"] == {"L_f": 0, "L_fA": 1, "L_cone": -1}


def test_criterion_3_linearity():
    ok, detail = check("3", acceptance.criterion_3)
    assert ok, detail
    assert detail["random"] >= 500


def test_criterion_4_dual_pairs():
    ok, detail = check("4", acceptance.criterion_4)
    assert ok, detail


def test_criterion_5_circle_reidemeister():
    ok, detail = check("5", acceptance.criterion_5)
    assert ok, detail


def test_criterion_6_reidemeister_additivity():
    ok, detail = check("6", acceptance.criterion_6)
    assert ok, detail
    assert detail["torus_classes"] == abs(detail["det"])


def test_criterion_7a_duality_composite():
    ok, detail = check("7a", acceptance.criterion_7a)
    assert ok, detail


@pytest.mark.xfail(strict=True, reason="the stated twisted cyclicity fails for automorphisms of S3; "
                                       "see the decisions ledger")
def test_criterion_7b_twisted_cyclicity_as_stated():
    ok, detail = check("7b", acceptance.criterion_7b)
    assert ok, detail


def test_criterion_7b_corrected_identity():
    _, detail = acceptance.criterion_7b(SEED)
    assert detail["corrected_failures"] == 0
    # every failure of the stated form is over the one non-abelian group
    assert set(detail["failing_groups"]) == {"S3"}


def test_criterion_7c_shadow_cyclicity():
    ok, detail = check("7c", acceptance.criterion_7c)
    assert ok, detail


def test_criterion_7_overall_within_budget():
    t = time.perf_counter()
    ok, detail = acceptance.criterion_7(SEED)
    seconds = time.perf_counter() - t
    print(f"\ncriterion 7: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s; 7b as stated fails, see ledger)")
    assert seconds <= BUDGET
    assert detail["7a"]["ok"] and detail["7c"]["ok"] and not detail["7b"]["ok"]


def test_criterion_8_base_change():
    ok, detail = check("8", acceptance.criterion_8)
    assert ok, detail


def test_criterion_9_hopf():
    ok, detail = check("9", acceptance.criterion_9)
    assert ok, detail


def test_table_lists_every_criterion():
    outcomes = acceptance.run(SEED, ["1", "5"])
    text = acceptance.table(outcomes)
    assert [line.split()[0] for line in text.splitlines()[1:]] == ["1", "5"]
