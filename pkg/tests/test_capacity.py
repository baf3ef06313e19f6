from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from peerhelp.capacity import (capacity_lower_bound_sweep, deliverable_rate, fixed_point_rate,
                               plan_capacity)
from peerhelp.model import Scenario
from peerhelp.phm import build_phm
from peerhelp.rateplan import verify_plan

from conftest import k1_scenarios


def solve_fixed_point(n, q):
    """v(w) is affine in w, so r = v(r) is r = a / (1 - b) with a = v(0), b = v(1) - v(0)."""
    a = deliverable_rate(0, n, q)
    b = deliverable_rate(1, n, q) - a
    return a / (1 - b)


@pytest.mark.parametrize("n, q, expected", [(2, 0, F(5, 6)), (3, 1, F(11, 12)), (1, 0, F(1))])
def test_fixed_point_examples(n, q, expected):
    assert fixed_point_rate(n, q).rate == expected
    assert solve_fixed_point(n, q) == expected


def test_fixed_point_range():
    with pytest.raises(ValueError):
        fixed_point_rate(2, 2)
    with pytest.raises(ValueError):
        fixed_point_rate(0, 0)


def test_fixed_point_sweep_properties():
    for n in range(1, 60):
        prev = None
        for q in range(n):
            r = fixed_point_rate(n, q).rate
            assert deliverable_rate(r, n, q) == r
            assert r == solve_fixed_point(n, q)
            assert r >= F(5, 6)
            assert (r == F(5, 6)) == ((n, q) == (2, 0))
            if prev is not None:
                assert r >= prev
            prev = r
    zeros = [fixed_point_rate(n, 0).rate for n in range(2, 200)]
    assert zeros == sorted(zeros)


def test_sweep_small():
    table = capacity_lower_bound_sweep(2)
    assert [(r.n, r.q, r.corollary_rate, r.fixed_point_rate) for r in table.rows] == [
        (1, 0, 1, 1), (2, 0, F(3, 4), F(5, 6)), (2, 1, 1, 1)]
    assert table.to_csv().splitlines() == [
        "n,q,corollary_rate,fixed_point_rate", "1,0,1,1", "2,0,3/4,5/6", "2,1,1,1"]


def test_sweep_100():
    table = capacity_lower_bound_sweep(100)
    assert len(table.rows) == 5050
    assert table.corollary_min == F(3, 4) and table.corollary_argmin == ((2, 0),)
    assert table.fixed_point_min == F(5, 6) and table.fixed_point_argmin == ((2, 0),)
    assert min((r.corollary_rate, r.n, r.q) for r in table.rows) == (F(3, 4), 2, 0)


def test_sweep_rejects_small():
    with pytest.raises(ValueError):
        capacity_lower_bound_sweep(1)


def worst_case():
    # G_1 = {2, 3} both busy (2 -> 1, 3 -> 1; 1 -> 2, 4 -> 3); user 4 idle helps G_1.
    return Scenario.build(1, {1: [2], 2: [1], 3: [1], 4: [3]})


def test_worst_case_at_five_sixths():
    s = worst_case()
    phm = build_phm(s)
    assert phm.help_sets[1] == {4}
    plans = plan_capacity(s, phm, F(5, 6))
    p = plans[1]
    assert p.threshold == F(5, 6)
    assert p.achieved_rate == F(5, 6)
    report = verify_plan(s, plans)
    assert report.feasible
    assert set(report.per_viewer_ingress.values()) == {F(5, 6)}
    assert report.per_user_egress[2] == 1 and report.per_user_egress[3] == 1


def test_worst_case_above_five_sixths():
    s = worst_case()
    c = F(5, 6) + F(1, 1000)
    plans = plan_capacity(s, build_phm(s), c)
    assert plans[1].achieved_rate < c
    assert verify_plan(s, plans).feasible


def test_cycle_direct(scenario3):
    plans = plan_capacity(scenario3, build_phm(scenario3))
    assert all(p.direct_rate == F(5, 6) and not p.relay_rates for p in plans.values())
    report = verify_plan(scenario3, plans)
    assert report.feasible
    assert set(report.per_user_egress.values()) == {F(5, 6)}


def test_worked_six(scenario6):
    plans = plan_capacity(scenario6, build_phm(scenario6))
    assert verify_plan(scenario6, plans).feasible
    assert all(p.achieved_rate == F(5, 6) for p in plans.values())
    # G_2: n=3, one in-group helper, so strict slack below its 11/12 fixed point
    assert plans[2].v_value > F(5, 6)
    assert plans[2].threshold > F(5, 6)


def test_rejects_bad_inputs(scenario6):
    phm = build_phm(scenario6)
    for c in (F(0), F(-1), F(7, 6)):
        with pytest.raises(ValueError):
            plan_capacity(scenario6, phm, c)
    hetero = Scenario.build(1, {1: [2], 2: [1]}, {1: F(2)})
    with pytest.raises(ValueError, match="unit uploads"):
        plan_capacity(hetero, build_phm(hetero))


@settings(max_examples=200, deadline=None)
@given(k1_scenarios(max_n=40))
def test_capacity_feasible_at_five_sixths(s):
    plans = plan_capacity(s, build_phm(s))
    report = verify_plan(s, plans)
    assert report.feasible, report.violations
    assert set(report.per_viewer_ingress.values()) == {F(5, 6)}
    assert all(p.achieved_rate == min(p.budget, p.v_value) for p in plans.values())
