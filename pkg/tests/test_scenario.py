from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from transq.chain import StepParams, steady_state
from transq.scenario import (
    BudgetError,
    Period,
    Scenario,
    delta_threshold,
    proportional_budget,
    solve_plan,
    solve_scenario,
)
from transq.unistep import SolverConfig


def simple_scenario(**overrides) -> Scenario:
    defaults = dict(
        periods=(Period(10.0, 0.8, 1.0, 2), Period(10.0, 1.2, 1.0, 2)),
        capacity=25,
        eps_total=1e-3,
        cfg=SolverConfig(eps_step=1e-8),
        output_dt=0.0,
    )
    defaults.update(overrides)
    return Scenario(**defaults)


class TestDeltaThreshold:
    def test_published_setup(self):
        assert delta_threshold(5e-3, 0.0, 288 * 1e-7) == pytest.approx(4.9712e-3, rel=1e-12)

    def test_exhausted_budget_clamps_to_zero(self):
        assert delta_threshold(1e-2, 1e-2, 1e-5) == 0.0

    def test_partial_budget(self):
        assert delta_threshold(1e-2, 3e-3, 100 * 1e-7) == pytest.approx(6.99e-3)


class TestProportionalBudget:
    def test_single_remaining_step_takes_everything(self):
        assert proportional_budget(1e-3, 42.0, 42.0) == pytest.approx(1e-3)

    def test_share_of_horizon(self):
        assert proportional_budget(2.88e-3, 300.0, 86400.0) == pytest.approx(1e-5)

    def test_zero_duration(self):
        assert proportional_budget(1e-3, 0.0, 100.0) == 0.0

    def test_zero_horizon_rejected(self):
        with pytest.raises(ValueError):
            proportional_budget(1e-3, 1.0, 0.0)


class TestPlan:
    def test_period_boundaries_only(self):
        plan = solve_plan(simple_scenario())
        assert [dt for dt, _ in plan] == [10.0, 10.0]

    def test_long_period_split_at_output_interval(self):
        sc = simple_scenario(periods=(Period(900.0, 0.5, 1.0, 2),), output_dt=300.0)
        assert [dt for dt, _ in solve_plan(sc)] == [300.0, 300.0, 300.0]

    def test_remainder_chunk(self):
        sc = simple_scenario(periods=(Period(250.0, 0.5, 1.0, 2),), output_dt=100.0)
        assert [dt for dt, _ in solve_plan(sc)] == [100.0, 100.0, 50.0]

    def test_float_crumbs_absorbed_into_last_chunk(self):
        # 0.3 is not a sum of three exact 0.1 floats; the plan must still
        # produce exactly three chunks covering the period.
        sc = simple_scenario(periods=(Period(0.3, 0.5, 1.0, 2),), output_dt=0.1)
        chunks = [dt for dt, _ in solve_plan(sc)]
        assert len(chunks) == 3
        assert sum(chunks) == pytest.approx(0.3, abs=1e-15)
        assert min(chunks) > 0.09


class TestSolveScenario:
    def test_idle_system_stays_empty_and_error_is_additive(self):
        sc = simple_scenario(
            periods=tuple(Period(1.0, 0.0, 1.0, 1) for _ in range(5)),
            capacity=4,
        )
        tl = solve_scenario(sc)
        assert len(tl.records) == 5
        for i, rec in enumerate(tl.records):
            assert rec.p[0] == pytest.approx(1.0, abs=1e-7)
            assert rec.eps_accum == pytest.approx((i + 1) * 1e-8, rel=1e-12)
            assert rec.outcome == "full-sum"

    def test_budget_infeasible_rejected(self):
        sc = simple_scenario(eps_total=1e-8)
        with pytest.raises(BudgetError):
            solve_scenario(sc)

    def test_times_strictly_increasing_and_bounded_error(self):
        tl = solve_scenario(simple_scenario())
        times = [r.t for r in tl.records]
        assert times == sorted(times) and len(set(times)) == len(times)
        assert all(r.eps_accum <= 1e-3 for r in tl.records)

    def test_detection_resets_error_then_grows_again(self):
        # Start at the stationary point: the first step stops immediately
        # with its own tiny absolute error; later steps are additive.
        step = StepParams(1.2, 1.0, 2, 25, 40.0)
        pi = steady_state(step)
        sc = simple_scenario(
            periods=tuple(Period(40.0, 1.2, 1.0, 2) for _ in range(3)),
            eps_total=1e-2,
            cfg=SolverConfig(eps_step=1e-8, check_spacing=1),
            initial=pi,
        )
        tl = solve_scenario(sc)
        assert tl.records[0].outcome == "ssd-direct"
        assert tl.records[0].eps_accum < 1e-8
        # Follow-up steps cannot trust closeness bought with carried error.
        assert tl.records[1].outcome == "full-sum"
        assert tl.records[1].eps_accum == pytest.approx(
            tl.records[0].eps_accum + 1e-8)

    def test_server_change_hands_vector_over_unchanged(self):
        base = simple_scenario()
        more = simple_scenario(
            periods=(base.periods[0], dataclasses.replace(base.periods[1], servers=5)))
        a = solve_scenario(base)
        b = solve_scenario(more)
        np.testing.assert_array_equal(a.records[0].p, b.records[0].p)
        assert a.records[0].eps_accum == b.records[0].eps_accum
        assert not np.array_equal(a.records[1].p, b.records[1].p)

    def test_deterministic(self):
        a = solve_scenario(simple_scenario())
        b = solve_scenario(simple_scenario())
        for ra, rb in zip(a.records, b.records):
            assert ra.t == rb.t and ra.eps_accum == rb.eps_accum
            np.testing.assert_array_equal(ra.p, rb.p)

    def test_ssd_disabled_forces_full_sums(self):
        step = StepParams(1.2, 1.0, 2, 25, 40.0)
        sc = simple_scenario(
            periods=(Period(40.0, 1.2, 1.0, 2),),
            initial=steady_state(step),
            ssd=False,
        )
        tl = solve_scenario(sc)
        assert all(r.outcome == "full-sum" for r in tl.records)
        assert all(r.delta == 0.0 for r in tl.records)

    def test_proportional_budget_mode(self):
        sc = simple_scenario(budget="proportional", eps_total=1e-4)
        tl = solve_scenario(sc)
        assert all(r.outcome == "full-sum" for r in tl.records)
        # Both steps cover half the horizon, so each burns half the budget.
        assert tl.records[0].eps_accum == pytest.approx(5e-5)
        assert tl.records[1].eps_accum == pytest.approx(1e-4)

    def test_initial_length_validated(self):
        with pytest.raises(ValueError):
            simple_scenario(initial=np.full(7, 1.0 / 7.0))

    def test_delta_constant_while_budget_burns_as_planned(self):
        # Spent plus remaining truncation budget is invariant across
        # full-sum steps, so the threshold holds steady.
        tl = solve_scenario(simple_scenario())
        assert all(r.outcome == "full-sum" for r in tl.records)
        assert tl.records[0].delta == pytest.approx(1e-3 - 2 * 1e-8)
        assert tl.records[1].delta == pytest.approx(tl.records[0].delta, rel=1e-12)


class TestTimelineSummaries:
    def test_counts(self):
        tl = solve_scenario(simple_scenario())
        assert tl.total_mvm == sum(r.iterations for r in tl.records)
        assert tl.max_eps_accum == max(r.eps_accum for r in tl.records)
        assert tl.ssd_steps == sum(r.outcome != "full-sum" for r in tl.records)
        assert tl.delta_first == tl.records[0].delta
