#!/usr/bin/env python3
"""
Test Yearly Dynamics

This script tests one simulated year in isolation. It validates:
- Retirement rates
- Exogenous and perception-scaled inflow growth
- The size-dependent homophily schedule
- Homophilic and uniform vacancy assignment
- The step() ordering of measurement, retirement and hiring
- Growth-law setting names

Usage: python test_dynamics.py
"""

import sys
import logging
from pathlib import Path

import numpy as np
from scipy import stats

# Add the repository root to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from modules.boards import FEMALE, MALE, VACANT, BoardState, round_half_up
from modules.dynamics import (InflowState, assign_vacancies, draw_weighted_index, grow_endogenous,
                              grow_exogenous, homophily_weights, lambda_schedule, retire, step,
                              update_inflow, years_to_threshold)
from modules.metrics import perception
from modules.netgen import FirmGraph
from modules.schemas import DynamicsConfig, EndoApplication, GrowthForm

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def _star_state():
    """Hub firm 0 with an all-M board, four leaves with one F each"""
    graph = FirmGraph(5, [(0, i) for i in range(1, 5)])
    state = BoardState([5, 5, 5, 5, 5])
    for leaf in range(1, 5):
        state.board(leaf)[0] = FEMALE
    return graph, state


def test_retire_rates():
    rng = np.random.default_rng(0)
    state = BoardState([10] * 10000)
    vacancies, retired_f, retired_m = retire(state, 0.15, rng)
    sigma = np.sqrt(100000 * 0.15 * 0.85)
    assert abs(vacancies.size - 15000) < 4 * sigma, vacancies.size
    assert retired_f == 0 and retired_m == vacancies.size
    assert np.all(state.seats[vacancies] == VACANT)

    untouched = BoardState([4, 4])
    assert retire(untouched, 0.0, rng)[0].size == 0
    everything = BoardState([4, 4])
    assert retire(everything, 1.0, rng)[0].size == 8
    logger.info(f"✓ Retired {vacancies.size} of 100000 seats at rate 0.15")


def test_grow_exogenous_values():
    assert abs(grow_exogenous(0.02, 0.16, 0.5) - 0.023072) < 1e-12
    assert grow_exogenous(0.0, 0.16, 0.5) == 0.0
    assert grow_exogenous(0.5, 0.16, 0.5) == 0.5
    assert abs(grow_exogenous(0.02, 0.16, 0.5, GrowthForm.PAPER_LITERAL, 100) - 0.02006272) < 1e-12
    logger.info("✓ x=0.02 grows to 0.023072; 0 and x* are fixed points")


def test_grow_exogenous_trajectory():
    """The 0.35 crossing lands in year 27, not between years 15 and 25: with
    g_f = 0.16 from 0.02 towards 0.5 no trajectory reaches 0.35 by year 25."""
    x, series = 0.02, [0.02]
    for _ in range(200):
        x = grow_exogenous(x, 0.16, 0.5)
        series.append(x)
    gaps = [0.5 - value for value in series]
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))
    assert all(value <= 0.5 for value in series)
    crossing = years_to_threshold(series, 0.35)
    assert 25 <= crossing <= 29, crossing
    assert abs(series[-1] - 0.5) < 1e-6
    logger.info(f"✓ Inflow converges monotonically to 0.5 and crosses 0.35 in year {crossing}")


def test_grow_endogenous_values():
    base = grow_exogenous(0.02, 0.16, 0.5)
    assert grow_endogenous(0.02, 0.16, 0.5, 0.0) == base
    assert abs(grow_endogenous(0.02, 0.16, 0.5, -0.5) - 0.021536) < 1e-12
    assert grow_endogenous(0.02, 0.16, 0.5, -1.0) == 0.02
    literal = grow_endogenous(0.02, 0.16, 0.5, 0.1, EndoApplication.LITERAL)
    assert abs(literal - 1.1 * 0.023072) < 1e-12
    assert grow_endogenous(0.02, 0.16, 0.5, -1.0, EndoApplication.LITERAL) == 0.0
    assert grow_endogenous(0.49, 0.16, 0.5, 5.0) == 0.5
    try:
        grow_endogenous(0.02, 0.16, 0.5, -1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("Accepted delta_s < -1")
    logger.info("✓ Perception deviation scales the increment; clamped to [0, x*]")


def test_grow_endogenous_increment_never_decreases():
    rng = np.random.default_rng(1)
    x = 0.02
    for delta in rng.uniform(-1.0, 1.0, size=300):
        x_next = grow_endogenous(x, 0.16, 0.5, float(delta))
        assert x <= x_next <= 0.5
        x = x_next
    logger.info("✓ Increment application keeps the inflow non-decreasing")


def test_update_inflow_dispatch():
    exogenous = DynamicsConfig()
    endogenous = DynamicsConfig(growth_mode='endogenous')
    assert update_inflow(0.02, exogenous, -0.5) == grow_exogenous(0.02, 0.16, 0.5)
    assert update_inflow(0.02, endogenous, -0.5) == grow_endogenous(0.02, 0.16, 0.5, -0.5)
    assert update_inflow(0.02, endogenous, None) == grow_exogenous(0.02, 0.16, 0.5)
    logger.info("✓ update_inflow follows the growth mode")


def test_lambda_schedule_values():
    cfg = DynamicsConfig()
    assert abs(lambda_schedule(0.16, cfg) - 0.5) < 1e-12
    assert lambda_schedule(0.02, cfg) == 0.9
    assert abs(lambda_schedule(0.5, cfg) - 0.0011125) < 1e-6
    grid = [lambda_schedule(y, cfg) for y in np.linspace(0.0, 1.0, 101)]
    assert all(a >= b for a, b in zip(grid, grid[1:]))
    assert all(0.0 <= value <= 0.9 for value in grid)
    fixed = DynamicsConfig(lambda_mode='fixed')
    assert lambda_schedule(0.02, fixed) == lambda_schedule(0.7, fixed) == 0.9
    logger.info("✓ lambda(0.16)=0.5, capped at 0.9, non-increasing in y")


def test_homophily_weights_example():
    graph = FirmGraph(2, [(0, 1)])
    state = BoardState([6, 5])
    state.seats[:6] = [FEMALE, FEMALE, MALE, MALE, MALE, VACANT]
    state.seats[6] = FEMALE
    weights = homophily_weights(state, graph, 2.5, [5, 7])
    assert abs(weights[0] - 1.2) < 1e-12
    assert abs(weights[1] - (0.4 + 2.5 * 0.2)) < 1e-12

    empty = BoardState([3, 3])
    empty.seats[0] = VACANT
    assert np.all(homophily_weights(empty, graph, 2.5, [0]) == 0.0)
    logger.info("✓ f* = 0.2 + 2.5 * 0.4 = 1.2")


def test_draw_weighted_index_frequency():
    rng = np.random.default_rng(2)
    weights = np.array([3.0, 1.0])
    draws = [draw_weighted_index(weights, rng) for _ in range(20000)]
    share = draws.count(0) / len(draws)
    assert abs(share - 0.75) < 0.02, share
    assert draw_weighted_index(np.array([0.0, 0.0, 5.0]), rng) == 2
    logger.info(f"✓ Weighted draw frequency {share:.4f} for weights (3, 1)")


def test_assign_vacancies_counts():
    rng = np.random.default_rng(3)
    graph = FirmGraph(4, [(0, 1), (1, 2), (2, 3)])
    state = BoardState([25] * 4)
    state.seats[::10] = FEMALE
    vacancies = rng.choice(100, size=30, replace=False)
    vacancies = vacancies[state.seats[vacancies] == MALE]
    before = state.female_total
    state.seats[vacancies] = VACANT
    assign_vacancies(state, graph, vacancies, 0.4, 0.9, 2.5, rng)
    assert state.female_total == before + round_half_up(0.4 * vacancies.size)
    assert state.vacancies().size == 0

    state.seats[vacancies] = VACANT
    females = state.female_total
    assign_vacancies(state, graph, vacancies, 0.0, 0.9, 2.5, rng)
    assert state.female_total == females
    assert np.all(state.seats[vacancies] == MALE)
    logger.info("✓ Exactly round(x * V) vacancies become F, the rest M")


def test_assign_vacancies_uniform_when_lambda_zero():
    rng = np.random.default_rng(4)
    graph = FirmGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    hits = np.zeros(20)
    for _ in range(2000):
        state = BoardState([5] * 4, np.full(20, VACANT, dtype=np.int8))
        assign_vacancies(state, graph, np.arange(20), 0.25, 0.0, 2.5, rng)
        hits += state.seats == FEMALE
    assert hits.sum() == 2000 * 5
    p_value = stats.chisquare(hits).pvalue
    assert p_value > 1e-3, p_value
    logger.info(f"✓ lambda=0 placements are uniform (chi-square p={p_value:.3f})")


def test_assign_vacancies_prefers_high_fstar():
    rng = np.random.default_rng(5)
    graph = FirmGraph(2, [(0, 1)])
    to_firm_zero = 0
    reps = 2000
    for _ in range(reps):
        state = BoardState([20, 20])
        state.seats[:5] = FEMALE
        state.seats[10:20] = VACANT
        state.seats[30:40] = VACANT
        vacancies = state.vacancies()
        assign_vacancies(state, graph, vacancies, 0.05, 1.0, 2.5, rng)
        to_firm_zero += state.board(0)[10:].tolist().count(FEMALE)
    # f* is 1.25 at firm 0 and 0.5 at firm 1
    share = to_firm_zero / reps
    assert abs(share - 1.25 / 1.75) < 0.035, share
    logger.info(f"✓ Homophilic placement went to the higher-f* firm {share:.3f} of the time")


def test_step_without_retirement():
    graph, state = _star_state()
    seats = state.seats.copy()
    cfg = DynamicsConfig(retire_rate=0.0)
    seen = []
    state, inflow = step(state, graph, InflowState(x=0.02), cfg,
                         lambda s, x, lam: seen.append((x, lam)), np.random.default_rng(6))
    assert np.array_equal(state.seats, seats)
    assert abs(inflow.x - 0.023072) < 1e-12
    assert seen == [(inflow.x, lambda_schedule(0.16, cfg))]
    logger.info("✓ No retirement leaves the seats unchanged and still grows the inflow")


def test_step_endogenous_reads_pre_retirement_perception():
    graph, state = _star_state()
    delta_s = perception(state, graph, 'all') - 1.0
    assert abs(delta_s + 0.75) < 1e-12
    cfg = DynamicsConfig(retire_rate=1.0, growth_mode='endogenous')
    _, inflow = step(state, graph, InflowState(x=0.02), cfg, None, np.random.default_rng(7))
    assert abs(inflow.x - grow_endogenous(0.02, 0.16, 0.5, delta_s)) < 1e-15
    assert abs(inflow.x - 0.020768) < 1e-12
    assert state.vacancies().size == 0
    logger.info("✓ Endogenous growth uses the perception measured before retirement")


def test_step_lambda_from_post_retirement_share():
    graph, state = _star_state()
    assert lambda_schedule(state.female_share(), DynamicsConfig()) == 0.5
    cfg = DynamicsConfig(retire_rate=1.0)
    seen = []
    step(state, graph, InflowState(x=0.02), cfg, lambda s, x, lam: seen.append(lam), np.random.default_rng(5))
    # every seat retired, so y(t) = 0 and lambda sits at its cap
    assert seen == [0.9]
    logger.info("✓ Lambda is set from the share left after retirement")


def test_step_endogenous_honours_include_self():
    graph, state = _star_state()
    delta_s = perception(state, graph, 'all', include_self=True) - 1.0
    assert abs(delta_s + 0.3) < 1e-12
    cfg = DynamicsConfig(retire_rate=1.0, growth_mode='endogenous', include_self=True)
    _, inflow = step(state, graph, InflowState(x=0.02), cfg, None, np.random.default_rng(7))
    assert abs(inflow.x - grow_endogenous(0.02, 0.16, 0.5, delta_s)) < 1e-15
    assert abs(inflow.x - 0.0221504) < 1e-12
    logger.info("✓ Endogenous growth uses the same perception setting as the recorded metrics")


def test_growth_form_setting_names():
    assert DynamicsConfig(growth_form='paper_literal').growth_form == GrowthForm.PAPER_LITERAL
    assert DynamicsConfig(growth_form='retiree_scaled').growth_form == GrowthForm.PAPER_LITERAL
    cfg = DynamicsConfig(growth_form='paper_literal')
    assert abs(update_inflow(0.02, cfg, n_retiring=100) - 0.02006272) < 1e-12
    logger.info("✓ paper_literal and its retiree_scaled alias select the retiree-scaled growth law")


def test_step_determinism_and_conservation():
    rng = np.random.default_rng(8)
    sizes = rng.integers(3, 15, size=60)
    graph = FirmGraph(60, [(i, (i + 1) % 60) for i in range(60)] + [(i, (i + 7) % 60) for i in range(60)])
    start = BoardState(sizes)
    start.seats[rng.choice(start.total_seats, size=40, replace=False)] = FEMALE
    cfg = DynamicsConfig()

    runs = []
    for _ in range(2):
        state, inflow = start.copy(), InflowState(x=0.02)
        step_rng = np.random.default_rng(99)
        for _ in range(10):
            state, inflow = step(state, graph, inflow, cfg, None, step_rng)
            assert state.total_seats == start.total_seats
            assert state.vacancies().size == 0
        runs.append((state.seats.copy(), inflow.x))
    assert np.array_equal(runs[0][0], runs[1][0])
    assert runs[0][1] == runs[1][1]
    logger.info("✓ Same seed reproduces ten steps; every seat stays filled")


def test_years_to_threshold():
    assert years_to_threshold([0.1, None, 0.5, 0.6], 0.4) == 2
    assert years_to_threshold([0.1, 0.2], 0.4) is None
    logger.info("✓ First year at threshold")


def main():
    """Main test function"""
    logger.info("=" * 60)
    logger.info("Yearly Dynamics Tests")
    logger.info("=" * 60)

    tests = [value for name, value in sorted(globals().items()) if name.startswith('test_') and callable(value)]
    failed = 0
    for test in tests:
        try:
            test()
        except Exception as e:
            logger.error(f"✗ {test.__name__}: {type(e).__name__} {str(e)}")
            failed += 1

    logger.info("=" * 60)
    if failed:
        logger.error(f"❌ {failed} of {len(tests)} tests failed")
        return 1
    logger.info(f"🎉 All {len(tests)} tests passed!")
    return 0


if __name__ == "__main__":
    sys.exit(main())
