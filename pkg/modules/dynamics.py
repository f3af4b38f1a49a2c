"""
Dynamics Module

This module advances a run by one year: seats retire, the share of women
among new appointments (the inflow) grows along a discrete logistic law
(optionally scaled by the perception bias), and the vacancies are filled,
a fraction lambda of the female appointments going to seats weighted by
the homophilic attractiveness f*.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import expit

from .boards import FEMALE, MALE, VACANT, BoardState, round_half_up
from .metrics import firm_fstar, neighborhood_counts, perception
from .netgen import FirmGraph
from .schemas import DynamicsConfig, EndoApplication, GrowthForm, GrowthMode, LambdaMode

logger = logging.getLogger(__name__)

MetricsHook = Callable[[BoardState, float, float], None]


class InflowState(BaseModel):
    """Current share of women among new appointments"""
    x: float = Field(ge=0.0, le=1.0)


def retire(state: BoardState, retire_rate: float,
           rng: np.random.Generator) -> Tuple[np.ndarray, int, int]:
    """Vacate every seat independently with probability retire_rate

    Returns the vacated seat indices and the number of F and M seats vacated.
    """
    if not 0.0 <= retire_rate <= 1.0:
        raise ValueError(f"retire_rate must be in [0, 1], got {retire_rate}")
    vacancies = np.flatnonzero(rng.random(state.total_seats) < retire_rate)
    retired_female = int(np.count_nonzero(state.seats[vacancies] == FEMALE))
    state.seats[vacancies] = VACANT
    return vacancies, retired_female, vacancies.size - retired_female


def _check_inflow(x: float, x_star: float):
    if not 0.0 < x_star <= 1.0:
        raise ValueError(f"Target share must be in (0, 1], got {x_star}")
    if not 0.0 <= x <= x_star + 1e-12:
        raise ValueError(f"Inflow share {x} outside [0, {x_star}]")


def _logistic_increment(x: float, g_f: float, x_star: float,
                        growth_form: GrowthForm = GrowthForm.NORMALIZED, n_retiring: int = 1) -> float:
    if growth_form == GrowthForm.PAPER_LITERAL:
        return g_f * x * 2.0 * (1.0 - x) / max(n_retiring, 1)
    return g_f * x * (1.0 - x / x_star)


def grow_exogenous(x: float, g_f: float, x_star: float,
                   growth_form: GrowthForm = GrowthForm.NORMALIZED, n_retiring: int = 1) -> float:
    """x' = min(x*, x + g_f x (1 - x / x*))"""
    _check_inflow(x, x_star)
    x_next = x + _logistic_increment(x, g_f, x_star, growth_form, n_retiring)
    return float(min(x_star, max(0.0, x_next)))


def grow_endogenous(x: float, g_f: float, x_star: float, delta_s: float,
                    application: EndoApplication = EndoApplication.INCREMENT,
                    growth_form: GrowthForm = GrowthForm.NORMALIZED, n_retiring: int = 1) -> float:
    """Logistic inflow growth scaled by (1 + delta_s)

    increment: only the yearly increment is scaled (floored at zero), so
    the inflow never decreases. literal: the whole next level is scaled.
    """
    _check_inflow(x, x_star)
    if delta_s < -1.0:
        raise ValueError(f"Perception deviation must be >= -1, got {delta_s}")
    increment = _logistic_increment(x, g_f, x_star, growth_form, n_retiring)
    if application == EndoApplication.LITERAL:
        x_next = (1.0 + delta_s) * (x + increment)
    else:
        x_next = x + max(0.0, 1.0 + delta_s) * increment
    return float(min(x_star, max(0.0, x_next)))


def update_inflow(x: float, cfg: DynamicsConfig, delta_s: Optional[float] = None,
                  n_retiring: int = 1) -> float:
    if cfg.growth_mode == GrowthMode.ENDOGENOUS:
        return grow_endogenous(x, cfg.g_f, cfg.target_share, delta_s or 0.0,
                               cfg.endo_application, cfg.growth_form, n_retiring)
    return grow_exogenous(x, cfg.g_f, cfg.target_share, cfg.growth_form, n_retiring)


def lambda_schedule(y: float, cfg: DynamicsConfig) -> float:
    """Share of female appointments placed homophilically"""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"Group share must be in [0, 1], got {y}")
    if cfg.lambda_mode == LambdaMode.FIXED:
        return float(cfg.lambda_bar)
    # 1 - 1 / (1 + exp(-g (y - y_m))) == expit(g (y_m - y))
    return float(min(cfg.lambda_bar, expit(cfg.g_lambda * (cfg.y_m - y))))


def homophily_weights(state: BoardState, graph: FirmGraph, beta: float,
                      vacancies: Sequence[int]) -> np.ndarray:
    """f* of the firm of every vacancy, from the currently occupied seats"""
    vacancies = np.asarray(vacancies, dtype=np.int64)
    if vacancies.size == 0:
        raise ValueError("No vacancies to weight")
    fstar = firm_fstar(*neighborhood_counts(state, graph), beta)
    return fstar[state.firm_of_seat[vacancies]]


def draw_weighted_index(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to non-negative weights"""
    cumulative = np.cumsum(weights)
    index = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side='right'))
    # a draw rounded up to the total lands on the last positive weight
    return min(index, int(np.flatnonzero(weights > 0)[-1]))


def assign_vacancies(state: BoardState, graph: FirmGraph, vacancies: Sequence[int], x_next: float,
                     lam: float, beta: float, rng: np.random.Generator) -> BoardState:
    """Fill every vacancy

    round(x_next * |vacancies|) vacancies become F. round(lam * n_f) of them
    are placed one at a time with probability proportional to f*, the
    weights being recomputed after each placement; all other placements
    are uniform over the vacancies still open.
    """
    if not 0.0 <= x_next <= 1.0:
        raise ValueError(f"x_next must be in [0, 1], got {x_next}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    vacancies = np.sort(np.asarray(vacancies, dtype=np.int64))
    if vacancies.size == 0:
        return state

    n_female = round_half_up(x_next * vacancies.size)
    n_homophilic = round_half_up(lam * n_female)

    open_by_firm = {}
    for seat in vacancies:
        open_by_firm.setdefault(int(state.firm_of_seat[seat]), []).append(int(seat))
    open_count = np.zeros(state.firm_count)
    for firm, seats in open_by_firm.items():
        open_count[firm] = len(seats)

    female, occupied, nbr_female, nbr_occupied = neighborhood_counts(state, graph)
    fallbacks = 0
    for _ in range(n_homophilic):
        weights = firm_fstar(female, occupied, nbr_female, nbr_occupied, beta) * open_count
        if weights.sum() <= 0:
            fallbacks += 1
            weights = open_count
        firm = draw_weighted_index(weights, rng)
        pool = open_by_firm[firm]
        pick = int(rng.random() * len(pool))
        seat = pool[pick]
        pool[pick] = pool[-1]
        pool.pop()
        state.seats[seat] = FEMALE

        open_count[firm] -= 1
        female[firm] += 1
        occupied[firm] += 1
        neighbors = graph.adjacency[firm]
        nbr_female[neighbors] += 1
        nbr_occupied[neighbors] += 1

    if fallbacks:
        logger.debug(f"All f* weights zero for {fallbacks} homophilic placements; used uniform draws")

    remaining = np.sort(np.array([seat for pool in open_by_firm.values() for seat in pool], dtype=np.int64))
    uniform_female = rng.choice(remaining, size=n_female - n_homophilic, replace=False)
    state.seats[remaining] = MALE
    state.seats[uniform_female] = FEMALE
    return state


def step(state: BoardState, graph: FirmGraph, inflow: InflowState, cfg: DynamicsConfig,
         metrics_hook: Optional[MetricsHook], rng: np.random.Generator) -> Tuple[BoardState, InflowState]:
    """Advance one year in place and report through metrics_hook(state, x, lambda)

    The perception bias used by endogenous growth is read from the
    composition before retirement; the group share y(t) that sets lambda
    is read from the seats still occupied after retirement.
    """
    delta_s = None
    if cfg.growth_mode == GrowthMode.ENDOGENOUS:
        perceived = perception(state, graph, 'all', cfg.include_self)
        delta_s = 0.0 if perceived is None else perceived - 1.0

    vacancies, retired_female, retired_male = retire(state, cfg.retire_rate, rng)
    lam = lambda_schedule(state.female_share(), cfg)
    x_next = update_inflow(inflow.x, cfg, delta_s, n_retiring=vacancies.size)
    assign_vacancies(state, graph, vacancies, x_next, lam, cfg.beta, rng)
    logger.debug(f"Step: retired {retired_female}F/{retired_male}M, x={x_next:.6f}, lambda={lam:.6f}")

    if metrics_hook is not None:
        metrics_hook(state, x_next, lam)
    return state, InflowState(x=x_next)


def years_to_threshold(series: Sequence[Optional[float]], threshold: float) -> Optional[int]:
    """First index (year) at which the series reaches the threshold"""
    for year, value in enumerate(series):
        if value is not None and value >= threshold:
            return year
    return None
