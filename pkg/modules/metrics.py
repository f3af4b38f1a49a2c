"""
Metrics Module

This module computes the observables of a simulation run: eigenvector
centrality of the firms, representation of women by centrality bin,
outcome (network) homophily, perception of the share of women and the
dispersion of the homophilic hiring weights f*.

Every function here is read-only with respect to the BoardState.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .boards import BoardState
from .exceptions import ConvergenceError
from .netgen import FirmGraph, GroupLabeling
from .schemas import MetricsConfig, YearRecord

logger = logging.getLogger(__name__)

OBSERVER_GROUPS = ('F', 'M', 'all')


def eigencentrality(graph: FirmGraph, tol: float = 1e-10, max_iter: int = 100000) -> np.ndarray:
    """Dominant-eigenvector centrality scaled to a maximum of 1

    Damped power iteration x <- 0.5 x + 0.5 A x keeps the dominant
    eigenvector while removing the oscillation of (near-)bipartite graphs.
    """
    if graph.n == 0:
        raise ValueError("Centrality of an empty graph is undefined")
    matrix = graph.matrix
    scores = np.ones(graph.n)
    for _ in range(max_iter):
        updated = 0.5 * scores + 0.5 * (matrix @ scores)
        updated /= updated.max()
        if np.max(np.abs(updated - scores)) < tol:
            return updated
        scores = updated
    raise ConvergenceError(f"Eigenvector centrality did not converge within {max_iter} iterations")


def neighborhood_counts(state: BoardState, graph: FirmGraph,
                        include_self: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Own and pooled-neighbor counts of F seats and occupied seats per firm"""
    female = state.female_counts().astype(float)
    occupied = state.occupied_counts().astype(float)
    nbr_female = graph.matrix @ female
    nbr_occupied = graph.matrix @ occupied
    if include_self:
        nbr_female = nbr_female + female
        nbr_occupied = nbr_occupied + occupied
    return female, occupied, nbr_female, nbr_occupied


def _safe_ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    out = np.zeros_like(numerator, dtype=float)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def firm_fstar(female: np.ndarray, occupied: np.ndarray, nbr_female: np.ndarray,
               nbr_occupied: np.ndarray, beta: float) -> np.ndarray:
    """f* = neighbor F-share + beta * own-board F-share, per firm

    The own-board term is dropped for a board without occupied seats.
    """
    return _safe_ratio(nbr_female, nbr_occupied) + beta * _safe_ratio(female, occupied)


def representation_bins(state: BoardState, scores: np.ndarray, n_bins: int = 20) -> np.ndarray:
    """Ratio of the F-share in each centrality bin to the overall F-share

    Firms are ordered from most to least central (ties by firm id) and
    split into n_bins equal-count bins, remainder going to earlier bins.
    """
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    overall = state.female_share()
    ratios = np.zeros(n_bins)
    if overall == 0:
        return ratios

    female = state.female_counts()
    occupied = state.occupied_counts()
    order = np.lexsort((np.arange(state.firm_count), -np.asarray(scores)))
    for b, firms in enumerate(np.array_split(order, n_bins)):
        seats = occupied[firms].sum()
        if seats:
            ratios[b] = (female[firms].sum() / seats) / overall
    return ratios


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    denominator = np.sqrt((dx * dx).sum() * (dy * dy).sum())
    if denominator == 0:
        logger.debug("Zero-variance shares; homophily set to 0")
        return 0.0
    return float(np.clip((dx * dy).sum() / denominator, -1.0, 1.0))


def network_homophily(state: BoardState, graph: FirmGraph) -> float:
    """Correlation across firms of own-board and pooled neighbor-board F-share"""
    if state.firm_count < 2:
        raise ValueError("Network homophily needs at least two firms")
    female, occupied, nbr_female, nbr_occupied = neighborhood_counts(state, graph)
    return _pearson(_safe_ratio(female, occupied), _safe_ratio(nbr_female, nbr_occupied))


def perception(state: BoardState, graph: FirmGraph, observer_group: str = 'all',
               include_self: bool = False) -> Optional[float]:
    """Average F-share seen by the observer group's seats, relative to the true share

    A seat at firm j observes the pooled seats of the boards adjacent to j.
    Returns None when the observer group is empty or there are no F seats.
    """
    if observer_group not in OBSERVER_GROUPS:
        raise ValueError(f"observer_group must be one of {OBSERVER_GROUPS}, got {observer_group}")
    female, occupied, nbr_female, nbr_occupied = neighborhood_counts(state, graph, include_self)
    observers = {'F': female, 'M': occupied - female, 'all': occupied}[observer_group]

    if observers.sum() == 0:
        logger.warning(f"No '{observer_group}' observers; perception is absent")
        return None
    overall = state.female_share()
    if overall == 0:
        return None

    seen = _safe_ratio(nbr_female, nbr_occupied)
    return float((observers * seen).sum() / observers.sum() / overall)


def node_perception(graph: FirmGraph, labeling: GroupLabeling, observer_group: str) -> Optional[float]:
    """Average share of group A among a node's neighbors, relative to the true share of A

    Observers are the nodes of observer_group ('A' or 'B').
    """
    is_a = labeling.is_a.astype(float)
    observers = labeling.labels == observer_group
    true_share = is_a.mean()
    if not observers.any() or true_share == 0:
        return None
    seen = _safe_ratio(graph.matrix @ is_a, graph.degrees.astype(float))
    return float(seen[observers].mean() / true_share)


def fstar_stats(state: BoardState, graph: FirmGraph, beta: float = 2.5) -> Tuple[float, float]:
    """Mean and coefficient of variation of f* evaluated at every occupied seat"""
    female, occupied, nbr_female, nbr_occupied = neighborhood_counts(state, graph)
    fstar = firm_fstar(female, occupied, nbr_female, nbr_occupied, beta)
    seats = occupied.sum()
    if seats == 0:
        return 0.0, 0.0
    mean = float((occupied * fstar).sum() / seats)
    if mean == 0:
        return 0.0, 0.0
    std = float(np.sqrt((occupied * (fstar - mean) ** 2).sum() / seats))
    return mean, std / mean


def measure_year(state: BoardState, graph: FirmGraph, scores: np.ndarray, year: int,
                 inflow_x: float, lambda_used: float, cfg: MetricsConfig) -> YearRecord:
    """Collect every observable of the current state into a YearRecord"""
    perceptions = {group: perception(state, graph, group, cfg.include_self) for group in OBSERVER_GROUPS}
    fstar_mean, fstar_cv = fstar_stats(state, graph, cfg.beta)
    perc_all = perceptions['all']
    return YearRecord(
        year=year,
        share_F=state.female_share(),
        lambda_used=lambda_used,
        inflow_x=inflow_x,
        net_homophily=network_homophily(state, graph),
        perc_F_by_F=perceptions['F'],
        perc_F_by_M=perceptions['M'],
        perc_F_by_all=perc_all,
        delta_s=None if perc_all is None else perc_all - 1.0,
        fstar_mean=fstar_mean,
        fstar_cv=fstar_cv,
        rep_bins=representation_bins(state, scores, cfg.n_bins).tolist(),
    )
