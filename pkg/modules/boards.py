"""
Boards Module

This module holds the simulation state (which group occupies each board
seat) and performs the initial seat assignment, either uniformly over all
seats or biased towards firms with a small degree.
"""

import csv
import logging
import math
from typing import Sequence

import numpy as np

from .netgen import FirmGraph
from .schemas import InitConfig, InitMode

logger = logging.getLogger(__name__)

MALE = 0
FEMALE = 1
VACANT = -1

GROUP_TAGS = {MALE: 'M', FEMALE: 'F', VACANT: '-'}


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


class BoardState:
    """Seat arrays of all boards

    Seats are stored in one flat int8 array; board i owns the slice
    offsets[i]:offsets[i + 1]. Seats are anonymous group tags.
    """

    def __init__(self, sizes: Sequence[int], seats: np.ndarray = None):
        self.sizes = np.asarray(sizes, dtype=np.int64)
        if self.sizes.size and self.sizes.min() < 1:
            raise ValueError("Every board needs at least one seat")
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)
        self.firm_of_seat = np.repeat(np.arange(self.sizes.size), self.sizes)
        if seats is None:
            seats = np.full(int(self.offsets[-1]), MALE, dtype=np.int8)
        elif len(seats) != self.offsets[-1]:
            raise ValueError(f"Got {len(seats)} seats for boards totalling {self.offsets[-1]}")
        self.seats = np.asarray(seats, dtype=np.int8)

    @property
    def firm_count(self) -> int:
        return int(self.sizes.size)

    @property
    def total_seats(self) -> int:
        return int(self.offsets[-1])

    def board(self, firm: int) -> np.ndarray:
        return self.seats[self.offsets[firm]:self.offsets[firm + 1]]

    def female_counts(self) -> np.ndarray:
        return np.bincount(self.firm_of_seat, weights=(self.seats == FEMALE),
                           minlength=self.firm_count).astype(np.int64)

    def occupied_counts(self) -> np.ndarray:
        return np.bincount(self.firm_of_seat, weights=(self.seats != VACANT),
                           minlength=self.firm_count).astype(np.int64)

    @property
    def female_total(self) -> int:
        return int(np.count_nonzero(self.seats == FEMALE))

    def female_share(self) -> float:
        """Overall F-share among occupied seats"""
        occupied = np.count_nonzero(self.seats != VACANT)
        return self.female_total / occupied if occupied else 0.0

    def vacancies(self) -> np.ndarray:
        return np.flatnonzero(self.seats == VACANT)

    def copy(self) -> 'BoardState':
        return BoardState(self.sizes.copy(), self.seats.copy())

    def write_snapshot(self, path: str):
        """Export the seats as CSV firm_id,seat_idx,group"""
        with open(path, 'w', newline='', encoding='utf-8') as file:
            writer = csv.writer(file)
            writer.writerow(['firm_id', 'seat_idx', 'group'])
            for firm in range(self.firm_count):
                for seat_idx, tag in enumerate(self.board(firm)):
                    writer.writerow([firm, seat_idx, GROUP_TAGS[int(tag)]])
        logger.info(f"Wrote snapshot of {self.total_seats} seats to {path}")


def _female_seat_count(total_seats: int, initial_share: float) -> int:
    if not 0.0 <= initial_share <= 1.0:
        raise ValueError(f"initial_share must be in [0, 1], got {initial_share}")
    return min(total_seats, round_half_up(initial_share * total_seats))


def init_unbiased(sizes: Sequence[int], initial_share: float, rng: np.random.Generator) -> BoardState:
    """Place exactly round(initial_share * seats) F seats uniformly at random"""
    state = BoardState(sizes)
    count = _female_seat_count(state.total_seats, initial_share)
    chosen = rng.choice(state.total_seats, size=count, replace=False)
    state.seats[chosen] = FEMALE
    logger.debug(f"Unbiased init: {count} of {state.total_seats} seats set to F")
    return state


def seat_weights(graph: FirmGraph, gamma: float) -> np.ndarray:
    """Per-firm weight 1 + gamma * (<k> - k_j) / k_j of an initial F seat"""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    degrees = graph.degrees.astype(float)
    if degrees.size and degrees.min() < 1:
        raise ValueError("Biased initialization requires every firm to have degree >= 1")
    return 1.0 + gamma * (graph.mean_degree - degrees) / degrees


def init_biased(sizes: Sequence[int], graph: FirmGraph, gamma: float, initial_share: float,
                rng: np.random.Generator) -> BoardState:
    """Place exactly round(initial_share * seats) F seats, weighted towards low-degree firms"""
    weights = seat_weights(graph, gamma)
    state = BoardState(sizes)
    if state.firm_count != graph.n:
        raise ValueError(f"Got {state.firm_count} boards for {graph.n} firms")
    count = _female_seat_count(state.total_seats, initial_share)
    per_seat = weights[state.firm_of_seat]
    chosen = rng.choice(state.total_seats, size=count, replace=False, p=per_seat / per_seat.sum())
    state.seats[chosen] = FEMALE
    logger.debug(f"Biased init (gamma={gamma}): {count} of {state.total_seats} seats set to F")
    return state


def initialize(sizes: Sequence[int], graph: FirmGraph, init_cfg: InitConfig,
               rng: np.random.Generator) -> BoardState:
    if init_cfg.mode == InitMode.BIASED:
        return init_biased(sizes, graph, init_cfg.gamma, init_cfg.initial_share, rng)
    return init_unbiased(sizes, init_cfg.initial_share, rng)
