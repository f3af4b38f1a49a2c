"""
Network Generation Module

This module builds the static firm network and the board sizes of a run:
growth with preferential attachment (plain, fitness-weighted and
group-homophilic variants), the discrete power-law tail estimator used to
check them, log-normal board sizes and the rank coupling of board sizes to
firm degrees.

All generators are pure functions of their parameters and the numpy
Generator passed in; the same seed always yields the same edge list.
"""

import csv
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .exceptions import InsufficientDataError

logger = logging.getLogger(__name__)

GROUP_A = 'A'
GROUP_B = 'B'
MIN_TAIL_OBSERVATIONS = 50


class FirmGraph:
    """Static undirected firm network with dense integer node ids"""

    def __init__(self, n: int, edges: Sequence[Tuple[int, int]]):
        self.n = int(n)
        self.edges = [(int(u), int(v)) for u, v in edges]
        neighbors = [set() for _ in range(self.n)]
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"Self-loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"Edge ({u}, {v}) references a node outside 0..{self.n - 1}")
            if v in neighbors[u]:
                raise ValueError(f"Duplicate edge ({u}, {v})")
            neighbors[u].add(v)
            neighbors[v].add(u)
        self.adjacency = [np.array(sorted(nbrs), dtype=np.int64) for nbrs in neighbors]
        self.degrees = np.array([len(nbrs) for nbrs in neighbors], dtype=np.int64)
        self._matrix = None

    @property
    def mean_degree(self) -> float:
        return float(self.degrees.mean()) if self.n else 0.0

    @property
    def matrix(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix (cached)"""
        if self._matrix is None:
            if self.edges:
                rows, cols = zip(*self.edges)
            else:
                rows, cols = (), ()
            data = np.ones(2 * len(self.edges))
            self._matrix = sparse.csr_matrix(
                (data, (np.r_[rows, cols], np.r_[cols, rows])), shape=(self.n, self.n))
        return self._matrix

    def edge_list(self) -> List[Tuple[int, int]]:
        """Canonical sorted edge list with u < v"""
        return sorted((min(u, v), max(u, v)) for u, v in self.edges)

    def neighbors(self, node: int) -> np.ndarray:
        return self.adjacency[node]

    def validate(self) -> bool:
        """Check undirectedness and the minimum degree of 1"""
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if i not in self.adjacency[j]:
                    return False
        return bool(self.n == 0 or self.degrees.min() >= 1)


class GroupLabeling:
    """Per-node group tags A (minority) or B"""

    def __init__(self, labels: Sequence[str]):
        self.labels = np.asarray(labels, dtype='<U1')

    @property
    def is_a(self) -> np.ndarray:
        return self.labels == GROUP_A

    @property
    def f_a(self) -> float:
        return float(self.is_a.mean()) if len(self.labels) else 0.0


def _seed_clique(m: int) -> List[Tuple[int, int]]:
    return [(i, j) for j in range(m + 1) for i in range(j)]


def _check_growth_args(n: int, m: int):
    if m < 1 or n <= m:
        raise ValueError(f"Network must have m >= 1 and n > m, got m={m}, n={n}")


def gen_ba(n: int, m: int, rng: np.random.Generator) -> FirmGraph:
    """Grow a preferential attachment network

    Starts from a clique of m+1 nodes; every later node attaches to m
    distinct existing nodes drawn with probability proportional to degree
    using the repeated-node list.
    """
    _check_growth_args(n, m)
    edges = _seed_clique(m)
    repeated_nodes = [node for edge in edges for node in edge]

    for source in range(m + 1, n):
        targets = []
        seen = set()
        while len(targets) < m:
            target = repeated_nodes[int(rng.random() * len(repeated_nodes))]
            if target not in seen:
                seen.add(target)
                targets.append(target)
        for target in targets:
            edges.append((source, target))
        repeated_nodes.extend(targets)
        repeated_nodes.extend([source] * m)

    return FirmGraph(n, edges)


def gen_fitness_ba(n: int, m: int, fitnesses: Sequence[float], rng: np.random.Generator) -> FirmGraph:
    """Grow a network where attachment is proportional to fitness times degree"""
    _check_growth_args(n, m)
    eta = np.asarray(fitnesses, dtype=float)
    if eta.shape != (n,):
        raise ValueError(f"Expected {n} fitness values, got {eta.size}")
    if not np.all(np.isfinite(eta)) or np.any(eta <= 0):
        raise ValueError("All fitness values must be positive")

    # constant fitness cancels in the attachment probability
    if np.all(eta == eta[0]):
        return gen_ba(n, m, rng)

    edges = _seed_clique(m)
    degrees = np.zeros(n)
    degrees[:m + 1] = m

    for source in range(m + 1, n):
        weights = eta[:source] * degrees[:source]
        targets = rng.choice(source, size=m, replace=False, p=weights / weights.sum())
        for target in targets:
            edges.append((source, int(target)))
        degrees[targets] += 1
        degrees[source] = m

    return FirmGraph(n, edges)


def gen_homophily_ba(n: int, m: int, f_a: float, h: float,
                     rng: np.random.Generator) -> Tuple[FirmGraph, GroupLabeling]:
    """Grow a preferential attachment network with group homophily

    Each node is in group A with probability f_a. A new node links to an
    existing node with probability proportional to h (same group) or
    1 - h (other group) times its degree. When fewer than m candidates have
    positive weight the missing targets are drawn uniformly.
    """
    _check_growth_args(n, m)
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"Homophily h must be in [0, 1], got {h}")
    if not 0.0 < f_a < 1.0:
        raise ValueError(f"Minority fraction f_a must be in (0, 1), got {f_a}")

    is_a = rng.random(n) < f_a
    edges = _seed_clique(m)
    degrees = np.zeros(n)
    degrees[:m + 1] = m
    fallbacks = 0

    for source in range(m + 1, n):
        affinity = np.where(is_a[:source] == is_a[source], h, 1.0 - h)
        weights = affinity * degrees[:source]
        positive = np.flatnonzero(weights > 0)
        if positive.size >= m:
            targets = rng.choice(source, size=m, replace=False, p=weights / weights.sum())
        else:
            fallbacks += 1
            rest = np.setdiff1d(np.arange(source), positive)
            extra = rng.choice(rest, size=m - positive.size, replace=False)
            targets = np.concatenate([positive, extra])
        for target in targets:
            edges.append((source, int(target)))
        degrees[targets] += 1
        degrees[source] = m

    if fallbacks:
        logger.debug(f"Homophily network used uniform fallback for {fallbacks} nodes")

    labels = np.where(is_a, GROUP_A, GROUP_B)
    return FirmGraph(n, edges), GroupLabeling(labels)


def fit_tail_exponent(degrees: Sequence[int], k_min: int) -> float:
    """Maximum-likelihood exponent of a discrete power law fitted to k >= k_min"""
    if k_min < 1:
        raise ValueError(f"k_min must be >= 1, got {k_min}")
    data = np.asarray(degrees, dtype=float)
    tail = data[data >= k_min]
    if tail.size < MIN_TAIL_OBSERVATIONS:
        raise InsufficientDataError(
            f"Need at least {MIN_TAIL_OBSERVATIONS} observations >= k_min={k_min}, got {tail.size}")
    if np.all(tail == tail[0]):
        raise InsufficientDataError("Tail has zero variance; exponent is undefined")

    n = tail.size
    log_sum = np.log(tail).sum()

    def negative_log_likelihood(alpha):
        return n * np.log(zeta(alpha, k_min)) + alpha * log_sum

    result = minimize_scalar(negative_log_likelihood, bounds=(1.0001, 20.0), method='bounded',
                             options={'xatol': 1e-8})
    return float(result.x)


def group_degree_exponents(graph: FirmGraph, labeling: GroupLabeling,
                           k_min: int) -> Tuple[Optional[float], Optional[float]]:
    """Tail exponents of the degree distributions of group A and group B"""
    exponents = []
    for mask in (labeling.is_a, ~labeling.is_a):
        try:
            exponents.append(fit_tail_exponent(graph.degrees[mask], k_min))
        except InsufficientDataError as e:
            logger.debug(f"Group exponent unavailable: {str(e)}")
            exponents.append(None)
    return exponents[0], exponents[1]


def sample_board_sizes(n: int, mean: float = 12.5, variance: float = 20.6, min_size: int = 3,
                       rng: np.random.Generator = None) -> np.ndarray:
    """Draw log-normal board sizes with the given arithmetic mean and variance"""
    if mean <= 0:
        raise ValueError(f"Board size mean must be positive, got {mean}")
    if variance < 0:
        raise ValueError(f"Board size variance must be non-negative, got {variance}")
    rng = rng if rng is not None else np.random.default_rng()

    if variance == 0:
        raw = np.full(n, float(mean))
    else:
        sigma2 = np.log1p(variance / mean ** 2)
        mu = np.log(mean) - sigma2 / 2.0
        raw = rng.lognormal(mu, np.sqrt(sigma2), size=n)

    sizes = np.floor(raw + 0.5).astype(np.int64)
    return np.maximum(sizes, min_size)


def couple_sizes_to_degrees(graph: FirmGraph, sizes: Sequence[int]) -> np.ndarray:
    """Give the k-th largest board to the firm with the k-th largest degree

    Ties in degree are broken by node id.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.size != graph.n:
        raise ValueError(f"Got {sizes.size} board sizes for {graph.n} firms")
    order = np.lexsort((np.arange(graph.n), -graph.degrees))
    assigned = np.empty(graph.n, dtype=np.int64)
    assigned[order] = np.sort(sizes)[::-1]
    return assigned


def build_firm_network(n: int, m: int, mean: float, variance: float, min_size: int,
                       rng: np.random.Generator) -> Tuple[FirmGraph, np.ndarray]:
    """Generate the firm network and its degree-coupled board sizes"""
    graph = gen_ba(n, m, rng)
    sizes = sample_board_sizes(n, mean, variance, min_size, rng)
    return graph, couple_sizes_to_degrees(graph, sizes)


def write_edge_list(graph: FirmGraph, path: str):
    """Dump the edge list as a two-column CSV src,dst"""
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file)
        writer.writerow(['src', 'dst'])
        writer.writerows(graph.edge_list())
    logger.info(f"Wrote {len(graph.edges)} edges to {path}")
