#!/usr/bin/env python3
"""
Test Network Generation

This script tests the firm network generators and board sizes without
running a scenario. It validates:
- Preferential attachment structure, determinism and degree tail
- Fitness and group-homophily variants
- The discrete power-law tail estimator
- Log-normal board sizes and their rank coupling to degrees

Usage: python test_netgen.py
"""

import os
import sys
import logging
import tempfile
from pathlib import Path
from types import SimpleNamespace

import numpy as np
from scipy import stats

# Add the repository root to the Python path
sys.path.insert(0, str(Path(__file__).parent))

from modules.exceptions import InsufficientDataError
from modules.netgen import (FirmGraph, couple_sizes_to_degrees, fit_tail_exponent, gen_ba,
                            gen_fitness_ba, gen_homophily_ba, group_degree_exponents,
                            sample_board_sizes, write_edge_list)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


def test_ba_small_tree():
    graph = gen_ba(3, 1, np.random.default_rng(0))
    assert len(graph.edges) == 2
    assert graph.degrees.sum() == 4
    assert graph.validate()
    logger.info("✓ n=3, m=1 gives a connected tree with 2 edges")


def test_ba_rejects_too_few_nodes():
    for n, m in [(3, 3), (2, 5), (5, 0)]:
        try:
            gen_ba(n, m, np.random.default_rng(0))
        except ValueError:
            continue
        raise AssertionError(f"gen_ba accepted n={n}, m={m}")
    logger.info("✓ gen_ba rejects n <= m")


def test_ba_structure_and_determinism():
    first = gen_ba(500, 3, np.random.default_rng(42))
    second = gen_ba(500, 3, np.random.default_rng(42))
    other = gen_ba(500, 3, np.random.default_rng(43))
    assert first.edges == second.edges
    assert first.edges != other.edges
    assert first.degrees.min() >= 3
    assert first.validate()
    assert len(first.edges) == 6 + 3 * (500 - 4)
    for i in range(first.n):
        assert i not in first.neighbors(i)
    logger.info("✓ Same seed gives the same edge list; minimum degree is m")


def test_ba_tail_exponent():
    estimates = [fit_tail_exponent(gen_ba(10000, 3, np.random.default_rng(seed)).degrees, 12)
                 for seed in range(3)]
    mean_estimate = float(np.mean(estimates))
    assert 2.7 <= mean_estimate <= 3.3, estimates
    logger.info(f"✓ BA tail exponent {mean_estimate:.3f} (estimates {np.round(estimates, 3)})")


def test_ba_degree_growth_ratio():
    early, late = [], []
    for seed in range(200):
        degrees = gen_ba(1000, 3, np.random.default_rng(seed)).degrees
        early.append(degrees[98:103].mean())
        late.append(degrees[396:405].mean())
    ratio = np.mean(early) / np.mean(late)
    assert abs(ratio - 2.0) <= 0.2, ratio
    logger.info(f"✓ Degree ratio of nodes born at t=100 vs t=400: {ratio:.3f}")


def test_fitness_constant_reduces_to_ba():
    ba = gen_ba(10, 1, np.random.default_rng(5))
    fit = gen_fitness_ba(10, 1, np.ones(10), np.random.default_rng(5))
    assert ba.edge_list() == fit.edge_list()
    logger.info("✓ Constant fitness reproduces the BA edge list")


def test_fitness_near_constant_matches_ba_distribution():
    eta = np.ones(2000)
    eta[0] = 1.000001
    fit = gen_fitness_ba(2000, 2, eta, np.random.default_rng(6)).degrees
    ba = gen_ba(2000, 2, np.random.default_rng(7)).degrees
    p_value = stats.ks_2samp(fit, ba).pvalue
    assert p_value > 1e-3, p_value
    logger.info(f"✓ Near-constant fitness degree distribution matches BA (KS p={p_value:.3f})")


def test_fitness_rejects_non_positive():
    for eta in ([1.0, 0.0, 1.0, 1.0], [1.0, -2.0, 1.0, 1.0]):
        try:
            gen_fitness_ba(4, 1, eta, np.random.default_rng(0))
        except ValueError:
            continue
        raise AssertionError(f"Accepted fitness {eta}")
    logger.info("✓ Non-positive fitness rejected")


def test_fitness_late_node_overtakes():
    n, late_node = 200, 50
    peers = [i for i in range(40, 61) if i != late_node]
    wins = 0
    for seed in range(200):
        eta = np.ones(n)
        eta[late_node] = 10.0
        degrees = gen_fitness_ba(n, 2, eta, np.random.default_rng(seed)).degrees
        wins += degrees[late_node] > np.median(degrees[peers])
    assert wins >= 190, wins
    logger.info(f"✓ High-fitness node beat its peers' median in {wins}/200 runs")


def test_homophily_neutral_groups_equal_degree():
    differences = []
    for seed in range(20):
        graph, labeling = gen_homophily_ba(2000, 2, 0.3, 0.5, np.random.default_rng(seed))
        differences.append(graph.degrees[labeling.is_a].mean() - graph.degrees[~labeling.is_a].mean())
    assert abs(np.mean(differences)) < 0.3, np.mean(differences)
    logger.info(f"✓ h=0.5: mean group degree difference {np.mean(differences):.3f}")


def test_homophily_minority_less_central():
    differences = []
    largest_a, largest_b = [], []
    for seed in range(10):
        graph, labeling = gen_homophily_ba(2000, 2, 0.3, 0.9, np.random.default_rng(seed))
        differences.append(graph.degrees[labeling.is_a].mean() - graph.degrees[~labeling.is_a].mean())
        largest_a.append(graph.degrees[labeling.is_a].max())
        largest_b.append(graph.degrees[~labeling.is_a].max())
    assert np.mean(differences) < 0, differences
    assert np.mean(largest_a) < np.mean(largest_b), (largest_a, largest_b)
    logger.info(f"✓ h=0.9: minority mean degree lower by {-np.mean(differences):.3f}, "
                f"largest hub {np.mean(largest_a):.1f} vs {np.mean(largest_b):.1f}")


def test_homophily_perfect_separation():
    graph, labeling = gen_homophily_ba(1000, 2, 0.3, 1.0, np.random.default_rng(3))
    cross = sum(labeling.is_a[u] != labeling.is_a[v] for u, v in graph.edges)
    # seed clique (3 edges) plus at most m edges for the first m arrivals of each group
    assert cross <= 3 + 2 * 2 * 2, cross
    assert graph.validate()
    logger.info(f"✓ h=1: only {cross} cross-group edges (seed and fallback)")


def test_fit_tail_exponent_exact_sample():
    sample = stats.zipf.rvs(3.0, size=100000, random_state=np.random.default_rng(11))
    estimate = fit_tail_exponent(sample, 1)
    assert abs(estimate - 3.0) <= 0.1, estimate
    logger.info(f"✓ Exact discrete power-law sample: exponent {estimate:.4f}")


def test_fit_tail_exponent_rejects_degenerate():
    for degrees, k_min in [([4] * 200, 2), (list(range(1, 30)), 1)]:
        try:
            fit_tail_exponent(degrees, k_min)
        except InsufficientDataError:
            continue
        raise AssertionError("Degenerate tail accepted")
    logger.info("✓ Zero-variance or short tails rejected")


def test_group_degree_exponents():
    graph, labeling = gen_homophily_ba(3000, 2, 0.3, 0.5, np.random.default_rng(8))
    gamma_a, gamma_b = group_degree_exponents(graph, labeling, 4)
    assert gamma_b is not None and gamma_b > 1.0
    assert gamma_a is None or gamma_a > 1.0
    missing_a, missing_b = group_degree_exponents(graph, labeling, 10 ** 6)
    assert missing_a is None and missing_b is None
    logger.info(f"✓ Group exponents: A={gamma_a}, B={gamma_b}")


def test_board_size_moments():
    sizes = sample_board_sizes(100000, 12.5, 20.6, 3, np.random.default_rng(2))
    assert abs(sizes.mean() - 12.5) <= 0.2, sizes.mean()
    assert abs(sizes.var(ddof=1) - 20.6) <= 1.5, sizes.var(ddof=1)
    assert sizes.min() >= 3
    assert sizes.dtype.kind == 'i'
    logger.info(f"✓ Board sizes: mean {sizes.mean():.3f}, variance {sizes.var(ddof=1):.3f}")


def test_board_size_clamp_and_degenerate():
    assert set(sample_board_sizes(50, 1.7, 0.0, 3, np.random.default_rng(0))) == {3}
    degenerate = sample_board_sizes(1000, 12.5, 0.0, 3, np.random.default_rng(0))
    assert len(set(degenerate)) == 1 and set(degenerate) <= {12, 13}
    logger.info("✓ Small draws clamp to 3; zero variance gives one constant size")


def test_couple_sizes_rank_order():
    graph = SimpleNamespace(n=3, degrees=np.array([5, 1, 3]))
    assert list(couple_sizes_to_degrees(graph, [4, 9, 6])) == [9, 4, 6]
    assert list(couple_sizes_to_degrees(graph, [9, 6, 4])) == [9, 4, 6]
    flat = SimpleNamespace(n=4, degrees=np.array([2, 2, 2, 2]))
    assert list(couple_sizes_to_degrees(flat, [3, 8, 5, 4])) == [8, 5, 4, 3]
    logger.info("✓ Rank coupling, id tie-break and order invariance")


def test_couple_sizes_bijection_on_ba():
    rng = np.random.default_rng(4)
    graph = gen_ba(300, 3, rng)
    sizes = sample_board_sizes(300, rng=rng)
    assigned = couple_sizes_to_degrees(graph, sizes)
    assert sorted(assigned) == sorted(sizes)
    for i in range(graph.n):
        for j in range(graph.n):
            if graph.degrees[i] > graph.degrees[j]:
                assert assigned[i] >= assigned[j]
    logger.info("✓ Coupling is a rank-preserving bijection")


def test_firm_graph_rejects_bad_edges():
    for edges in ([(0, 0)], [(0, 1), (1, 0)], [(0, 5)]):
        try:
            FirmGraph(3, edges)
        except ValueError:
            continue
        raise AssertionError(f"Accepted edges {edges}")
    logger.info("✓ Self-loops, duplicates and unknown nodes rejected")


def test_write_edge_list():
    graph = gen_ba(20, 2, np.random.default_rng(1))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'edges.csv')
        write_edge_list(graph, path)
        with open(path, encoding='utf-8') as f:
            lines = f.read().splitlines()
    assert lines[0] == 'src,dst'
    assert len(lines) == len(graph.edges) + 1
    logger.info("✓ Edge list dump written")


def main():
    """Main test function"""
    logger.info("=" * 60)
    logger.info("Network Generation Tests")
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
