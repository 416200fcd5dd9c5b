#!/usr/bin/env python3
"""
Tests for the tree cells of configuration space and the prime-power obstruction
"""

import math

import pytest
from sympy import factorint

from convex_equipart.errors import EnumerationBoundsError, GeometryError
from convex_equipart.topology.cells import (
    LabeledTree,
    chain_ranks,
    compositions,
    count_trees,
    enumerate_trees,
    euler_characteristic,
)
from convex_equipart.topology.obstruction import boundary_coefficient, obstruction, obstruction_table

SMALL_CASES = [(2, 2), (3, 2), (2, 3), (4, 2)]


def test_compositions():
    assert sorted(compositions(3)) == [(1, 1, 1), (1, 2), (2, 1), (3,)]
    assert len(list(compositions(6))) == 2 ** 5


def test_enumerate_two_points_in_plane():
    unlabeled = enumerate_trees(2, 2)
    assert {dim: len(trees) for dim, trees in unlabeled.items()} == {3: 1, 4: 1}
    labeled = enumerate_trees(2, 2, labeled=True)
    assert {dim: len(trees) for dim, trees in labeled.items()} == {3: 2, 4: 2}
    assert unlabeled[3][0].level_sizes() == [1, 1, 2]
    assert unlabeled[4][0].level_sizes() == [1, 2, 2]


def test_enumerate_three_points_in_plane():
    counts = {dim: len(trees) for dim, trees in enumerate_trees(3, 2).items()}
    assert counts == {4: 1, 5: 2, 6: 1}


def test_enumerate_single_point():
    # one point of the plane: the whole space is a single open cell
    trees = enumerate_trees(1, 2)
    assert list(trees) == [2]
    assert [tree.level_sizes() for tree in trees[2]] == [[1, 1, 1]]
    assert {dim: len(found) for dim, found in enumerate_trees(1, 2, labeled=True).items()} == {2: 1}
    assert count_trees(1, 2) == {2: (1, 1)}
    assert LabeledTree.from_configuration([(0.3, -2.0)]).unlabeled() == trees[2][0]


@pytest.mark.parametrize("n, d", SMALL_CASES)
def test_cell_decomposition_facts(n, d):
    counts = count_trees(n, d)
    assert min(counts) == n + d - 1
    assert counts[n + d - 1][0] == 1
    assert counts[n + d][0] == n - 1
    assert max(counts) == n * d
    assert counts[n * d] == (1, math.factorial(n))


@pytest.mark.parametrize("n, d", SMALL_CASES)
def test_two_branch_cells_match_compositions(n, d):
    branches = [tree for tree in enumerate_trees(n, d)[n + d] if tree.level_sizes()[-2] == 2]
    assert len(branches) == n - 1
    # one generator for each n1 + n2 = n with both parts positive
    splits = sorted(tuple(len(parent) for parent in _level(tree.shape, d - 1)) for tree in branches)
    assert splits == [(n1, n - n1) for n1 in range(1, n)]


def _level(shape, depth):
    level = [shape]
    for _ in range(depth):
        level = [child for vertex in level for child in vertex]
    return level


def test_labeled_counts_agree_with_enumeration():
    labeled = enumerate_trees(3, 2, labeled=True)
    counts = count_trees(3, 2)
    assert {dim: len(trees) for dim, trees in labeled.items()} == {dim: c[1] for dim, c in counts.items()}
    labels = {tree.labels for tree in labeled[6]}
    assert len(labels) == 6


@pytest.mark.parametrize("points, dimension, labels", [
    ([(0, 0), (1, 0)], 4, (1, 2)),
    ([(1, 0), (0, 0)], 4, (2, 1)),
    ([(0, 1), (0, 0)], 3, (2, 1)),
    ([(0, 0), (0, 1), (2, 5)], 5, (1, 2, 3)),
    ([(0.5,), (-1.0,)], 2, (2, 1)),
])
def test_tree_of_configuration(points, dimension, labels):
    tree = LabeledTree.from_configuration(points)
    assert tree.dimension == dimension
    assert tree.labels == labels
    assert tree.unlabeled() in enumerate_trees(len(points), len(points[0]))[dimension]


def test_tree_of_configuration_rejects_collisions():
    with pytest.raises(GeometryError):
        LabeledTree.from_configuration([(0, 0), (1, 1), (0, 0)])


def test_tree_validation():
    with pytest.raises(ValueError):
        LabeledTree(((), ((),)), 2)
    with pytest.raises(ValueError):
        LabeledTree(((), ()), 1, labels=(1, 1))


def test_chain_ranks_and_euler_characteristic():
    assert chain_ranks(2, 2) == {0: 1, 3: 1, 4: 1}
    assert chain_ranks(2, 2, labeled=True) == {0: 1, 3: 2, 4: 2}
    assert chain_ranks(3, 2) == {0: 1, 4: 1, 5: 2, 6: 1}
    assert euler_characteristic(3, 2) == 1 + 1 - 2 + 1
    assert euler_characteristic(2, 2, labeled=True) == 1 - 2 + 2


@pytest.mark.parametrize("n, d", [(0, 2), (9, 2), (2, 0), (2, 4)])
def test_enumeration_bounds(n, d):
    with pytest.raises(EnumerationBoundsError):
        count_trees(n, d)


def test_labeled_enumeration_limit():
    with pytest.raises(EnumerationBoundsError):
        enumerate_trees(6, 3, labeled=True, max_cells=1000)


@pytest.mark.parametrize("n, n1, twisted, expected", [
    (4, 2, True, 6),
    (4, 1, True, -4),
    (4, 1, False, 4),
    (5, 3, True, -10),
])
def test_boundary_coefficient(n, n1, twisted, expected):
    assert boundary_coefficient(n, n1, twisted) == expected


@pytest.mark.parametrize("n1", [0, 4, -1])
def test_boundary_coefficient_range(n1):
    with pytest.raises(ValueError):
        boundary_coefficient(4, n1)


@pytest.mark.parametrize("n, coefficients, gcd, p", [
    (2, [-2], 2, 2),
    (4, [-4, 6, -4], 2, 2),
    (6, [-6, 15, -20, 15, -6], 1, None),
    (9, [-9, 36, -84, 126, -126, 84, -36, 9], 3, 3),
])
def test_obstruction_known_values(n, coefficients, gcd, p):
    report = obstruction(n)
    assert report.coefficients == coefficients
    assert report.gcd == gcd
    assert report.p == p
    assert report.is_prime_power == (p is not None)


def test_obstruction_matches_factorization():
    for n in range(2, 65):
        factors = factorint(n)
        for twisted in (True, False):
            report = obstruction(n, twisted)
            if len(factors) == 1:
                assert report.is_prime_power
                assert report.gcd == next(iter(factors))
            else:
                assert not report.is_prime_power
                assert report.gcd == 1


def test_obstruction_rejects_small_n():
    with pytest.raises(ValueError):
        obstruction(1)


def test_obstruction_table():
    table = obstruction_table(10)
    assert [report.n for report in table] == list(range(2, 11))
    assert [report.gcd for report in table] == [2, 3, 2, 5, 1, 7, 2, 3, 1]
    assert table[4].to_row() == [6, 1, False, ""]
    with pytest.raises(EnumerationBoundsError):
        obstruction_table(1)
    with pytest.raises(EnumerationBoundsError):
        obstruction_table(513)
