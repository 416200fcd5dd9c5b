#!/usr/bin/env python3
"""
Tests for functionals, the equipartition search, ham-sandwich partitions
and recursive factorization
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from convex_equipart.core.density import GridDensity, UniformDensity
from convex_equipart.core.equipartition import (
    SearchOptions,
    factor_recursive,
    lloyd_relax,
    multi_measure_partition,
    prime_power_factors,
    residual,
    sample_sites,
    search,
    strip_sites,
)
from convex_equipart.core.functionals import (
    CentroidMap,
    Diameter,
    MeasureMass,
    MinkowskiGauge,
    Perimeter,
    Width,
    make_functional,
)
from convex_equipart.errors import GeometryError
from convex_equipart.core.transport import MassTargets, TransportSolver
from convex_equipart.geometry.polygon import ConvexPolygon, hausdorff_distance

UNIT_SQUARE = ConvexPolygon.box(0.0, 0.0, 1.0, 1.0)
RIGHT_TRIANGLE = ConvexPolygon([(0, 0), (1, 0), (0, 1)])
UNIFORM = UniformDensity(UNIT_SQUARE)
FAST = SearchOptions(starts=4, seed=0)


def left_loaded():
    """Density 3 on the left half of the unit square and 1 on the right half, total 1."""
    return GridDensity((0.0, 0.0), 0.5, [[1.5, 0.5], [1.5, 0.5]])


def assert_equal_masses(result, total, n, rtol=1e-6):
    assert_allclose(result.masses, np.full(n, total / n), atol=rtol * total)


def test_functional_values():
    half = ConvexPolygon.box(0, 0, 0.5, 1)
    assert Perimeter().evaluate(half) == pytest.approx(3.0)
    assert Diameter().evaluate(half) == pytest.approx(math.sqrt(1.25))
    assert Width().evaluate(half) == pytest.approx(0.5)
    assert make_functional("centroid-x").evaluate(half) == pytest.approx(0.25)
    assert make_functional("centroid-y").evaluate(half) == pytest.approx(0.5)
    assert make_functional("centroid-x", centermap="bbox-center").evaluate(RIGHT_TRIANGLE) == pytest.approx(0.5)
    assert make_functional("centroid-x").evaluate(RIGHT_TRIANGLE) == pytest.approx(1.0 / 3.0)
    with pytest.raises(ValueError):
        make_functional("area")
    with pytest.raises(ValueError):
        CentroidMap(lambda p: p[0], centermap="incenter")


@pytest.mark.parametrize("cell, gauge", [
    (UNIT_SQUARE, 0.0),
    (ConvexPolygon.box(0, 0, 0.5, 1), 0.5),
    (ConvexPolygon.box(0, 0, 0.5, 0.5), 0.5),
    (ConvexPolygon.box(0.75, 0.75, 1, 1), 0.75),
])
def test_minkowski_gauge_known_values(cell, gauge):
    assert MinkowskiGauge(UNIT_SQUARE).evaluate(cell) == pytest.approx(gauge)


def test_minkowski_gauge_in_other_bodies():
    # centroid (0.1, 0.1) against g = (1/3, 1/3) and the two legs at distance 1/3
    corner = ConvexPolygon.box(0, 0, 0.2, 0.2)
    assert make_functional("minkowski", body=RIGHT_TRIANGLE).evaluate(corner) == pytest.approx(0.7)
    half = ConvexPolygon.box(0, 0, 0.5, 1)
    inner = MinkowskiGauge(UNIT_SQUARE).restricted(half)
    assert inner.evaluate(ConvexPolygon.box(0, 0, 0.25, 1)) == pytest.approx(0.5)
    assert inner.spread(np.array([0.25, 0.5]), half) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        make_functional("minkowski")


def test_functional_spread():
    perimeter = Perimeter()
    values = np.array([3.0, 3.0, 3.3])
    assert perimeter.spread(values, UNIT_SQUARE) == pytest.approx(0.3 / 3.1)
    assert perimeter.spread(np.array([3.0, np.nan]), UNIT_SQUARE) == math.inf
    assert_allclose(perimeter.residual(values, UNIT_SQUARE), [-0.1, -0.1, 0.2])

    second = MeasureMass(left_loaded())
    assert second.target(UNIT_SQUARE, 2) == pytest.approx(0.5)
    assert second.spread(np.array([0.75, 0.25]), UNIT_SQUARE) == pytest.approx(0.25)

    centroid_x = make_functional("centroid-x")
    assert centroid_x.spread(np.array([-0.1, 0.1]), UNIT_SQUARE) == pytest.approx(0.2 / math.sqrt(2.0))


@pytest.mark.parametrize("sites", [
    [(0.25, 0.5), (0.75, 0.5)],
    [(0.25, 0.25), (0.75, 0.75)],
    [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)],
])
def test_residual_vanishes_on_symmetric_sites(sites):
    assert_allclose(residual(sites, UNIT_SQUARE, UNIFORM, Perimeter()), 0.0, atol=1e-8)


def test_residual_of_unequal_split():
    # equal areas force a vertical cut; sites off the midline do not move it
    values = residual([(0.1, 0.5), (0.6, 0.5)], UNIT_SQUARE, UNIFORM, Perimeter())
    assert_allclose(values, [0.0, 0.0], atol=1e-8)
    # x + y = 1/sqrt(2) halves the right triangle into pieces of perimeter 1 + sqrt(2) and 3
    skew = residual([(0.1, 0.1), (0.4, 0.4)], RIGHT_TRIANGLE, UniformDensity(RIGHT_TRIANGLE), Perimeter())
    gap = 3.0 - (1.0 + math.sqrt(2.0))
    assert_allclose(skew, [-gap / 2, gap / 2], atol=1e-7)


def test_residual_is_permutation_equivariant():
    rng = np.random.default_rng(30)
    sites = sample_sites(UNIT_SQUARE, 5, rng)
    order = rng.permutation(5)
    base = residual(sites, UNIT_SQUARE, UNIFORM, Perimeter())
    permuted = residual(sites[order], UNIT_SQUARE, UNIFORM, Perimeter())
    assert_allclose(permuted, base[order], atol=1e-8)


def test_sampled_sites_lie_in_body():
    rng = np.random.default_rng(31)
    sites = lloyd_relax(RIGHT_TRIANGLE, sample_sites(RIGHT_TRIANGLE, 6, rng), 3)
    assert sites.shape == (6, 2)
    assert np.all(RIGHT_TRIANGLE.contains(sites))


def random_heptagon():
    """Seven jittered points of the unit circle, in angular order."""
    rng = np.random.default_rng(7)
    angles = np.sort(2.0 * np.pi * np.arange(7) / 7 + rng.uniform(-0.3, 0.3, 7))
    return ConvexPolygon(np.column_stack([np.cos(angles), np.sin(angles)]))


HEPTAGON = random_heptagon()


@pytest.mark.parametrize("body, n", [
    (UNIT_SQUARE, 2),
    (UNIT_SQUARE, 4),
    (UNIT_SQUARE, 5),
    (UNIT_SQUARE, 7),
    (UNIT_SQUARE, 8),
    (UNIT_SQUARE, 9),
    (RIGHT_TRIANGLE, 2),
    (RIGHT_TRIANGLE, 3),
    (RIGHT_TRIANGLE, 4),
    (HEPTAGON, 3),
    (HEPTAGON, 5),
])
def test_search_equalizes_perimeter(body, n):
    options = SearchOptions()
    result = search(body, UniformDensity(body), n, Perimeter(), options)
    assert result.converged
    assert result.spread <= options.spread_tol
    assert_equal_masses(result, body.area, n, rtol=1e-8)
    perimeters = result.functional_values[:, 0]
    assert np.ptp(perimeters) <= 2 * options.spread_tol * np.mean(perimeters)
    assert all(not cell.is_empty for cell in result.cells)


def test_right_triangle_perimeter_known_value():
    result = search(RIGHT_TRIANGLE, UniformDensity(RIGHT_TRIANGLE), 3, Perimeter(),
                    SearchOptions(strip_starts=False))
    assert result.converged
    assert np.mean(result.functional_values[:, 0]) == pytest.approx(2.187464357, rel=1e-5)


def test_strip_sites_cut_parallel_strips():
    sites = strip_sites(UNIT_SQUARE, 4, math.pi / 2)
    assert_allclose(sites, [(0.5, 0.125), (0.5, 0.375), (0.5, 0.625), (0.5, 0.875)], atol=1e-12)
    sites = strip_sites(RIGHT_TRIANGLE, 3, 0.0)
    assert np.all(RIGHT_TRIANGLE.contains(sites))
    assert_allclose(sites[:, 1], 1.0 / 3.0)
    assert_allclose(np.diff(sites[:, 0]), 2.0 / 9.0)


def test_search_permutes_with_its_sites():
    result = search(UNIT_SQUARE, UNIFORM, 3, Perimeter(), FAST)
    order = np.array([2, 0, 1])
    moved = TransportSolver().solve(result.config.sites[order], UNIFORM, UNIT_SQUARE, MassTargets.equal(3, 1.0))
    for k, cell in enumerate(moved.partition.cells):
        assert hausdorff_distance(cell, result.cells[order[k]]) <= 1e-7
    assert_allclose(Perimeter().values(moved.partition.cells), result.functional_values[order, 0], atol=1e-7)
    assert_allclose(moved.config.radii - moved.config.radii[0],
                    result.config.radii[order] - result.config.radii[order[0]], atol=1e-7)


def test_search_single_cell():
    result = search(UNIT_SQUARE, UNIFORM, 1, Perimeter())
    assert result.converged
    assert result.spread == 0.0
    assert result.cells[0] == UNIT_SQUARE
    assert_allclose(result.functional_values, [[4.0]])


def test_search_rejects_bad_input():
    with pytest.raises(ValueError):
        search(UNIT_SQUARE, UNIFORM, 0, Perimeter())
    with pytest.raises(GeometryError):
        search(ConvexPolygon.empty(), UNIFORM, 2, Perimeter())


def test_search_reports_convergence_honestly():
    options = SearchOptions(starts=2, seed=3, max_evaluations=200, polish=False)
    result = search(UNIT_SQUARE, UNIFORM, 6, [Perimeter(), Diameter()], options)
    assert result.converged == (result.spread <= options.spread_tol)
    assert_equal_masses(result, 1.0, 6)
    assert result.functional_values.shape == (6, 2)


def test_search_is_deterministic_across_jobs():
    serial = search(UNIT_SQUARE, UNIFORM, 3, Perimeter(), SearchOptions(starts=3, seed=5, jobs=1))
    parallel = search(UNIT_SQUARE, UNIFORM, 3, Perimeter(), SearchOptions(starts=3, seed=5, jobs=2))
    assert serial.start == parallel.start
    assert_allclose(serial.config.sites, parallel.config.sites)
    assert serial.spread == parallel.spread


@pytest.mark.parametrize("n", [2, 3, 4])
def test_hamsandwich_partition(n):
    result = multi_measure_partition([UNIFORM, left_loaded()], UNIT_SQUARE, n, FAST)
    assert result.converged
    assert_equal_masses(result, 1.0, n)
    second = left_loaded()
    assert_allclose([second.mass(cell) for cell in result.cells], np.full(n, 1.0 / n), atol=1e-3)


def test_hamsandwich_renormalizes_measures():
    heavy = GridDensity((0.0, 0.0), 0.5, [[3.0, 1.0], [3.0, 1.0]])
    result = multi_measure_partition([UniformDensity(UNIT_SQUARE, total=4.0), heavy], UNIT_SQUARE, 2, FAST)
    assert result.converged
    assert_allclose(result.masses, [0.5, 0.5], atol=1e-6)


def test_hamsandwich_identical_measures():
    result = multi_measure_partition([UNIFORM, UNIFORM], UNIT_SQUARE, 3, FAST)
    assert result.converged
    assert result.spread <= FAST.spread_tol


def test_hamsandwich_needs_two_measures():
    with pytest.raises(ValueError):
        multi_measure_partition([UNIFORM], UNIT_SQUARE, 2)


@pytest.mark.parametrize("n, factors", [
    (1, []),
    (2, [2]),
    (6, [2, 3]),
    (12, [4, 3]),
    (360, [8, 9, 5]),
])
def test_prime_power_factors(n, factors):
    assert prime_power_factors(n) == factors


def test_factor_recursive_single_stage():
    root = factor_recursive(UNIT_SQUARE, UNIFORM, 4, Perimeter(), FAST)
    assert root.result is not None
    assert len(root.children) == 4
    assert all(child.is_leaf for child in root.children)
    assert root.converged


def test_factor_recursive_two_stages():
    root = factor_recursive(UNIT_SQUARE, left_loaded(), 6, MeasureMass(UNIFORM), FAST)
    leaves = list(root.leaves())
    assert len(leaves) == 6
    assert [leaf.path for leaf in leaves] == [(i, j) for i in range(2) for j in range(3)]
    assert sum(leaf.body.area for leaf in leaves) == pytest.approx(1.0)
    # every leaf carries 1/6 of both measures
    assert_allclose([left_loaded().mass(leaf.body) for leaf in leaves], np.full(6, 1.0 / 6.0), atol=1e-3)
    assert_allclose([leaf.body.area for leaf in leaves], np.full(6, 1.0 / 6.0), atol=1e-3)


def test_factor_recursive_twelve_cells():
    root = factor_recursive(UNIT_SQUARE, left_loaded(), 12, MeasureMass(UNIFORM), SearchOptions(starts=8))
    leaves = list(root.leaves())
    assert [len(leaf.path) for leaf in leaves] == [2] * 12
    assert root.converged
    assert_allclose([left_loaded().mass(leaf.body) for leaf in leaves], np.full(12, 1.0 / 12.0), atol=1e-3)
    assert_allclose([leaf.body.area for leaf in leaves], np.full(12, 1.0 / 12.0), atol=1e-3)


def test_factor_recursive_trivial():
    root = factor_recursive(UNIT_SQUARE, UNIFORM, 1, Perimeter())
    assert root.is_leaf
    assert list(root.leaves()) == [root]
    assert root.to_dict() == {"path": [], "body": UNIT_SQUARE.to_list()}
