#!/usr/bin/env python3
"""
Tests for truncated power diagrams and radii reconstruction
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from convex_equipart.core.power_diagram import (
    WeightedConfiguration,
    bisector,
    build,
    power_value,
    reconstruct_radii,
    vanishing_cells,
)
from convex_equipart.errors import GeometryError, ReconstructionError
from convex_equipart.geometry.polygon import ConvexPolygon, hausdorff_distance, intersect

UNIT_SQUARE = ConvexPolygon.box(0.0, 0.0, 1.0, 1.0)
TWO_SITES = [(0.25, 0.5), (0.75, 0.5)]
QUADRANT_SITES = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
# Largest Hausdorff displacement of a cell per unit change of the configuration
# seen over the seeded configurations below.
CELL_CONTINUITY = 20.7


def random_config(rng, n, body=UNIT_SQUARE, radius_scale=0.02):
    """Random sites in the body with small radii; retries until every cell is nonempty."""
    while True:
        xmin, ymin, xmax, ymax = body.bounding_box
        sites = rng.uniform((xmin, ymin), (xmax, ymax), size=(4 * n, 2))
        sites = sites[body.contains(sites)][:n]
        if len(sites) < n:
            continue
        config = WeightedConfiguration(sites, rng.normal(scale=radius_scale, size=n)).normalized()
        partition = build(config, body)
        if not partition.empty_cells:
            return config, partition


@pytest.mark.parametrize("x, site, radius, expected", [
    ((0, 0), (0, 0), 0.0, 0.0),
    ((3, 4), (0, 0), 5.0, 20.0),
    ((1, 1), (1, 0), -1.0, 2.0),
])
def test_power_value(x, site, radius, expected):
    assert power_value(x, site, radius) == pytest.approx(expected)


@pytest.mark.parametrize("r_i, r_j, boundary", [
    (0.0, 0.0, 1.0),
    (1.0, 0.0, 1.25),
    (3.0, 1.0, 1.5),
])
def test_bisector_known_values(r_i, r_j, boundary):
    h = bisector((0, 0), (2, 0), r_i, r_j)
    assert_allclose(h.normal, (1.0, 0.0))
    assert h.offset == pytest.approx(boundary)


def test_bisector_rejects_coincident_sites():
    with pytest.raises(GeometryError):
        bisector((1, 1), (1, 1), 0.0, 0.0)


def test_bisector_offset_conformance():
    rng = np.random.default_rng(1)
    for _ in range(100):
        x_i, x_j = rng.normal(size=2), rng.normal(size=2)
        r_i, r_j = rng.normal(size=2)
        h = bisector(x_i, x_j, r_i, r_j)
        d = float(np.linalg.norm(x_j - x_i))
        expected = (d * d - r_j + r_i) / (2 * d)
        # where the boundary line crosses the ray from x_i towards x_j
        crossing = (h.offset - float(np.dot(h.normal, x_i))) / float(np.dot(h.normal, (x_j - x_i) / d))
        assert abs(crossing - expected) <= 1e-12 * max(1.0, abs(expected))
        point = x_i + crossing * (x_j - x_i) / d
        assert power_value(point, x_i, r_i) == pytest.approx(power_value(point, x_j, r_j), abs=1e-10)


def test_build_symmetric_split():
    partition = build(WeightedConfiguration(TWO_SITES, [0.0, 0.0]), UNIT_SQUARE)
    assert hausdorff_distance(partition.cells[0], ConvexPolygon.box(0, 0, 0.5, 1)) < 1e-12
    assert hausdorff_distance(partition.cells[1], ConvexPolygon.box(0.5, 0, 1, 1)) < 1e-12
    assert partition.adjacency == {(0, 1)}


def test_build_weighted_split():
    partition = build(WeightedConfiguration(TWO_SITES, [-0.25, 0.0]), UNIT_SQUARE)
    assert_allclose(partition.areas, [0.25, 0.75], atol=1e-12)


def test_build_rejects_coincident_sites():
    with pytest.raises(GeometryError):
        build(WeightedConfiguration([(0.5, 0.5), (0.5, 0.5)], [0.0, 0.0]), UNIT_SQUARE)


def test_shift_invariance():
    rng = np.random.default_rng(2)
    for _ in range(20):
        config, partition = random_config(rng, int(rng.integers(2, 12)))
        shifted = build(config.shifted(float(rng.normal(scale=10.0))), UNIT_SQUARE)
        for a, b in zip(partition.cells, shifted.cells):
            assert len(a) == len(b)
            assert_allclose(a.vertices, b.vertices, atol=1e-12)


def test_partition_property():
    rng = np.random.default_rng(4)
    body = ConvexPolygon.regular(7, 1.0)
    for _ in range(10):
        config, partition = random_config(rng, int(rng.integers(2, 16)), body)
        assert abs(partition.areas.sum() - body.area) <= 1e-9 * body.area
        for i in range(partition.n):
            for j in range(i + 1, partition.n):
                assert intersect(partition.cells[i], partition.cells[j]).area < 1e-10 * body.area


def test_permutation_equivariance():
    rng = np.random.default_rng(6)
    config, partition = random_config(rng, 6)
    order = rng.permutation(6)
    permuted = build(config.permuted(order), UNIT_SQUARE)
    for new_index, old_index in enumerate(order):
        assert hausdorff_distance(permuted.cells[new_index], partition.cells[old_index]) < 1e-12


def test_reconstruct_known_values():
    partition = build(WeightedConfiguration(TWO_SITES, [-0.25, 0.0]), UNIT_SQUARE)
    assert_allclose(reconstruct_radii(partition), [-0.25, 0.0], atol=1e-10)

    voronoi = build(WeightedConfiguration.voronoi(QUADRANT_SITES), UNIT_SQUARE)
    assert_allclose(reconstruct_radii(voronoi), np.zeros(4), atol=1e-10)

    sites = [(0.2, 0.3), (0.7, 0.4), (0.5, 0.8)]
    shifted = build(WeightedConfiguration(sites, [5.0, 5.5, 4.5]), UNIT_SQUARE)
    assert_allclose(reconstruct_radii(shifted, sites), [0.5, 1.0, 0.0], atol=1e-10)


def test_reconstruct_roundtrip():
    rng = np.random.default_rng(8)
    for _ in range(50):
        config, partition = random_config(rng, int(rng.integers(2, 20)))
        assert_allclose(reconstruct_radii(partition), config.radii, atol=1e-10)


def test_reconstruct_rejects_empty_cells():
    partition = build(WeightedConfiguration(TWO_SITES, [-1.0, 0.0]), UNIT_SQUARE)
    assert partition.empty_cells == [0]
    with pytest.raises(ReconstructionError):
        reconstruct_radii(partition)


def test_vanishing_cells():
    # at r_0 = -0.5 the bisector sits exactly on the left edge of the square
    assert vanishing_cells(WeightedConfiguration(TWO_SITES, [-0.5, 0.0]), UNIT_SQUARE) == [0]
    assert vanishing_cells(WeightedConfiguration(TWO_SITES, [-1.0, 0.0]), UNIT_SQUARE) == []
    assert vanishing_cells(WeightedConfiguration(TWO_SITES, [0.0, 0.0]), UNIT_SQUARE) == []


def test_cells_depend_continuously_on_configuration():
    rng = np.random.default_rng(10)
    delta = 1e-6
    worst = 0.0
    for _ in range(10):
        config, partition = random_config(rng, int(rng.integers(2, 10)))
        if partition.areas.min() < 0.01 * UNIT_SQUARE.area:
            continue
        moved = WeightedConfiguration(
            config.sites + delta * rng.uniform(-1, 1, config.sites.shape),
            config.radii + delta * rng.uniform(-1, 1, config.n))
        perturbed = build(moved, UNIT_SQUARE)
        for a, b in zip(partition.cells, perturbed.cells):
            worst = max(worst, hausdorff_distance(a, b) / delta)
    assert worst <= 2 * CELL_CONTINUITY


def test_configuration_helpers():
    config = WeightedConfiguration(TWO_SITES, [1.0, 3.0])
    assert_allclose(config.normalized().radii, [-2.0, 0.0])
    assert_allclose(config.permuted([1, 0]).sites, [TWO_SITES[1], TWO_SITES[0]])
    assert config.min_separation == pytest.approx(0.5)
    with pytest.raises(ValueError):
        config.permuted([0, 0])
    assert math.isinf(WeightedConfiguration([(0, 0)], [0]).min_separation)
