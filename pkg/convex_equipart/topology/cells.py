"""
Tree Cells of Configuration Space

The one-point compactification of the space of n distinct labeled points in
R^d has a cell structure indexed by ordered trees of height d with n leaves,
all on the bottom level. A configuration lands in the cell of the tree
obtained by grouping its points by first coordinate, ordering the groups,
then grouping each group by the second coordinate, and so on. The cell of a
tree T has dimension |T| - 1, where |T| counts vertices.

Trees are stored as nested tuples: a vertex is the tuple of its children
and a leaf is the empty tuple.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from convex_equipart.errors import EnumerationBoundsError, GeometryError

MAX_POINTS = 8
MAX_DIMENSION = 3
# Largest number of labeled trees enumerate_trees will materialize.
MAX_LABELED_CELLS = 200_000

Shape = Tuple


def _check_bounds(n: int, d: int) -> None:
    if not (1 <= n <= MAX_POINTS and 1 <= d <= MAX_DIMENSION):
        raise EnumerationBoundsError(
            f"tree enumeration needs 1 <= n <= {MAX_POINTS} and 1 <= d <= {MAX_DIMENSION}, got n={n}, d={d}")


def _leaf_count(shape: Shape) -> int:
    if not shape:
        return 1
    return sum(_leaf_count(child) for child in shape)


def _vertex_count(shape: Shape) -> int:
    return 1 + sum(_vertex_count(child) for child in shape)


def _height(shape: Shape) -> Optional[int]:
    """Common depth of all leaves, or None if leaves sit on different levels."""
    if not shape:
        return 0
    heights = {_height(child) for child in shape}
    if len(heights) != 1 or None in heights:
        return None
    return heights.pop() + 1


@dataclass(frozen=True)
class LabeledTree:
    """
    An ordered tree of height d whose n leaves all sit on the bottom level.

    Attributes:
        shape: Nested tuple of children
        d: Height (the ambient dimension)
        labels: Leaf labels left to right, a permutation of 1..n; None for
            the unlabeled tree
    """
    shape: Shape
    d: int
    labels: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if _height(self.shape) != self.d:
            raise ValueError(f"tree {self.shape!r} does not have all leaves at depth {self.d}")
        if self.labels is not None and sorted(self.labels) != list(range(1, self.n + 1)):
            raise ValueError(f"labels {self.labels!r} are not a permutation of 1..{self.n}")

    @property
    def n(self) -> int:
        return _leaf_count(self.shape)

    @property
    def vertex_count(self) -> int:
        return _vertex_count(self.shape)

    @property
    def dimension(self) -> int:
        return self.vertex_count - 1

    def unlabeled(self) -> "LabeledTree":
        return LabeledTree(self.shape, self.d)

    def level_sizes(self) -> List[int]:
        """Number of vertices on each level, root level first."""
        sizes = []
        level = [self.shape]
        while level:
            sizes.append(len(level))
            level = [child for vertex in level for child in vertex]
        return sizes

    @classmethod
    def from_configuration(cls, points) -> "LabeledTree":
        """
        The cell containing a configuration of distinct points (one row per
        point, labels are 1-based row numbers).

        Raises:
            GeometryError: two points coincide
        """
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or len(pts) == 0:
            raise GeometryError("a configuration is a nonempty (n, d) array of points")
        d = pts.shape[1]

        def group(indices: List[int], axis: int) -> Tuple[Shape, List[int]]:
            if axis == d:
                if len(indices) != 1:
                    raise GeometryError(f"points {[i + 1 for i in indices]} coincide")
                return (), [indices[0] + 1]
            values = sorted({float(pts[i, axis]) for i in indices})
            children, labels = [], []
            for value in values:
                child, child_labels = group([i for i in indices if pts[i, axis] == value], axis + 1)
                children.append(child)
                labels.extend(child_labels)
            return tuple(children), labels

        shape, labels = group(list(range(len(pts))), 0)
        return cls(shape, d, tuple(labels))

    def to_dict(self) -> Dict:
        return {
            "dimension": self.dimension,
            "level_sizes": self.level_sizes(),
            "labels": list(self.labels) if self.labels is not None else None,
        }


def compositions(n: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways of writing n as a sum of positive integers."""
    for k in range(n):
        for cuts in combinations(range(1, n), k):
            bounds = (0,) + cuts + (n,)
            yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


@lru_cache(maxsize=None)
def _shapes(leaves: int, depth: int) -> Tuple[Shape, ...]:
    """All tree shapes with the given number of leaves at the given depth."""
    if depth == 0:
        return ((),) if leaves == 1 else ()
    found = []
    for parts in compositions(leaves):
        for children in product(*(_shapes(part, depth - 1) for part in parts)):
            found.append(tuple(children))
    return tuple(found)


def _by_dimension(trees: Sequence[LabeledTree]) -> Dict[int, List[LabeledTree]]:
    grouped: Dict[int, List[LabeledTree]] = {}
    for tree in trees:
        grouped.setdefault(tree.dimension, []).append(tree)
    return dict(sorted(grouped.items()))


def enumerate_trees(n: int, d: int, labeled: bool = False,
                    max_cells: int = MAX_LABELED_CELLS) -> Dict[int, List[LabeledTree]]:
    """
    All cells of the decomposition, grouped by dimension.

    Every unlabeled tree admits all n! leaf labelings.

    Raises:
        EnumerationBoundsError: (n, d) out of range, or more than max_cells
            labeled trees requested
    """
    _check_bounds(n, d)
    shapes = _shapes(n, d)
    if not labeled:
        return _by_dimension([LabeledTree(shape, d) for shape in shapes])
    total = len(shapes) * math.factorial(n)
    if total > max_cells:
        raise EnumerationBoundsError(
            f"{total} labeled cells for n={n}, d={d} exceed the limit of {max_cells}; use count_trees")
    labelings = list(permutations(range(1, n + 1)))
    return _by_dimension([LabeledTree(shape, d, labels) for shape in shapes for labels in labelings])


def count_trees(n: int, d: int) -> Dict[int, Tuple[int, int]]:
    """{dimension: (unlabeled count, labeled count)} without materializing labelings."""
    _check_bounds(n, d)
    counts: Dict[int, int] = {}
    for shape in _shapes(n, d):
        dim = _vertex_count(shape) - 1
        counts[dim] = counts.get(dim, 0) + 1
    factorial = math.factorial(n)
    return {dim: (count, count * factorial) for dim, count in sorted(counts.items())}


def chain_ranks(n: int, d: int, labeled: bool = False) -> Dict[int, int]:
    """Ranks of the cellular chain groups, including the 0-cell at infinity."""
    ranks = {0: 1}
    for dim, (unlabeled, labeled_count) in count_trees(n, d).items():
        ranks[dim] = ranks.get(dim, 0) + (labeled_count if labeled else unlabeled)
    return dict(sorted(ranks.items()))


def euler_characteristic(n: int, d: int, labeled: bool = False) -> int:
    return sum((-1) ** dim * rank for dim, rank in chain_ranks(n, d, labeled).items())
