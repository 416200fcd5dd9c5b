"""
Convex Equipartition Search

Searches site configurations whose equal-mass power partition also
equalizes a cell functional. For sites x the transport solver supplies the
radii r(x) with mu(C_i) = mu(K)/n; the search then drives the functional
residual of the cells C(x, r(x)) to zero with multi-start Nelder-Mead over
the 2n site coordinates, followed by a finite-difference least-squares
polish. Composite n is handled by recursing over its prime-power factors.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.spatial.distance import pdist
from sympy import factorint

from convex_equipart.core.density import DensityField
from convex_equipart.core.functionals import CellFunctional, MeasureMass
from convex_equipart.core.power_diagram import PowerPartition, WeightedConfiguration, build
from convex_equipart.core.transport import MassTargets, TransportSolver, cell_masses
from convex_equipart.errors import GeometryError, RecursionStageError, SolverError
from convex_equipart.geometry.polygon import ConvexPolygon
from convex_equipart.utils.logger import enable_verbose

logger = logging.getLogger(__name__)

# Trial sites closer than this fraction of diam(K) are rejected.
COLLISION_RTOL = 1e-6
# Residual returned to least_squares for rejected trial sites.
_REJECTED_RESIDUAL = 1e3

FunctionalsLike = Union[CellFunctional, Sequence[CellFunctional]]


@dataclass
class SearchOptions:
    """
    Knobs of the equipartition search.

    Attributes:
        starts: Number of multi-starts
        spread_tol: Convergence threshold on the normalized spread
        mass_tol: Transport tolerance relative to mu(K) (density default when None)
        seed: Base seed; start k draws from the stream (seed, k)
        jobs: Worker processes for the multi-starts
        lloyd_iterations: Voronoi Lloyd relaxations of each random start
        strip_starts: Make every odd start a row of sites across the body
        max_evaluations: Objective evaluations per Nelder-Mead run (400 n when None)
        polish: Run the least-squares polish after Nelder-Mead
    """
    starts: int = 8
    spread_tol: float = 1e-5
    mass_tol: Optional[float] = None
    seed: int = 0
    jobs: int = 1
    lloyd_iterations: int = 3
    strip_starts: bool = True
    max_evaluations: Optional[int] = None
    polish: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "starts": self.starts,
            "spread_tol": self.spread_tol,
            "mass_tol": self.mass_tol,
            "seed": self.seed,
            "lloyd_iterations": self.lloyd_iterations,
            "strip_starts": self.strip_starts,
            "max_evaluations": self.max_evaluations,
            "polish": self.polish,
        }


@dataclass(eq=False)
class EquipartitionResult:
    """
    Best partition found by a search.

    Attributes:
        config: Sites and equal-mass radii
        partition: Truncated power diagram of config
        masses: Cell masses under the transported density
        functional_values: (n, #functionals) matrix of cell values
        spread: Largest normalized spread over the functionals
        iterations: Objective evaluations spent
        converged: Whether spread <= spread_tol
        functionals: The functionals, in column order
        start: Index of the multi-start that produced the result
    """
    config: WeightedConfiguration
    partition: PowerPartition
    masses: np.ndarray
    functional_values: np.ndarray
    spread: float
    iterations: int
    converged: bool
    functionals: List[CellFunctional] = field(default_factory=list)
    start: int = 0

    @property
    def cells(self) -> Tuple[ConvexPolygon, ...]:
        return self.partition.cells

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sites": self.config.sites.tolist(),
            "radii": self.config.radii.tolist(),
            "cells": [cell.to_list() for cell in self.partition.cells],
            "masses": self.masses.tolist(),
            "functionals": [f.to_dict() for f in self.functionals],
            "functional_values": self.functional_values.tolist(),
            "spread": self.spread,
            "iterations": self.iterations,
            "converged": self.converged,
            "start": self.start,
        }


class _Converged(Exception):
    """Raised from inside an optimizer once the spread target is met."""

    def __init__(self, z: np.ndarray):
        super().__init__()
        self.z = z


def _as_list(functionals: FunctionalsLike) -> List[CellFunctional]:
    if isinstance(functionals, CellFunctional):
        return [functionals]
    functionals = list(functionals)
    if not functionals:
        raise ValueError("at least one functional is required")
    return functionals


class _Objective:
    """
    The map sites -> equal-mass partition -> normalized functional residuals
    for one start, with the last radii cached as the next warm start.
    """

    def __init__(self, body: ConvexPolygon, density: DensityField, n: int,
                 functionals: List[CellFunctional], options: SearchOptions):
        self.body = body
        self.density = density
        self.n = n
        self.functionals = functionals
        self.options = options
        self.solver = TransportSolver(tol=options.mass_tol)
        self.targets = MassTargets.equal(n, density.total_mass(body))
        self.min_separation = COLLISION_RTOL * body.diameter
        self.outside_tol = 1e-12 * body.scale
        self.warm_radii: Optional[np.ndarray] = None
        self.evaluations = 0
        self.best: Optional[Tuple[float, np.ndarray]] = None

    def admissible(self, sites: np.ndarray) -> bool:
        if self.n >= 2 and float(np.min(pdist(sites))) < self.min_separation:
            return False
        return bool(np.all(self.body.contains(sites, tol=self.outside_tol)))

    def evaluate(self, z: np.ndarray) -> Optional[Tuple[Any, np.ndarray, float]]:
        """(transport result, residual vector, spread), or None for a rejected point."""
        sites = np.asarray(z, dtype=float).reshape(self.n, 2)
        self.evaluations += 1
        if not self.admissible(sites):
            return None
        try:
            transport = self.solver.solve(sites, self.density, self.body, self.targets,
                                          initial_radii=self.warm_radii)
        except (SolverError, GeometryError) as e:
            logger.debug(f"rejected trial sites: {e}")
            return None
        self.warm_radii = np.array(transport.config.radii)
        cells = transport.partition.cells
        residuals = []
        spread = 0.0
        for functional in self.functionals:
            values = functional.values(cells)
            spread = max(spread, functional.spread(values, self.body))
            residuals.append(functional.residual(values, self.body) / functional.scale(values, self.body))
        vector = np.concatenate(residuals)
        if not np.all(np.isfinite(vector)):
            return None
        score = float(vector @ vector)
        if self.best is None or score < self.best[0]:
            self.best = (score, np.array(z, dtype=float))
        if spread <= self.options.spread_tol:
            raise _Converged(np.array(z, dtype=float))
        return transport, vector, spread

    def scalar(self, z: np.ndarray) -> float:
        outcome = self.evaluate(z)
        return math.inf if outcome is None else float(outcome[1] @ outcome[1])

    def vector(self, z: np.ndarray) -> np.ndarray:
        outcome = self.evaluate(z)
        if outcome is None:
            return np.full(self.n * len(self.functionals), _REJECTED_RESIDUAL)
        return outcome[1]


def sample_sites(body: ConvexPolygon, n: int, rng: np.random.Generator) -> np.ndarray:
    """n uniform random points of the body (rejection sampling in its bounding box)."""
    xmin, ymin, xmax, ymax = body.bounding_box
    found = np.zeros((0, 2))
    while len(found) < n:
        batch = rng.uniform((xmin, ymin), (xmax, ymax), size=(4 * n, 2))
        found = np.vstack([found, batch[body.contains(batch)]])
    return found[:n]


def lloyd_relax(body: ConvexPolygon, sites: np.ndarray, iterations: int) -> np.ndarray:
    """Move each site to the centroid of its Voronoi cell, repeatedly."""
    for _ in range(iterations):
        partition = build(WeightedConfiguration.voronoi(sites), body)
        sites = np.array([cell.centroid if not cell.is_empty else site
                          for cell, site in zip(partition.cells, sites)])
    return sites


def strip_sites(body: ConvexPolygon, n: int, angle: float) -> np.ndarray:
    """
    n sites evenly spaced along the chord through the centroid in direction
    (cos angle, sin angle). With equal radii their cells are parallel strips
    crossing that chord.
    """
    u = np.array([math.cos(angle), math.sin(angle)])
    g = np.asarray(body.centroid)
    t_lo, t_hi = -math.inf, math.inf
    for plane in body.edge_halfplanes():
        a = float(np.dot(plane.normal, u))
        b = plane.offset - float(np.dot(plane.normal, g))
        if a > 1e-15:
            t_hi = min(t_hi, b / a)
        elif a < -1e-15:
            t_lo = max(t_lo, b / a)
    t = t_lo + (np.arange(n) + 0.5) / n * (t_hi - t_lo)
    return g[None, :] + t[:, None] * u[None, :]


def _initial_sites(body: ConvexPolygon, n: int, options: SearchOptions, start: int) -> np.ndarray:
    if options.strip_starts and start % 2 == 1:
        # the strip directions sweep half a turn, starting with horizontal strips
        sweeps = max(1, math.ceil(options.starts / 2))
        return strip_sites(body, n, math.pi / 2 + (start // 2) * math.pi / sweeps)
    rng = np.random.default_rng([options.seed, start])
    return lloyd_relax(body, sample_sites(body, n, rng), options.lloyd_iterations)


def _run_start(body: ConvexPolygon, density: DensityField, n: int, functionals: List[CellFunctional],
               options: SearchOptions, start: int) -> Tuple[np.ndarray, bool, int]:
    """One multi-start: returns (best sites, converged, evaluations)."""
    objective = _Objective(body, density, n, functionals, options)
    z0 = _initial_sites(body, n, options, start).ravel()
    step = 0.05 * body.diameter
    simplex = np.vstack([z0, z0 + step * np.eye(len(z0))])
    max_evaluations = options.max_evaluations or 400 * n

    try:
        minimize(objective.scalar, z0, method="Nelder-Mead",
                 options={"initial_simplex": simplex, "maxfev": max_evaluations,
                          "xatol": 1e-12 * body.diameter, "fatol": 0.0, "adaptive": True})
        if options.polish and objective.best is not None:
            least_squares(objective.vector, objective.best[1], method="trf",
                          x_scale=body.diameter, diff_step=1e-6, max_nfev=max_evaluations,
                          xtol=1e-15, ftol=1e-15, gtol=1e-15)
    except _Converged as done:
        return done.z, True, objective.evaluations

    if objective.best is None:
        return z0, False, objective.evaluations
    return objective.best[1], False, objective.evaluations


def _assemble(body: ConvexPolygon, density: DensityField, n: int, functionals: List[CellFunctional],
              options: SearchOptions, z: np.ndarray, evaluations: int, start: int) -> EquipartitionResult:
    solver = TransportSolver(tol=options.mass_tol)
    targets = MassTargets.equal(n, density.total_mass(body))
    transport = solver.solve(z.reshape(n, 2), density, body, targets)
    cells = transport.partition.cells
    columns = [f.values(cells) for f in functionals]
    spread = max(f.spread(v, body) for f, v in zip(functionals, columns))
    return EquipartitionResult(
        config=transport.config,
        partition=transport.partition,
        masses=transport.masses,
        functional_values=np.column_stack(columns),
        spread=spread,
        iterations=evaluations,
        converged=bool(spread <= options.spread_tol),
        functionals=functionals,
        start=start,
    )


def _single_cell(body: ConvexPolygon, density: DensityField,
                 functionals: List[CellFunctional]) -> EquipartitionResult:
    site = np.array([body.centroid])
    partition = build(WeightedConfiguration(site, [0.0]), body)
    columns = [f.values(partition.cells) for f in functionals]
    return EquipartitionResult(
        config=partition.config,
        partition=partition,
        masses=cell_masses(partition, density),
        functional_values=np.column_stack(columns),
        spread=0.0,
        iterations=0,
        converged=True,
        functionals=functionals,
    )


def residual(sites, body: ConvexPolygon, density: DensityField, functional: CellFunctional,
             tol: Optional[float] = None) -> np.ndarray:
    """
    Functional values of the equal-mass partition of the given sites, minus
    their mean (or minus the functional's absolute target).

    Raises:
        GeometryError, SolverError: from the transport solve
    """
    pts = np.asarray(sites, dtype=float).reshape(-1, 2)
    targets = MassTargets.equal(len(pts), density.total_mass(body))
    transport = TransportSolver(tol=tol).solve(pts, density, body, targets)
    values = functional.values(transport.partition.cells)
    return functional.residual(values, body)


class EquipartitionSearch:
    """
    Multi-start search for an equal-mass partition equalizing functionals.

    Args:
        options: Search options (defaults when None)
        verbose: Log per-start progress
    """

    def __init__(self, options: Optional[SearchOptions] = None, verbose: bool = False):
        self.options = options or SearchOptions()
        if verbose:
            enable_verbose()
        self.logger = logger

    def run(self, body: ConvexPolygon, density: DensityField, n: int,
            functionals: FunctionalsLike) -> EquipartitionResult:
        functionals = _as_list(functionals)
        if n < 1:
            raise ValueError(f"number of cells must be positive, got {n}")
        if body.is_empty:
            raise GeometryError("cannot partition an empty body")
        if n == 1:
            return _single_cell(body, density, functionals)

        opts = self.options
        names = ", ".join(f.name for f in functionals)
        self.logger.info(f"equipartition search: n={n}, functionals=[{names}], starts={opts.starts}")

        if opts.jobs > 1:
            with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
                futures = [pool.submit(_run_start, body, density, n, functionals, opts, k)
                           for k in range(opts.starts)]
                outcomes = [f.result() for f in futures]
        else:
            outcomes = []
            for k in range(opts.starts):
                outcomes.append(_run_start(body, density, n, functionals, opts, k))
                self.logger.debug(f"start {k}: converged={outcomes[-1][1]}, evaluations={outcomes[-1][2]}")
                if outcomes[-1][1]:
                    break

        chosen = next((k for k, o in enumerate(outcomes) if o[1]), None)
        if chosen is not None:
            evaluations = sum(o[2] for o in outcomes[:chosen + 1])
            result = _assemble(body, density, n, functionals, opts, outcomes[chosen][0], evaluations, chosen)
        else:
            evaluations = sum(o[2] for o in outcomes)
            result = None
            for k, (z, _, _) in enumerate(outcomes):
                candidate = _assemble(body, density, n, functionals, opts, z, evaluations, k)
                if result is None or candidate.spread < result.spread:
                    result = candidate

        self.logger.info(f"equipartition search finished: n={n}, spread={result.spread:.3e}, "
                         f"converged={result.converged}, evaluations={result.iterations}")
        return result


def search(body: ConvexPolygon, density: DensityField, n: int, functionals: FunctionalsLike,
           opts: Optional[SearchOptions] = None) -> EquipartitionResult:
    """Best-effort equipartition of the body into n cells (see EquipartitionSearch)."""
    return EquipartitionSearch(opts).run(body, density, n, functionals)


def multi_measure_partition(measures: Sequence[DensityField], body: ConvexPolygon, n: int,
                            opts: Optional[SearchOptions] = None) -> EquipartitionResult:
    """
    Convex partition giving every cell 1/n of each of two measures.

    The first measure is transported; the second enters as a MeasureMass
    functional with absolute target 1/n.
    """
    if len(measures) != 2:
        raise ValueError(f"expected two measures in the plane, got {len(measures)}")
    normalized = []
    for k, measure in enumerate(measures):
        total = measure.total_mass(body)
        if abs(total - 1.0) > 1e-12:
            logger.warning(f"measure {k} has mass {total:.6g} on the body, renormalizing to 1")
            measure = measure.normalized(body)
        normalized.append(measure)
    return search(body, normalized[0], n, [MeasureMass(normalized[1])], opts)


def prime_power_factors(n: int) -> List[int]:
    """The prime-power factors p^a of n in increasing order of p."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    return [p ** a for p, a in sorted(factorint(n).items())]


@dataclass(eq=False)
class PartitionNode:
    """
    A cell of a recursive factorization.

    Attributes:
        body: The cell
        path: Child indices from the root
        density: The measure restricted to the cell
        result: The partition of this cell, None for a leaf
        children: Subdivisions of the result's cells
    """
    body: ConvexPolygon
    path: Tuple[int, ...]
    density: DensityField
    result: Optional[EquipartitionResult] = None
    children: List["PartitionNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.result is None

    @property
    def converged(self) -> bool:
        if self.is_leaf:
            return True
        return self.result.converged and all(child.converged for child in self.children)

    def leaves(self) -> Iterator["PartitionNode"]:
        if self.is_leaf:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def to_dict(self) -> Dict[str, Any]:
        record = {"path": list(self.path), "body": self.body.to_list()}
        if self.result is not None:
            record["result"] = self.result.to_dict()
            record["children"] = [child.to_dict() for child in self.children]
        return record


def factor_recursive(body: ConvexPolygon, density: DensityField, n: int, functionals: FunctionalsLike,
                     opts: Optional[SearchOptions] = None) -> PartitionNode:
    """
    Partition the body into n cells one prime-power stage at a time.

    Each stage partitions a cell into p^a parts; each part is then
    partitioned by the next stage with the measures restricted to it.

    Raises:
        RecursionStageError: a transport solve failed; carries the cell path
    """
    stages = prime_power_factors(n)
    search_engine = EquipartitionSearch(opts)
    logger.info(f"recursive equipartition: n={n}, stages={stages}")
    return _subdivide(search_engine, body, density, _as_list(functionals), stages, ())


def _subdivide(engine: EquipartitionSearch, body: ConvexPolygon, density: DensityField,
               functionals: List[CellFunctional], stages: List[int], path: Tuple[int, ...]) -> PartitionNode:
    node = PartitionNode(body=body, path=path, density=density)
    if not stages:
        return node
    try:
        node.result = engine.run(body, density, stages[0], functionals)
    except SolverError as e:
        raise RecursionStageError(path, e) from e
    for i, cell in enumerate(node.result.cells):
        node.children.append(_subdivide(
            engine, cell, density.restricted(cell),
            [f.restricted(cell) for f in functionals], stages[1:], path + (i,)))
    return node
