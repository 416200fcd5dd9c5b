"""
Semi-Discrete Optimal Transport

Finds the radii for which every cell of the truncated power diagram carries
a prescribed mass of a density on K. The radii maximize the concave
Kantorovich dual

    Phi(r) = sum_i q_i r_i + sum_i integral over C_i(r) of (|x - x_i|^2 - r_i) dmu

whose gradient is q - mu(C(r)) and whose negated Hessian is the weighted
Laplacian of the cell adjacency graph, with weight
mu-length(shared edge) / (2 |x_i - x_j|). The solver takes damped Newton
steps on Phi.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, lstsq

from convex_equipart.core.density import DensityField
from convex_equipart.core.power_diagram import PowerPartition, WeightedConfiguration, build
from convex_equipart.errors import SolverError, TargetError
from convex_equipart.geometry.polygon import ConvexPolygon, PointLike
from convex_equipart.utils.logger import enable_verbose

logger = logging.getLogger(__name__)

# Relative tolerance on the sum of the targets against mu(K).
TARGET_SUM_RTOL = 1e-9
DEFAULT_MAX_ITER = 10000
# Backtracking gives up below this step length.
_MIN_STEP = 2.0 ** -40


@dataclass(frozen=True, eq=False)
class MassTargets:
    """Positive target masses, one per site, summing to the total mass."""
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        if len(q) == 0:
            raise TargetError("no mass targets given")
        if not np.all(np.isfinite(q)) or np.any(q <= 0.0):
            raise TargetError(f"mass targets must be finite and positive, got {q.tolist()}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @classmethod
    def equal(cls, n: int, total: float) -> "MassTargets":
        return cls(np.full(n, total / n))

    def __len__(self) -> int:
        return len(self.q)

    def validate(self, total: float) -> None:
        if abs(float(self.q.sum()) - total) > TARGET_SUM_RTOL * total:
            raise TargetError(f"targets sum to {self.q.sum():.12g} but the body carries {total:.12g}")


TargetsLike = Union[MassTargets, Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class TransportResult:
    """Outcome of a transport solve."""
    config: WeightedConfiguration
    partition: PowerPartition
    masses: np.ndarray
    iterations: int
    residual: float
    objective_history: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "masses": self.masses.tolist(),
            "iterations": self.iterations,
            "residual": self.residual,
        }


def cell_mass(cell: ConvexPolygon, density: DensityField) -> float:
    """Mass of a cell under a density (zero for the empty cell)."""
    if cell.is_empty:
        return 0.0
    return density.mass(cell)


def cell_masses(partition: PowerPartition, density: DensityField) -> np.ndarray:
    return np.array([cell_mass(cell, density) for cell in partition.cells])


def transport_cost(partition: PowerPartition, sites: Sequence[PointLike], density: DensityField) -> float:
    """Sum over cells of the integral of |x - x_i|^2 against the density."""
    pts = np.asarray(sites, dtype=float).reshape(-1, 2)
    return float(sum(density.second_moment(cell, pts[i])
                     for i, cell in enumerate(partition.cells) if not cell.is_empty))


def dual_objective(partition: PowerPartition, density: DensityField, targets: TargetsLike,
                   masses: Optional[np.ndarray] = None) -> float:
    """The Kantorovich dual Phi at the partition's radii."""
    q = _as_targets(targets).q
    radii = partition.config.radii
    if masses is None:
        masses = cell_masses(partition, density)
    cost = transport_cost(partition, partition.config.sites, density)
    return float(q @ radii) + cost - float(masses @ radii)


def _as_targets(targets: TargetsLike) -> MassTargets:
    return targets if isinstance(targets, MassTargets) else MassTargets(targets)


def hessian_laplacian(partition: PowerPartition, density: DensityField) -> np.ndarray:
    """d mu(C_i) / d r_j: the weighted Laplacian of the adjacency graph."""
    n = partition.n
    sites = partition.config.sites
    L = np.zeros((n, n))
    for (i, j), (a, b) in partition.shared_edges.items():
        w = density.line_mass(a, b) / (2.0 * float(np.hypot(*(sites[i] - sites[j]))))
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    return L


class TransportSolver:
    """
    Damped Newton ascent on the Kantorovich dual.

    A trial step is accepted when every cell keeps at least the mass floor,
    the max-norm mass residual decreases by the factor (1 - step/2) and the
    dual objective does not decrease; otherwise the step is halved.

    Args:
        tol: Mass tolerance relative to mu(K) (density default when None)
        max_iter: Iteration budget
        mass_floor_ratio: Accepted iterates keep every cell above this
            fraction of the smallest target
        verbose: Log per-iteration progress
    """

    def __init__(self, tol: Optional[float] = None, max_iter: int = DEFAULT_MAX_ITER,
                 mass_floor_ratio: float = 0.1, verbose: bool = False):
        self.tol = tol
        self.max_iter = max_iter
        self.mass_floor_ratio = mass_floor_ratio
        if verbose:
            enable_verbose()
        self.logger = logger

    def solve(self, sites, density: DensityField, body: ConvexPolygon, targets: TargetsLike,
              initial_radii: Optional[Sequence[float]] = None) -> TransportResult:
        """
        Solve for radii whose cells carry the target masses.

        Raises:
            GeometryError: coincident sites
            TargetError: targets of the wrong length, sign or total
            SolverError: budget exhausted or line search stalled
        """
        pts = np.asarray(sites, dtype=float).reshape(-1, 2)
        n = len(pts)
        q = _as_targets(targets)
        if len(q) != n:
            raise TargetError(f"{len(q)} targets for {n} sites")
        total = density.total_mass(body)
        q.validate(total)
        tol = density.default_tolerance if self.tol is None else self.tol
        threshold = tol * total

        radii = np.zeros(n) if initial_radii is None else np.array(initial_radii, dtype=float)
        radii = radii - radii[-1]
        partition = build(WeightedConfiguration(pts, radii), body)
        partition = self._repair_empty_cells(partition, body)
        masses = cell_masses(partition, density)
        residual = float(np.max(np.abs(q.q - masses)))
        objective = dual_objective(partition, density, q, masses)
        history = [objective]
        floor = min(self.mass_floor_ratio * float(q.q.min()), 0.5 * float(masses.min()))
        objective_slack = 1e-12 * total * body.diameter ** 2

        self.logger.debug(f"transport solve: n={n}, tol={tol:.1e}, initial residual={residual:.3e}")
        iteration = 0
        while residual > threshold:
            if iteration >= self.max_iter:
                raise SolverError(f"transport did not converge in {self.max_iter} iterations",
                                  best_residual=residual / total, iterations=iteration)
            gradient = q.q - masses
            direction = self._newton_direction(partition, density, gradient, body, total)

            step = 1.0
            while True:
                trial_radii = partition.config.radii + step * direction
                trial_radii = trial_radii - trial_radii[-1]
                trial = build(WeightedConfiguration(pts, trial_radii), body)
                trial_masses = cell_masses(trial, density)
                trial_residual = float(np.max(np.abs(q.q - trial_masses)))
                if trial_masses.min() >= floor and trial_residual <= (1.0 - 0.5 * step) * residual:
                    trial_objective = dual_objective(trial, density, q, trial_masses)
                    if trial_objective >= objective - objective_slack:
                        break
                step *= 0.5
                if step < _MIN_STEP:
                    raise SolverError(f"line search stalled at residual {residual:.3e}",
                                      best_residual=residual / total, iterations=iteration)

            partition, masses, residual, objective = trial, trial_masses, trial_residual, trial_objective
            history.append(objective)
            iteration += 1
            self.logger.debug(f"iteration {iteration}: step={step:.3g}, residual={residual:.3e}")

        self.logger.debug(f"transport converged: n={n}, iterations={iteration}, residual={residual:.3e}")
        return TransportResult(partition.config, partition, masses, iteration, residual / total, history)

    def _newton_direction(self, partition: PowerPartition, density: DensityField,
                          gradient: np.ndarray, body: ConvexPolygon, total: float) -> np.ndarray:
        n = partition.n
        direction = np.zeros(n)
        if n == 1:
            return direction
        L = hessian_laplacian(partition, density)
        try:
            reduced, _, rank, _ = lstsq(L[:-1, :-1], gradient[:-1])
            if rank == n - 1 and np.all(np.isfinite(reduced)):
                direction[:-1] = reduced
                return direction
        except LinAlgError:
            pass
        # singular Laplacian: scaled gradient step
        self.logger.debug("singular Newton system, taking a gradient step")
        direction = gradient * (body.diameter ** 2 / total)
        return direction - direction[-1]

    def _repair_empty_cells(self, partition: PowerPartition, body: ConvexPolygon) -> PowerPartition:
        """Raise the radius of each empty cell until it owns the point of K nearest its site."""
        pts = partition.config.sites
        margin = 1e-3 * body.diameter ** 2
        for _ in range(partition.n):
            empty = partition.empty_cells
            if not empty:
                return partition
            logger.warning(f"cells {empty} are empty at the initial radii, raising their radii")
            radii = np.array(partition.config.radii)
            for i in empty:
                p = np.asarray(body.nearest_point(pts[i]))
                powers = np.sum((pts - p) ** 2, axis=1) - radii
                others = np.delete(powers, i)
                radii[i] = float(np.sum((pts[i] - p) ** 2)) - float(others.min()) + margin
            radii -= radii[-1]
            partition = build(WeightedConfiguration(pts, radii), body)
        if partition.empty_cells:
            raise SolverError(f"could not populate empty cells {partition.empty_cells}")
        return partition


def solve_radii(sites, density: DensityField, body: ConvexPolygon, targets: TargetsLike,
                tol: Optional[float] = None) -> WeightedConfiguration:
    """Radii (last one zero) whose power cells carry the target masses."""
    return TransportSolver(tol=tol).solve(sites, density, body, targets).config
