#!/usr/bin/env python3
"""
Command Line Interface for convex-equipart
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from convex_equipart.config import RunConfig, resolve_config
from convex_equipart.core.density import DensityField, GridDensity, UniformDensity
from convex_equipart.core.equipartition import factor_recursive, multi_measure_partition, search
from convex_equipart.core.functionals import FUNCTIONAL_KINDS, make_functional
from convex_equipart.errors import EquipartError, FormatError, SolverError
from convex_equipart.geometry.polygon import ConvexPolygon
from convex_equipart.parsers.formats import read_grid_density, read_polygon
from convex_equipart.report.serialize import (
    hamsandwich_report,
    obstruction_csv,
    partition_report,
    recursion_report,
    serialize_to_json,
    trees_csv,
    write_atomic,
)
from convex_equipart.report.svg import render_partition
from convex_equipart.topology.cells import count_trees
from convex_equipart.topology.obstruction import obstruction_table
from convex_equipart.utils.logger import configure_logging, level_for

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_INPUT_ERROR = 2


def load_body(config: RunConfig) -> ConvexPolygon:
    if not config.body:
        raise FormatError("a body polygon is required (--body PATH)")
    return read_polygon(config.body)


def load_density(spec: str, body: ConvexPolygon) -> DensityField:
    """'uniform' or the path of a grid density file."""
    if spec == "uniform":
        return UniformDensity(body)
    return read_grid_density(spec)


def _emit(config: RunConfig, report_text: str, svg_text: Optional[str], name: str) -> None:
    if config.out is None:
        sys.stdout.write(report_text)
        return
    out = Path(config.out)
    write_atomic(out / name, report_text)
    if svg_text is not None:
        write_atomic(out / "partition.svg", svg_text)
    print(f"Report written to {out / name}", file=sys.stderr)


def cmd_partition(config: RunConfig) -> int:
    """Equal-mass partition equalizing one functional; exit 0 iff converged."""
    body = load_body(config)
    if len(config.density) != 1:
        raise FormatError(f"partition takes one density, got {len(config.density)}")
    density = load_density(config.density[0], body)
    functional = make_functional(config.functional, centermap=config.centermap, body=body)
    options = config.search_options()

    if config.recursive:
        root = factor_recursive(body, density, config.n, functional, options)
        leaves = [leaf.body for leaf in root.leaves()]
        record = recursion_report(root, options)
        svg = render_partition(body, leaves, density=density)
        converged = root.converged
    else:
        result = search(body, density, config.n, functional, options)
        record = partition_report(result, options)
        svg = render_partition(body, result.cells, result.config.sites, density)
        converged = result.converged

    _emit(config, serialize_to_json(record), svg, "report.json")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_hamsandwich(config: RunConfig) -> int:
    """Partition giving every cell 1/n of each of two measures."""
    body = load_body(config)
    if len(config.density) != 2:
        raise FormatError(f"hamsandwich takes exactly two densities, got {len(config.density)}")
    measures = [load_density(spec, body) for spec in config.density]
    options = config.search_options()
    result = multi_measure_partition(measures, body, config.n, options)
    record = hamsandwich_report(result, options)
    heatmap = next((m for m in measures if isinstance(m, GridDensity)), None)
    svg = render_partition(body, result.cells, result.config.sites, heatmap)
    _emit(config, serialize_to_json(record), svg, "report.json")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_obstruction(config: RunConfig) -> int:
    """CSV of n, gcd, is_prime_power, p for n = 2 .. n_max."""
    text = obstruction_csv(obstruction_table(config.n_max))
    _emit(config, text, None, "obstruction.csv")
    return EXIT_OK


def cmd_trees(config: RunConfig) -> int:
    """CSV of cell counts per dimension."""
    text = trees_csv(count_trees(config.n, config.d))
    _emit(config, text, None, "trees.csv")
    return EXIT_OK


COMMANDS = {
    "partition": cmd_partition,
    "hamsandwich": cmd_hamsandwich,
    "obstruction": cmd_obstruction,
    "trees": cmd_trees,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="convex-equipart: convex partitions with equal mass and equal functionals"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default parameters", default=None)
    common.add_argument("--out", help="Output directory (default: stdout)", default=None)
    common.add_argument("-v", "--verbose", action="store_true", default=None, help="Enable verbose output")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--body", help="Polygon file of the convex body", default=None)
    solver.add_argument("--n", type=int, help="Number of cells", default=None)
    solver.add_argument("--tol", type=float, help="Mass tolerance relative to the total mass", default=None)
    solver.add_argument("--spread-tol", dest="spread_tol", type=float, default=None,
                        help="Spread tolerance (default: 1e-5)")
    solver.add_argument("--seed", type=int, help="Random seed (default: 0)", default=None)
    solver.add_argument("--starts", type=int, help="Number of multi-starts (default: 8)", default=None)
    solver.add_argument("--jobs", type=int, help="Worker processes (default: 1)", default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    partition = sub.add_parser("partition", parents=[common, solver],
                               help="Equal-mass partition equalizing a functional")
    partition.add_argument("--density", action="append", default=None,
                           help="'uniform' or a grid density file (default: uniform)")
    partition.add_argument("--functional", choices=FUNCTIONAL_KINDS, default=None,
                           help="Functional to equalize (default: perimeter)")
    partition.add_argument("--centermap", choices=["centroid", "bbox-center"], default=None,
                           help="Cell center used by centroid functionals")
    partition.add_argument("--recursive", action="store_true", default=None,
                           help="Subdivide one prime-power factor of n at a time")

    hamsandwich = sub.add_parser("hamsandwich", parents=[common, solver],
                                 help="Partition with equal shares of two measures")
    hamsandwich.add_argument("--density", action="append", default=None,
                             help="Give twice: transported measure, then the second measure")

    obstruction = sub.add_parser("obstruction", parents=[common], help="Prime-power obstruction table")
    obstruction.add_argument("--n-max", dest="n_max", type=int, default=None, help="Largest n (default: 64)")

    trees = sub.add_parser("trees", parents=[common], help="Cell counts of configuration space")
    trees.add_argument("--n", type=int, default=None, help="Number of points")
    trees.add_argument("--d", type=int, default=None, help="Ambient dimension")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = vars(args)
    config_path = flags.pop("config")

    try:
        config = resolve_config(flags, config_path)
        configure_logging(level_for(config.verbose))
        return COMMANDS[config.command](config)
    except SolverError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (EquipartError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
