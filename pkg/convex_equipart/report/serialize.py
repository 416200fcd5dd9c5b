"""
Report Serialization

JSON and CSV renderings of results. Output is byte-deterministic: keys are
sorted and floats use Python's shortest round-trip repr.
"""

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

from convex_equipart.core.equipartition import EquipartitionResult, PartitionNode, SearchOptions
from convex_equipart.topology.obstruction import ObstructionReport

SCHEMA_VERSION = 1

PathLike = Union[str, Path]


def _finite(value: Any) -> Any:
    """Replace non-finite floats (not valid JSON) by None, recursively."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def serialize_to_json(record: Dict[str, Any], pretty: bool = True) -> str:
    text = json.dumps(_finite(record), indent=2 if pretty else None, sort_keys=True, allow_nan=False)
    return text + "\n"


def partition_report(result: EquipartitionResult, options: Optional[SearchOptions] = None,
                     command: str = "partition") -> Dict[str, Any]:
    """The JSON record of a partition run."""
    record = result.to_dict()
    record["schema"] = SCHEMA_VERSION
    record["command"] = command
    if options is not None:
        record["options"] = options.to_dict()
    return record


def hamsandwich_report(result: EquipartitionResult, options: Optional[SearchOptions] = None) -> Dict[str, Any]:
    """Like partition_report, with masses as [first measure, second measure] per cell."""
    record = partition_report(result, options, command="hamsandwich")
    second = result.functional_values[:, 0].tolist()
    record["masses"] = [[m0, m1] for m0, m1 in zip(result.masses.tolist(), second)]
    return record


def recursion_report(root: PartitionNode, options: Optional[SearchOptions] = None) -> Dict[str, Any]:
    leaves = list(root.leaves())
    record = {
        "schema": SCHEMA_VERSION,
        "command": "partition",
        "tree": root.to_dict(),
        "cells": [leaf.body.to_list() for leaf in leaves],
        "masses": [root.density.mass(leaf.body) for leaf in leaves],
        "converged": root.converged,
    }
    if options is not None:
        record["options"] = options.to_dict()
    return record


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


OBSTRUCTION_HEADER = ["n", "gcd", "is_prime_power", "p"]
TREES_HEADER = ["dimension", "unlabeled_count", "labeled_count"]


def obstruction_csv(reports: Sequence[ObstructionReport]) -> str:
    return csv_text(OBSTRUCTION_HEADER, (report.to_row() for report in reports))


def trees_csv(counts: Dict[int, Any]) -> str:
    return csv_text(TREES_HEADER, ([dim, unlabeled, labeled] for dim, (unlabeled, labeled) in counts.items()))


def write_atomic(path: PathLike, text: str) -> Path:
    """Write text to path through a temporary file in the same directory."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target
