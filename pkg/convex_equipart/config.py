"""
Run Configuration

RunConfig collects every parameter of a command line run. Values come from
three layers: built-in defaults, an optional JSON config file, and explicit
command line flags, each overriding the previous one.
"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from convex_equipart.core.equipartition import SearchOptions
from convex_equipart.core.functionals import FUNCTIONAL_KINDS, CentroidMap
from convex_equipart.errors import FormatError

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """Parameters of one command line run."""
    command: str = "partition"
    body: Optional[str] = None
    density: List[str] = field(default_factory=lambda: ["uniform"])
    n: int = 2
    functional: str = "perimeter"
    centermap: str = "centroid"
    recursive: bool = False
    tol: Optional[float] = None
    spread_tol: float = 1e-5
    seed: int = 0
    starts: int = 8
    jobs: int = 1
    out: Optional[str] = None
    n_max: int = 64
    d: int = 2
    verbose: bool = False

    def search_options(self) -> SearchOptions:
        return SearchOptions(starts=self.starts, spread_tol=self.spread_tol, mass_tol=self.tol,
                             seed=self.seed, jobs=self.jobs)

    def validate(self) -> None:
        """Raise FormatError for values no command accepts."""
        if self.n < 1:
            raise FormatError(f"n must be at least 1, got {self.n}")
        if self.functional not in FUNCTIONAL_KINDS:
            raise FormatError(f"unknown functional {self.functional!r}; choose from {', '.join(FUNCTIONAL_KINDS)}")
        if self.centermap not in CentroidMap.CENTERMAPS:
            raise FormatError(f"unknown centermap {self.centermap!r}")
        if self.tol is not None and not self.tol > 0.0:
            raise FormatError(f"tol must be positive, got {self.tol}")
        if not self.spread_tol > 0.0:
            raise FormatError(f"spread_tol must be positive, got {self.spread_tol}")
        if self.starts < 1 or self.jobs < 1:
            raise FormatError("starts and jobs must be at least 1")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_FIELD_TYPES = {
    "command": (str,),
    "body": (str,),
    "density": (list, str),
    "n": (int,),
    "functional": (str,),
    "centermap": (str,),
    "recursive": (bool,),
    "tol": (int, float),
    "spread_tol": (int, float),
    "seed": (int,),
    "starts": (int,),
    "jobs": (int,),
    "out": (str,),
    "n_max": (int,),
    "d": (int,),
    "verbose": (bool,),
}

_OPTIONAL = {"body", "tol", "out"}


def _check_value(key: str, value: Any, path: str) -> Any:
    if value is None and key in _OPTIONAL:
        return None
    allowed = _FIELD_TYPES[key]
    # bool is an int subclass; only accept it where a bool is expected
    if isinstance(value, bool) and bool not in allowed:
        raise FormatError(f"config key {key!r} must not be a boolean", path)
    if not isinstance(value, allowed):
        raise FormatError(f"config key {key!r} has invalid value {value!r}", path)
    if key == "density":
        value = [value] if isinstance(value, str) else value
        if not all(isinstance(item, str) for item in value):
            raise FormatError("config key 'density' must be a string or a list of strings", path)
    if key in ("tol", "spread_tol"):
        value = float(value)
    return value


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load and validate a JSON config file.

    Unknown keys are logged and skipped.

    Raises:
        FormatError: unreadable JSON, a non-object document or a badly typed value
    """
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", path, e.lineno) from e
    if not isinstance(document, dict):
        raise FormatError("config file must contain a JSON object", path)

    known = {f.name for f in fields(RunConfig)}
    values = {}
    for key, value in document.items():
        if key not in known:
            logger.warning(f"{path}: ignoring unknown config key {key!r}")
            continue
        values[key] = _check_value(key, value, path)
    logger.debug(f"loaded {len(values)} settings from {path}")
    return values


def resolve_config(flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """
    Layer defaults, the config file and explicit flags (those not None).
    """
    merged: Dict[str, Any] = {}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if value is not None})
    config = RunConfig(**merged)
    config.validate()
    return config
