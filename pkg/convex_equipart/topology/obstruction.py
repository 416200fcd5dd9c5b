"""
Prime-Power Obstruction

The top boundary map of the tree cell complex sends the generator of the
two-branch cell with n1 leaves on the first branch to the binomial
coefficient C(n, n1), with sign (-1)^n1 for twisted coefficients. The gcd of
these coefficients is p when n = p^k and 1 otherwise, which decides whether
the class that forces equipartitions survives.
"""

import math
from dataclasses import dataclass
from functools import reduce
from typing import Any, Dict, List, Optional

from convex_equipart.errors import EnumerationBoundsError


@dataclass(frozen=True)
class ObstructionReport:
    """
    Boundary coefficients of n and their gcd.

    Attributes:
        n: Number of cells
        coefficients: Coefficients for n1 = 1 .. n-1 (exact integers)
        gcd: gcd of their absolute values
        is_prime_power: gcd > 1
        p: The prime when is_prime_power, otherwise None
        twisted: Whether the signed coefficients were used
    """
    n: int
    coefficients: List[int]
    gcd: int
    is_prime_power: bool
    p: Optional[int]
    twisted: bool = True

    def to_row(self) -> List[Any]:
        return [self.n, self.gcd, self.is_prime_power, self.p if self.p is not None else ""]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "coefficients": self.coefficients,
            "gcd": self.gcd,
            "is_prime_power": self.is_prime_power,
            "p": self.p,
            "twisted": self.twisted,
        }


def boundary_coefficient(n: int, n1: int, twisted: bool = True) -> int:
    """
    C(n, n1), signed by (-1)^n1 for twisted coefficients.

    Raises:
        ValueError: unless 0 < n1 < n
    """
    if not 0 < n1 < n:
        raise ValueError(f"boundary coefficient needs 0 < n1 < n, got n={n}, n1={n1}")
    value = math.comb(n, n1)
    return -value if twisted and n1 % 2 else value


def obstruction(n: int, twisted: bool = True) -> ObstructionReport:
    """Boundary coefficients of n and the prime-power decision."""
    if n < 2:
        raise ValueError(f"the obstruction is defined for n >= 2, got {n}")
    coefficients = [boundary_coefficient(n, n1, twisted) for n1 in range(1, n)]
    divisor = reduce(math.gcd, (abs(c) for c in coefficients))
    prime_power = divisor > 1
    return ObstructionReport(n, coefficients, divisor, prime_power, divisor if prime_power else None, twisted)


MAX_TABLE_N = 512


def obstruction_table(n_max: int, twisted: bool = True) -> List[ObstructionReport]:
    """Reports for n = 2 .. n_max."""
    if not 2 <= n_max <= MAX_TABLE_N:
        raise EnumerationBoundsError(f"obstruction table needs 2 <= n_max <= {MAX_TABLE_N}, got {n_max}")
    return [obstruction(n, twisted) for n in range(2, n_max + 1)]
