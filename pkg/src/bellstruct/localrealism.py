"""Local-realistic bounds by exhaustive enumeration of deterministic strategies.

A deterministic strategy fixes the outcome exponents (A1, A2, B1, B2) in Z_d.
Every strategy yields residues alpha_ab = (A_a - B_b) mod d, and the functional
then evaluates to sum_ab eps_ab(alpha_ab). Probabilistic models are convex
mixtures of these, so the maximum over the d**4 strategies is the bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from bellstruct.coefficients import TRIG_TOL, BellCoefficients
from bellstruct.errors import InputError, InvalidInequalityError

MAX_D = 16
MAXIMIZER_RTOL = 1e-9
MAXIMIZER_ATOL = 1e-12
JSON_MAXIMIZER_LIMIT = 4096


class DeterministicStrategy(NamedTuple):
    a1: int
    a2: int
    b1: int
    b2: int

    def residues(self, d: int) -> tuple[int, int, int, int]:
        """(alpha_11, alpha_12, alpha_21, alpha_22) with alpha_ab = (A_a - B_b) mod d."""
        return (
            (self.a1 - self.b1) % d,
            (self.a1 - self.b2) % d,
            (self.a2 - self.b1) % d,
            (self.a2 - self.b2) % d,
        )


def _check_d(d: int) -> int:
    if int(d) != d or d < 2:
        raise InputError(f"d must be an integer >= 2, got {d!r}")
    if d > MAX_D:
        raise InputError(f"d = {d} exceeds the supported range d <= {MAX_D} for exhaustive enumeration")
    return int(d)


def enumerate_strategies(d: int) -> list[DeterministicStrategy]:
    d = _check_d(d)
    return [DeterministicStrategy(*s) for s in itertools.product(range(d), repeat=4)]


def _strategy_grid(d: int) -> np.ndarray:
    """All d**4 strategies as an (d**4, 4) integer array in lexicographic order."""
    return np.indices((d, d, d, d)).reshape(4, -1).T


def residue_grid(strategies: np.ndarray, d: int) -> np.ndarray:
    a1, a2, b1, b2 = strategies.T
    return np.stack([(a1 - b1) % d, (a1 - b2) % d, (a2 - b1) % d, (a2 - b2) % d], axis=1)


def strategy_value(s: DeterministicStrategy | tuple[int, int, int, int], c: BellCoefficients) -> float:
    s = DeterministicStrategy(*s)
    d = c.d
    if any(not 0 <= v < d for v in s):
        raise InputError(f"strategy {tuple(s)} has values outside Z_{d}")
    r = s.residues(d)
    total = c.epsilon[0, 0, r[0]] + c.epsilon[0, 1, r[1]] + c.epsilon[1, 0, r[2]] + c.epsilon[1, 1, r[3]]
    if abs(total.imag) > TRIG_TOL:
        raise InvalidInequalityError(f"strategy value has imaginary part {total.imag:.3e}")
    return float(total.real)


def all_strategy_values(c: BellCoefficients) -> np.ndarray:
    """Values of every strategy, in the order of :func:`enumerate_strategies`."""
    d = _check_d(c.d)
    eps = c.real_epsilon()
    r = residue_grid(_strategy_grid(d), d)
    return eps[0, 0, r[:, 0]] + eps[0, 1, r[:, 1]] + eps[1, 0, r[:, 2]] + eps[1, 1, r[:, 3]]


@dataclass(frozen=True)
class LRBoundResult:
    bound: float
    maximizers: list[DeterministicStrategy] = field(repr=False)
    tolerance: float = MAXIMIZER_RTOL

    @property
    def maximizer_count(self) -> int:
        return len(self.maximizers)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"bound": self.bound, "maximizer_count": self.maximizer_count}
        if self.maximizer_count <= JSON_MAXIMIZER_LIMIT:
            doc["maximizers"] = [list(s) for s in self.maximizers]
        return doc


def lr_bound(c: BellCoefficients) -> LRBoundResult:
    """Maximum of the functional over all deterministic local strategies."""
    d = _check_d(c.d)
    values = all_strategy_values(c)
    bound = float(values.max())
    # the threshold handles negative bounds by widening downward by the same relative amount
    threshold = bound - MAXIMIZER_RTOL * abs(bound) - MAXIMIZER_ATOL
    grid = _strategy_grid(d)
    maximizers = [DeterministicStrategy(*map(int, row)) for row in grid[values >= threshold]]
    return LRBoundResult(bound, sorted(maximizers))


def optimal_slk_bound_closed_form(d: int) -> float:
    """Local bound of the delta = 1/4 SLK functional: (3 cot(pi/4d) - cot(3pi/4d)) / 4 - 1."""
    if int(d) != d or d < 2:
        raise InputError(f"d must be an integer >= 2, got {d!r}")
    return 0.25 * (3 / math.tan(math.pi / (4 * d)) - 1 / math.tan(3 * math.pi / (4 * d))) - 1
