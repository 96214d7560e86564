"""Generators of the local polytope and the tightness test.

Joint probabilities P(A_a = k, B_b = l) are laid out as four d*d blocks in the
order (A1,B1), (A1,B2), (A2,B1), (A2,B2), with entry k*d + l inside a block.
A deterministic strategy maps to a 0/1 vector with one 1 per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from bellstruct.coefficients import BellCoefficients
from bellstruct.errors import InputError
from bellstruct.linalg import numerical_rank
from bellstruct.localrealism import (
    DeterministicStrategy,
    enumerate_strategies,
    lr_bound,
)

MAX_TIGHTNESS_D = 12
T1_TOL = 1e-9


@dataclass(frozen=True)
class PolytopeGenerator:
    strategy: DeterministicStrategy
    vector: np.ndarray

    def positions(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.vector))


def generator(s: DeterministicStrategy | tuple[int, int, int, int], d: int) -> PolytopeGenerator:
    s = DeterministicStrategy(*s)
    if any(int(v) != v or not 0 <= v < d for v in s):
        raise InputError(f"strategy {tuple(s)} has values outside Z_{d}")
    vec = np.zeros(4 * d * d)
    for block, (x, y) in enumerate(((s.a1, s.b1), (s.a1, s.b2), (s.a2, s.b1), (s.a2, s.b2))):
        vec[block * d * d + (x % d) * d + (y % d)] = 1.0
    return PolytopeGenerator(s, vec)


def epsilon_vector(c: BellCoefficients) -> np.ndarray:
    """The functional as a 4d^2 vector: block (a,b) entry k*d + l is eps_ab((k - l) mod d)."""
    d = c.d
    eps = c.real_epsilon()
    k = np.arange(d)
    diff = np.subtract.outer(k, k) % d
    return np.concatenate([eps[a, b][diff].ravel() for a in range(2) for b in range(2)])


def condition_T1(c: BellCoefficients) -> bool:
    """Every generator lies in the half space below the local bound."""
    eps = epsilon_vector(c)
    bound = lr_bound(c).bound
    return all(generator(s, c.d).vector @ eps <= bound + T1_TOL for s in enumerate_strategies(c.d))


def facet_dimension(d: int) -> int:
    """h = 4d(d-1): dimension of the probability space after normalization and no-signalling."""
    return 4 * d * (d - 1)


@dataclass(frozen=True)
class TightnessVerdict:
    is_tight: bool
    rank: int
    h: int
    maximizer_count: int
    lr_bound: float
    affine_rank: int

    def to_json(self) -> dict[str, Any]:
        return {
            "tight": self.is_tight,
            "rank": self.rank,
            "h": self.h,
            "maximizer_count": self.maximizer_count,
            "lr_bound": self.lr_bound,
            "affine_rank": self.affine_rank,
        }


def tightness(c: BellCoefficients) -> TightnessVerdict:
    """Tight when the bound-attaining generators span at least h linear dimensions.

    ``affine_rank`` is the rank of the attaining generators' differences, i.e.
    the affine dimension of the face; a facet has affine rank h - 1.
    """
    d = c.d
    if d > MAX_TIGHTNESS_D:
        raise InputError(f"tightness is supported for d <= {MAX_TIGHTNESS_D}, got {d}")
    result = lr_bound(c)
    vectors = np.array([generator(s, d).vector for s in result.maximizers])
    rank = numerical_rank(vectors)
    affine = numerical_rank(vectors[1:] - vectors[0]) if len(vectors) > 1 else 0
    h = facet_dimension(d)
    return TightnessVerdict(rank >= h, rank, h, result.maximizer_count, result.bound, affine)


def slk_maximizer_families(d: int) -> list[tuple[int, int, int, int]]:
    """Residue quadruples (alpha_11, alpha_12, alpha_21, alpha_22) attaining the optimal SLK bound."""
    if int(d) != d or d < 2:
        raise InputError(f"d must be an integer >= 2, got {d!r}")
    m = d - 1
    return [(0, 0, m, m), (0, 0, 0, 0), (0, 1, m, 0), (m, 0, m, 0)]


def maximizer_residues(c: BellCoefficients) -> set[tuple[int, int, int, int]]:
    return {s.residues(c.d) for s in lr_bound(c).maximizers}


__all__ = [
    "PolytopeGenerator",
    "TightnessVerdict",
    "condition_T1",
    "epsilon_vector",
    "facet_dimension",
    "generator",
    "maximizer_residues",
    "slk_maximizer_families",
    "tightness",
]
