"""Numerical rank by row reduction."""

from __future__ import annotations

import numpy as np

RANK_RTOL = 1e-9


def numerical_rank(matrix, rtol: float = RANK_RTOL) -> int:
    """Rank of ``matrix`` by Gaussian elimination with partial pivoting.

    A column contributes a pivot when its largest remaining entry exceeds
    ``rtol`` times the largest absolute entry of the input.
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    if a.size == 0:
        return 0
    threshold = rtol * float(np.abs(a).max())
    if threshold == 0.0:
        return 0
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        p = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[p, col]) <= threshold:
            continue
        if p != rank:
            a[[rank, p]] = a[[p, rank]]
        factors = a[rank + 1 :, col] / a[rank, col]
        a[rank + 1 :, col:] -= np.outer(factors, a[rank, col:])
        rank += 1
    return rank
