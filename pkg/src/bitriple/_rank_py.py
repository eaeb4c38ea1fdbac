"""Pure-Python Gaussian elimination over a prime field (fallback kernel)."""

from __future__ import annotations

from typing import Sequence


def rank_mod_p(rows: Sequence[Sequence[int]], ncols: int, p: int) -> int:
    """Rank of an integer matrix (sequence of rows) modulo the prime ``p``."""
    if p < 2:
        raise ValueError("modulus must be a prime >= 2")
    a = []
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ValueError(f"row {i} has length {len(row)}, expected {ncols}")
        a.append([v % p for v in row])
    nrows = len(a)
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((r for r in range(rank, nrows) if a[r][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        prow = a[rank]
        inv = pow(prow[col], -1, p)
        for j in range(col, ncols):
            prow[j] = prow[j] * inv % p
        for r in range(rank + 1, nrows):
            row = a[r]
            f = row[col]
            if f:
                for j in range(col, ncols):
                    row[j] = (row[j] - f * prow[j]) % p
        rank += 1
    return rank
