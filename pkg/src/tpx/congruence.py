"""Counting solutions of homogeneous linear congruences A x = 0 (mod N).

Two backends: an integer Smith normal form (exact, any N) and brute-force
enumeration over [N]^cols (reference only, N^cols <= BRUTE_LIMIT).
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from .errors import SizeLimitError

BRUTE_LIMIT = 10**7


def smith_normal_form(matrix) -> list[int]:
    """Diagonal d_1 | d_2 | ... of the integer Smith form (length min(rows, cols)).

    Works on Python ints, so there is no overflow for any input size.
    """
    a = [[int(x) for x in row] for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not nonzero:
                return diag + [0] * (min(rows, cols) - len(diag))
            _, i, j = min(nonzero)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                dirty |= a[i][t] != 0
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p), None)
            if bad is None:
                break
            # pulls a non-multiple of p into row t; the next pass shrinks the pivot
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag


def count_solutions_snf(matrix, N: int) -> int:
    a = np.asarray(matrix)
    cols = a.shape[1] if a.ndim == 2 else 0
    if a.size == 0:
        return N**cols
    d = smith_normal_form(a.tolist())
    d = d + [0] * (cols - len(d))
    return math.prod(math.gcd(x, N) for x in d)


def count_solutions_brute(matrix, N: int) -> int:
    a = np.asarray(matrix, dtype=np.int64)
    rows, cols = a.shape
    if N**cols > BRUTE_LIMIT:
        raise SizeLimitError(f"brute force over {N}^{cols} tuples exceeds {BRUTE_LIMIT}")
    if cols == 0:
        return 1
    if rows == 0:
        return N**cols
    # enumerate leading coordinates in blocks to bound memory
    lead = max(cols - 4, 0)
    tail = np.indices((N,) * (cols - lead)).reshape(cols - lead, -1)
    partial_tail = a[:, lead:] @ tail
    total = 0
    for head in product(range(N), repeat=lead):
        shift = a[:, :lead] @ np.array(head, dtype=np.int64) if lead else 0
        r = (partial_tail + np.asarray(shift).reshape(-1, 1)) % N
        total += int(np.count_nonzero(~r.any(axis=0)))
    return total


def count_solutions(matrix, N: int, backend: str = "snf") -> int:
    if backend == "snf":
        return count_solutions_snf(matrix, N)
    if backend == "brute":
        return count_solutions_brute(matrix, N)
    raise ValueError(f"unknown backend {backend!r}")
