"""Matrix elements of F^{(x)k,k} between E-states and I-states.

<E_P1|F|E_P2> reduces to counting free-index tuples of E_P2 that satisfy
one congruence per block of P1.  <I_P1|F|I_P2> follows by Moebius inversion
and is assembled from exact integers before a single final division.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Sequence

import numpy as np

from .congruence import count_solutions
from .errors import ArgumentError, UnsupportedRegimeError
from .partitions import (
    SetPartition,
    coarsenings,
    enumerate_partitions,
    falling_factorial,
    is_refinement,
    mobius_matrix,
    perm_partition,
)
from .states import TupleSpace, build_state_E, build_state_I


def signed_dot(m: Sequence[int], n: Sequence[int], k: int) -> int:
    """m_1 n_1 + ... + m_k n_k - m_{k+1} n_{k+1} - ... - m_{2k} n_{2k}."""
    if len(m) != 2 * k or len(n) != 2 * k:
        raise ArgumentError(f"tuples must have length {2 * k}")
    return sum(int(a) * int(b) for a, b in zip(m[:k], n[:k])) - sum(
        int(a) * int(b) for a, b in zip(m[k:], n[k:])
    )


def _signs(k: int) -> np.ndarray:
    return np.r_[np.ones(k, dtype=np.int64), -np.ones(k, dtype=np.int64)]


def _block_indicator(p: SetPartition) -> np.ndarray:
    """(n, |p|) 0/1 matrix R with R[j, b] = 1 iff element j+1 is in block b."""
    r = np.zeros((p.n, len(p)), dtype=np.int64)
    r[np.arange(p.n), p.labels] = 1
    return r


def constraint_matrix(p1: SetPartition, k: int) -> np.ndarray:
    """|p1| x 2k matrix A with m.n = sum_i mfree_i (A n)_i for m in E_p1."""
    if p1.n != 2 * k:
        raise ArgumentError(f"partition of {p1.n} is not a partition of 2k = {2 * k}")
    return _block_indicator(p1).T * _signs(k)


def reduced_constraint_matrix(p1: SetPartition, p2: SetPartition, k: int) -> np.ndarray:
    """|p1| x |p2| matrix with m.n = mfree^T A~ nfree on E_p1 x E_p2."""
    if p2.n != 2 * k:
        raise ArgumentError(f"partition of {p2.n} is not a partition of 2k = {2 * k}")
    return constraint_matrix(p1, k) @ _block_indicator(p2)


def count_congruence_solutions(A, p2: SetPartition, N: int, backend: str = "snf") -> int:
    """Number of n in E_p2 with A n = 0 (mod N), counted over p2's free indices."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2 or A.shape[1] != p2.n:
        raise ArgumentError(f"constraint matrix shape {A.shape} does not act on tuples of length {p2.n}")
    return count_solutions(A @ _block_indicator(p2), N, backend)


@lru_cache(maxsize=200_000)
def _pair_count(p1: SetPartition, p2: SetPartition, N: int, k: int, backend: str = "snf") -> int:
    return count_solutions(reduced_constraint_matrix(p1, p2, k), N, backend)


@dataclass(frozen=True)
class MatrixElementValue:
    value: float
    derivation: str  # "counting" or "dense"
    count: int | None = None
    imag: float = 0.0

    def __float__(self) -> float:
        return self.value


def _scaled_count(count: int, N: int, twice_exp: int) -> float:
    """count * N^(twice_exp / 2), rounded once from the exact rational."""
    if twice_exp % 2 == 0:
        return float(Fraction(count) * Fraction(N) ** (twice_exp // 2))
    return math.sqrt(float(Fraction(count) ** 2 * Fraction(N) ** twice_exp))


def e_matrix_element(p1: SetPartition, p2: SetPartition, N: int, k: int, backend: str = "snf") -> MatrixElementValue:
    """<E_p1|F^{(x)k,k}|E_p2> = N^(-k + (|p1| - |p2|)/2) * #solutions."""
    if N < 2:
        raise ArgumentError("N must be at least 2")
    count = _pair_count(p1, p2, N, k, backend)
    value = _scaled_count(count, N, -2 * k + len(p1) - len(p2))
    return MatrixElementValue(value, "counting", count)


def _require_regime(N: int, k: int) -> None:
    if N < 2 * k:
        raise UnsupportedRegimeError(f"I-state expansion needs N >= 2k = {2 * k}, got N={N}")


def i_matrix_element(p1: SetPartition, p2: SetPartition, N: int, k: int) -> complex:
    """<I_p1|F^{(x)k,k}|I_p2> via the double Moebius expansion into E-states.

    Each term mu mu' sqrt(|E_q1||E_q2| / |I_p1||I_p2|) <E_q1|F|E_q2> equals
    mu mu' count(q1, q2) N^(|q1|) / (N^k sqrt((N)_|p1| (N)_|p2|)), so the
    numerator is summed exactly in integers.
    """
    _require_regime(N, k)
    total = 0
    up2 = list(coarsenings(p2))
    for q1, mu1 in coarsenings(p1):
        w = mu1 * N ** len(q1)
        for q2, mu2 in up2:
            total += w * mu2 * _pair_count(q1, q2, N, k)
    denom = N**k * math.sqrt(falling_factorial(N, len(p1)) * falling_factorial(N, len(p2)))
    return complex(total / denom)


def count_matrix(N: int, k: int, threads: int = 1, backend: str = "snf") -> np.ndarray:
    """beta_{2k} x beta_{2k} object array of exact solution counts."""
    idx = enumerate_partitions(2 * k)

    def row(p1):
        return [_pair_count(p1, p2, N, k, backend) for p2 in idx]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(row, idx.order))
    else:
        rows = [row(p) for p in idx.order]
    return np.array(rows, dtype=object)


def e_matrix(N: int, k: int, threads: int = 1) -> np.ndarray:
    idx = enumerate_partitions(2 * k)
    c = count_matrix(N, k, threads)
    b = [int(x) for x in idx.block_counts]
    return np.array([[_scaled_count(c[i, j], N, -2 * k + b[i] - b[j]) for j in range(len(b))] for i in range(len(b))])


def i_matrix(N: int, k: int, threads: int = 1) -> np.ndarray:
    """Real symmetric matrix of <I_p1|F|I_p2> in canonical partition order."""
    _require_regime(N, k)
    idx = enumerate_partitions(2 * k)
    mu = mobius_matrix(idx).astype(object)
    weights = np.array([N ** int(b) for b in idx.block_counts], dtype=object)
    exact = mu @ (count_matrix(N, k, threads) * weights[:, None]) @ mu.T
    ff = np.array([math.sqrt(falling_factorial(N, int(b))) for b in idx.block_counts])
    num = np.array([[float(x) for x in row] for row in exact])
    return num / (N**k * np.outer(ff, ff))


# --- dense oracle ----------------------------------------------------------


def dft_matrix(N: int) -> np.ndarray:
    """F[m, n] = omega^(m n) / sqrt(N), omega = exp(2 pi i / N), built entrywise."""
    m = np.arange(N)
    return np.exp(2j * np.pi * (np.outer(m, m) % N) / N) / math.sqrt(N)


def apply_fourier_dense(x: np.ndarray, N: int, k: int) -> np.ndarray:
    """F to factors 1..k and conj(F) to factors k+1..2k by explicit tensordot."""
    f = dft_matrix(N)
    t = np.asarray(x, dtype=np.complex128).reshape((N,) * (2 * k) + (-1,))
    for ax in range(2 * k):
        mat = f if ax < k else f.conj()
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [ax])), 0, ax)
    return t.reshape(np.shape(x))


def e_matrix_element_dense(p1: SetPartition, p2: SetPartition, N: int, k: int) -> MatrixElementValue:
    space = TupleSpace(N, 2 * k)
    e1 = build_state_E(p1, space).amplitudes
    e2 = build_state_E(p2, space).amplitudes
    val = np.vdot(e1, apply_fourier_dense(e2, N, k))
    return MatrixElementValue(float(val.real), "dense", None, float(val.imag))


def i_matrix_dense(N: int, k: int) -> np.ndarray:
    """<I_p1|F|I_p2> from materialized states; complex, for oracle comparison."""
    space = TupleSpace(N, 2 * k)
    idx = enumerate_partitions(2 * k)
    basis = np.stack([build_state_I(p, space).amplitudes for p in idx], axis=1)
    return basis.conj().T @ apply_fourier_dense(basis, N, k)


# --- vanishing of the reduced matrix ----------------------------------------


def pair_partitions(k: int) -> list[SetPartition]:
    return [perm_partition(pi) for pi in permutations(range(k))]


def vanishing_characterization(k: int) -> dict:
    """Compare {A~ = 0} against two candidate descriptions, over all pairs.

    ``equal``: p1 = p2 >= P(pi) for some pi.
    ``common``: p1 >= P(pi) and p2 >= P(pi) for a common pi.
    """
    idx = enumerate_partitions(2 * k)
    pairs = pair_partitions(k)
    zero = set()
    for p1 in idx:
        for p2 in idx:
            if not reduced_constraint_matrix(p1, p2, k).any():
                zero.add((p1, p2))
    equal = {(p, p) for p in idx if any(is_refinement(pp, p) for pp in pairs)}
    common = {
        (p1, p2)
        for p1 in idx
        for p2 in idx
        if any(is_refinement(pp, p1) and is_refinement(pp, p2) for pp in pairs)
    }
    return {
        "k": k,
        "vanishing_pairs": len(zero),
        "equal_reading_matches": zero == equal,
        "common_reading_matches": zero == common,
        "equal_reading_missing": sorted((str(a), str(b)) for a, b in zero - equal),
    }
