"""Equality classes I_P and E_P of tuples in [N]^c, and their uniform states.

Tuples are 0-based and packed big-endian: (n_1, ..., n_c) sits at index
sum n_j N^(c-j).  I_P holds the tuples whose equalities are exactly the
blocks of P; E_P holds those with at least those equalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateClassError, SizeLimitError, UnsupportedRegimeError
from .io import format_float
from .partitions import SetPartition, coarsenings, falling_factorial, join

MAX_DIM = 2**48
# largest space we materialize vectors on (complex128: 512 MiB)
MAX_DENSE_DIM = 2**25


@dataclass(frozen=True)
class TupleSpace:
    N: int
    copies: int

    def __post_init__(self):
        if self.N < 2 or self.copies < 1:
            raise SizeLimitError(f"need N >= 2 and copies >= 1, got N={self.N}, copies={self.copies}")
        if self.N**self.copies > MAX_DIM:
            raise SizeLimitError(f"dimension {self.N}^{self.copies} exceeds 2^48")

    @property
    def dim(self) -> int:
        return self.N**self.copies

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.copies

    def encode(self, t: Sequence[int]) -> int:
        if len(t) != self.copies:
            raise ValueError(f"tuple length {len(t)} != {self.copies}")
        out = 0
        for v in t:
            if not 0 <= v < self.N:
                raise ValueError(f"value {v} outside 0..{self.N - 1}")
            out = out * self.N + int(v)
        return out

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside space")
        out = []
        for _ in range(self.copies):
            index, r = divmod(index, self.N)
            out.append(r)
        return tuple(reversed(out))

    def check_dense(self) -> None:
        if self.dim > MAX_DENSE_DIM:
            raise SizeLimitError(f"dense vectors on {self.N}^{self.copies} = {self.dim} entries exceed limit")

    @cached_property
    def digits(self) -> np.ndarray:
        """(dim, copies) array of tuple entries for every index."""
        self.check_dense()
        grids = np.indices(self.shape, dtype=np.int32 if self.N < 2**31 else np.int64)
        return grids.reshape(self.copies, -1).T

    @cached_property
    def pattern_codes(self) -> np.ndarray:
        """Bitmask over position pairs (i<j) marking t_i == t_j, per index."""
        d = self.digits
        code = np.zeros(self.dim, dtype=np.int64)
        for bit, (i, j) in enumerate(combinations(range(self.copies), 2)):
            code |= (d[:, i] == d[:, j]).astype(np.int64) << bit
        return code


def partition_code(p: SetPartition) -> int:
    lab = p.labels
    code = 0
    for bit, (i, j) in enumerate(combinations(range(p.n), 2)):
        if lab[i] == lab[j]:
            code |= 1 << bit
    return code


@dataclass(frozen=True)
class StateVector:
    space: TupleSpace
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_csv(self, tol: float = 0.0) -> str:
        lines = ["index,re,im"]
        for i in np.flatnonzero(np.abs(self.amplitudes) > tol):
            a = self.amplitudes[i]
            lines.append(f"{i},{format_float(float(a.real))},{format_float(float(a.imag))}")
        return "\n".join(lines) + "\n"


def class_size_I(p: SetPartition, N: int) -> int:
    return falling_factorial(N, len(p))


def class_size_E(p: SetPartition, N: int) -> int:
    return N ** len(p)


def equality_pattern(t: Sequence[int]) -> SetPartition:
    return SetPartition.from_labels(list(t))


def _check_space(p: SetPartition, space: TupleSpace) -> None:
    if p.n != space.copies:
        raise ValueError(f"partition of {p.n} does not match {space.copies} copies")


def class_mask_I(p: SetPartition, space: TupleSpace) -> np.ndarray:
    _check_space(p, space)
    return space.pattern_codes == partition_code(p)


def class_mask_E(p: SetPartition, space: TupleSpace) -> np.ndarray:
    _check_space(p, space)
    c = partition_code(p)
    return (space.pattern_codes & c) == c


def _uniform(mask: np.ndarray, space: TupleSpace, what: str) -> StateVector:
    size = int(mask.sum())
    if size == 0:
        raise DegenerateClassError(f"{what} is empty for N={space.N}")
    amp = mask.astype(np.complex128) / math.sqrt(size)
    return StateVector(space, amp)


def build_state_I(p: SetPartition, space: TupleSpace) -> StateVector:
    return _uniform(class_mask_I(p, space), space, f"I_{{{p}}}")


def build_state_E(p: SetPartition, space: TupleSpace) -> StateVector:
    return _uniform(class_mask_E(p, space), space, f"E_{{{p}}}")


class Coefficient(NamedTuple):
    """mu * sqrt(numerator / denominator), kept exact alongside its float value."""

    mu: int
    numerator: int
    denominator: int
    value: float


def i_in_e_coeffs(p: SetPartition, N: int) -> dict[SetPartition, Coefficient]:
    """Expansion |I_p> = sum_q coeff[q] |E_q> over q >= p (Moebius inversion)."""
    if N < p.n:
        raise UnsupportedRegimeError(f"I/E inversion needs N >= {p.n}, got N={N}")
    den = falling_factorial(N, len(p))
    out = {}
    for q, mu in coarsenings(p):
        num = N ** len(q)
        out[q] = Coefficient(mu, num, den, mu * math.sqrt(num / den))
    return out


def e_in_i_coeffs(p: SetPartition, N: int) -> dict[SetPartition, float]:
    """Expansion |E_p> = sum_{q >= p} sqrt(|I_q| / |E_p|) |I_q>."""
    e = class_size_E(p, N)
    out = {}
    for q, _ in coarsenings(p):
        i = class_size_I(q, N)
        if i:
            out[q] = math.sqrt(i / e)
    return out


def e_gram(p1: SetPartition, p2: SetPartition, N: int) -> float:
    """<E_p1|E_p2> = N^(|p1 v p2| - (|p1| + |p2|)/2)."""
    return float(N) ** (len(join(p1, p2)) - (len(p1) + len(p2)) / 2)
