"""Set partitions of {1..n} under refinement, with exact zeta/Moebius data.

Partitions are stored canonically: each block ascending, blocks ordered by
their minimum.  A :class:`PartitionIndex` fixes the order used for every
partition-indexed matrix in the package (sorted by the ``"1,2|3|4"``
serialization).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError, SizeLimitError

MAX_GROUND = 12
# densest zeta/mobius we're willing to allocate (beta_8 = 4140)
MAX_DENSE_BELL = 5000


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"ground size must be positive, got {self.n}")
        seen = [x for b in self.blocks for x in b]
        if any(len(b) == 0 for b in self.blocks):
            raise ArgumentError("empty block")
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ArgumentError(f"blocks {self.blocks} do not partition 1..{self.n}")
        canon = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        object.__setattr__(self, "blocks", canon)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "SetPartition":
        blocks = tuple(tuple(b) for b in blocks)
        if n is None:
            n = sum(len(b) for b in blocks)
        return cls(n, blocks)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "SetPartition":
        """Group positions 1..n by equal label values."""
        groups: dict = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @classmethod
    def parse(cls, text: str) -> "SetPartition":
        blocks = [tuple(int(x) for x in blk.split(",")) for blk in text.strip().split("|")]
        return cls.from_blocks(blocks)

    @classmethod
    def top(cls, n: int) -> "SetPartition":
        return cls(n, (tuple(range(1, n + 1)),))

    @classmethod
    def bottom(cls, n: int) -> "SetPartition":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)

    def __repr__(self) -> str:
        return f"SetPartition({self})"

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """Block number (0-based, canonical block order) of each element 1..n."""
        out = [0] * self.n
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x - 1] = i
        return tuple(out)

    def __le__(self, other: "SetPartition") -> bool:
        return is_refinement(self, other)

    def __ge__(self, other: "SetPartition") -> bool:
        return is_refinement(other, self)


def _check_same(p1: SetPartition, p2: SetPartition) -> None:
    if p1.n != p2.n:
        raise ArgumentError(f"ground sizes differ: {p1.n} vs {p2.n}")


def is_refinement(p1: SetPartition, p2: SetPartition) -> bool:
    """True iff every block of ``p1`` lies inside a block of ``p2``."""
    _check_same(p1, p2)
    lab2 = p2.labels
    return all(len({lab2[x - 1] for x in b}) == 1 for b in p1.blocks)


def meet(p1: SetPartition, p2: SetPartition) -> SetPartition:
    _check_same(p1, p2)
    return SetPartition.from_labels(list(zip(p1.labels, p2.labels)))


def join(p1: SetPartition, p2: SetPartition) -> SetPartition:
    _check_same(p1, p2)
    parent = list(range(p1.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in (p1, p2):
        for b in p.blocks:
            r = find(b[0] - 1)
            for x in b[1:]:
                s = find(x - 1)
                if s != r:
                    parent[s] = r
    return SetPartition.from_labels([find(i) for i in range(p1.n)])


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    """All a_1..a_n with a_1 = 0 and a_i <= 1 + max(a_1..a_{i-1})."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i, top):
        if i == n:
            yield tuple(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


@dataclass(frozen=True)
class PartitionIndex:
    n: int
    order: tuple[SetPartition, ...]
    position: dict = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, i: int) -> SetPartition:
        return self.order[i]

    def __iter__(self):
        return iter(self.order)

    def index(self, p: SetPartition) -> int:
        return self.position[p]

    @cached_property
    def block_counts(self) -> np.ndarray:
        return np.array([len(p) for p in self.order], dtype=np.int64)

    def to_json(self) -> str:
        return json.dumps([str(p) for p in self.order])


@lru_cache(maxsize=None)
def enumerate_partitions(n: int) -> PartitionIndex:
    if not 1 <= n <= MAX_GROUND:
        raise SizeLimitError(f"partition enumeration supports 1 <= n <= {MAX_GROUND}, got {n}")
    parts = [SetPartition.from_labels(rgs) for rgs in restricted_growth_strings(n)]
    parts.sort(key=str)
    return PartitionIndex(n, tuple(parts), {p: i for i, p in enumerate(parts)})


def bell_number(n: int) -> int:
    """Bell numbers via the Bell triangle (independent of enumeration)."""
    if n < 0:
        raise ArgumentError("n must be nonnegative")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def coarsenings(p: SetPartition) -> Iterator[tuple[SetPartition, int]]:
    """Every q >= p together with the closed-form Moebius value mu(p, q).

    q is built by partitioning the blocks of ``p``; a group of c blocks of
    ``p`` merged into one block of q contributes (c - 1)! to |mu|.
    """
    b = len(p)
    for rgs in restricted_growth_strings(b):
        groups: dict[int, list[int]] = {}
        for blk, g in zip(p.blocks, rgs):
            groups.setdefault(g, []).extend(blk)
        q = SetPartition(p.n, tuple(tuple(v) for v in groups.values()))
        sizes = np.bincount(rgs)
        mu = (-1) ** (b - len(sizes)) * math.prod(math.factorial(c - 1) for c in sizes)
        yield q, mu


def mobius_closed_form(p1: SetPartition, p2: SetPartition) -> int:
    """(-1)^(|p1|-|p2|) * prod (b_i - 1)!, b_i = #blocks of p1 inside block i of p2.

    Returns 0 when p1 is not a refinement of p2.
    """
    if not is_refinement(p1, p2):
        return 0
    lab2 = p2.labels
    counts = np.bincount([lab2[b[0] - 1] for b in p1.blocks], minlength=len(p2))
    return (-1) ** (len(p1) - len(p2)) * math.prod(math.factorial(int(c) - 1) for c in counts)


def _comparable_pairs(idx: PartitionIndex):
    rows, cols, mus = [], [], []
    for i, p in enumerate(idx.order):
        for q, mu in coarsenings(p):
            rows.append(i)
            cols.append(idx.position[q])
            mus.append(mu)
    return np.array(rows), np.array(cols), np.array(mus, dtype=np.int64)


@lru_cache(maxsize=16)
def _zeta_sparse(idx: PartitionIndex) -> sp.csr_matrix:
    rows, cols, _ = _comparable_pairs(idx)
    m = len(idx)
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(m, m))


@lru_cache(maxsize=16)
def _mobius_sparse(idx: PartitionIndex) -> sp.csr_matrix:
    # zeta = I + S with S strictly upper in any linear extension, nilpotent of
    # index <= n, so zeta^-1 = sum_j (-S)^j -- exact in int64.
    z = _zeta_sparse(idx)
    m = len(idx)
    eye = sp.identity(m, dtype=np.int64, format="csr")
    s = (z - eye).tocsr()
    term = eye
    total = eye.copy()
    for _ in range(idx.n):
        term = (-(term @ s)).tocsr()
        term.eliminate_zeros()
        if term.nnz == 0:
            break
        total = total + term
    total.eliminate_zeros()
    return total.tocsr()


def _dense_guard(idx: PartitionIndex) -> None:
    if len(idx) > MAX_DENSE_BELL:
        raise SizeLimitError(f"dense {len(idx)}x{len(idx)} matrix exceeds limit; pass sparse=True")


def zeta_matrix(idx: PartitionIndex, sparse: bool = False):
    """Entry (i, j) = 1 iff idx[i] <= idx[j]."""
    z = _zeta_sparse(idx)
    if sparse:
        return z.copy()
    _dense_guard(idx)
    return z.toarray()


def mobius_matrix(idx: PartitionIndex, sparse: bool = False):
    """Integer inverse of :func:`zeta_matrix`, computed by a Neumann series."""
    mu = _mobius_sparse(idx)
    if sparse:
        return mu.copy()
    _dense_guard(idx)
    return mu.toarray()


def mobius_closed_form_matrix(idx: PartitionIndex, sparse: bool = False):
    rows, cols, mus = _comparable_pairs(idx)
    m = len(idx)
    out = sp.csr_matrix((mus, (rows, cols)), shape=(m, m))
    if sparse:
        return out
    _dense_guard(idx)
    return out.toarray()


def abs_mobius_sum(p: SetPartition, x):
    """sum_{q >= p} |mu(p, q)| x^|q|, summed term by term.

    Equal to the rising factorial x^(|p|); ``x`` may be an int or Fraction.
    """
    total = 0
    for q, mu in coarsenings(p):
        total += abs(mu) * x ** len(q)
    return total


def perm_partition(pi: Sequence[int]) -> SetPartition:
    """Pair partition {{1, k+pi(1)}, ..., {k, k+pi(k)}} of {1..2k}.

    ``pi`` is 0-based: ``pi[i]`` is the image of i.
    """
    k = len(pi)
    if k < 1 or sorted(pi) != list(range(k)):
        raise ArgumentError(f"not a permutation of 0..{k - 1}: {list(pi)}")
    return SetPartition(2 * k, tuple((i + 1, k + pi[i] + 1) for i in range(k)))


def falling_factorial(N: int, n: int) -> int:
    if n < 0:
        raise ArgumentError("n must be nonnegative")
    out = 1
    for j in range(n):
        out *= N - j
    return out


def rising_factorial(x, n: int):
    if n < 0:
        raise ArgumentError("n must be nonnegative")
    out = 1
    for j in range(n):
        out *= x + j
    return out
