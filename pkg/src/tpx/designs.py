"""Approximate unitary k-designs by iterating a tensor product expander.

Iterating means m-fold convolution of the ensemble: words of m independent
draws, whose moment operator is exactly (E_nu)^m.  Nothing here enumerates
the D^m words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .ensembles import Perm, QuantumEnsemble
from .errors import ArgumentError, NoMixingError, SizeLimitError
from .operators import DENSE_SVD_LIMIT, MomentOperator, ensemble_moment, haar_projector


def _within(N: int, k: int, lam: float, eps: float, m: int) -> bool:
    # exact rational comparison N^(2k) lam^m <= eps
    return Fraction(N) ** (2 * k) * Fraction(lam) ** m <= Fraction(eps)


def iteration_count(N: int, k: int, lam: float, eps: float) -> int:
    """Smallest m >= 1 with N^(2k) lam^m <= eps."""
    if not lam < 1:
        raise NoMixingError(f"lambda = {lam} does not contract; no finite iteration count")
    if not lam > 0:
        if lam < 0:
            raise ArgumentError("lambda must be nonnegative")
        return 1
    if not eps > 0:
        raise ArgumentError("epsilon must be positive")
    guess = math.log(N ** (2 * k) / eps) / math.log(1 / lam)
    m = max(1, math.ceil(guess))
    # float logs can land one off either side of an exact boundary
    while m > 1 and _within(N, k, lam, eps, m - 1):
        m -= 1
    while not _within(N, k, lam, eps, m):
        m += 1
    return m


class _Power:
    def __init__(self, base: MomentOperator, m: int):
        self.base, self.m = base, m

    def fwd(self, x):
        for _ in range(self.m):
            x = self.base._apply(x)
        return x

    def adj(self, x):
        for _ in range(self.m):
            x = self.base._adjoint(x)
        return x


def iterate_moment(ens: QuantumEnsemble, m: int) -> MomentOperator:
    """(E_nu)^m, applied as m successive applications of E_nu."""
    if m < 1:
        raise ArgumentError("m must be at least 1")
    base = ensemble_moment(ens)
    p = _Power(base, m)
    return MomentOperator(base.space, p.fwd, p.adj, f"(E_ens)^{m}", {"m": m})


def _dense_difference(op: MomentOperator, k: int) -> np.ndarray:
    if op.dim > DENSE_SVD_LIMIT:
        raise SizeLimitError(f"design distance needs the full spectrum; dimension {op.dim} > {DENSE_SVD_LIMIT}")
    return op.dense() - haar_projector(op.space, k).dense()


def design_distance_1norm(op: MomentOperator, k: int) -> float:
    """Schatten 1-norm of op - E_Haar."""
    return float(np.linalg.svd(_dense_difference(op, k), compute_uv=False).sum())


def design_distances(op: MomentOperator, k: int) -> tuple[float, float]:
    """(1-norm, operator norm) of op - E_Haar from one SVD."""
    s = np.linalg.svd(_dense_difference(op, k), compute_uv=False)
    return float(s.sum()), float(s[0])


def sample_word(ens: QuantumEnsemble, m: int, seed: int) -> list[int]:
    """m i.i.d. generator indices; the design element is U_w[0] U_w[1] ... U_w[m-1]."""
    if m < 1:
        raise ArgumentError("m must be at least 1")
    rng = np.random.Generator(np.random.Philox(seed))
    w = ens.weights
    return [int(i) for i in rng.choice(len(w), size=m, p=w / w.sum())]


def word_unitary(ens: QuantumEnsemble, word) -> np.ndarray:
    """N x N product of the generators in ``word`` (rightmost acts first)."""
    u = np.eye(ens.N, dtype=np.complex128)
    for i in word:
        g = ens.entries[i][0]
        u = u @ (g.matrix() if isinstance(g, Perm) else g.matrix(ens.N))
    return u


@dataclass(frozen=True)
class DesignSpec:
    base: QuantumEnsemble
    m: int
    epsilon_target: float
    lambda_used: float

    def __post_init__(self):
        if self.m < 1:
            raise ArgumentError("m must be at least 1")
        if not 0 < self.lambda_used < 1:
            raise ArgumentError(f"lambda_used must lie in (0, 1), got {self.lambda_used}")

    @property
    def word_count(self) -> int:
        return self.base.D**self.m

    @classmethod
    def build(cls, base: QuantumEnsemble, eps: float, lam: float) -> "DesignSpec":
        return cls(base, iteration_count(base.N, base.k, lam, eps), eps, lam)

    def to_dict(self, base_ref: str) -> dict:
        return {
            "base": base_ref,
            "m": self.m,
            "epsilon": self.epsilon_target,
            "lambda_used": self.lambda_used,
            "word_count": str(self.word_count),
        }
