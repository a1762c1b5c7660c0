"""Weighted generator sets: classical permutation ensembles and quantum ensembles.

JSON layout (images 0-based)::

    {"n": 12, "k": 2, "entries": [
        {"op": {"type": "perm", "image": [2, 0, 1, ...]}, "weight": 0.25},
        {"op": {"type": "fourier"}, "weight": 0.75}]}

Explicit unitaries are stored as ``{"type": "unitary", "re": [[...]], "im": [[...]]}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import InitVar, dataclass
from itertools import permutations
from typing import Sequence, Union

import numpy as np

from .errors import ArgumentError

LOAD_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class Perm:
    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(len(self.image))):
            raise ArgumentError("permutation image is not a bijection on 0..N-1")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.int64)

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty(len(self.image), dtype=np.int64)
        inv[self.array] = np.arange(len(self.image))
        return inv

    def matrix(self) -> np.ndarray:
        """B(pi) = sum_i |pi(i)><i|."""
        n = len(self.image)
        b = np.zeros((n, n))
        b[self.array, np.arange(n)] = 1.0
        return b

    def to_json(self) -> dict:
        return {"type": "perm", "image": list(self.image)}


@dataclass(frozen=True)
class Fourier:
    def matrix(self, N: int) -> np.ndarray:
        m = np.arange(N)
        return np.exp(2j * np.pi * (np.outer(m, m) % N) / N) / math.sqrt(N)

    def to_json(self) -> dict:
        return {"type": "fourier"}


@dataclass(frozen=True, eq=False)
class Explicit:
    unitary: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=np.complex128)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ArgumentError("explicit generator must be a square matrix")
        if np.abs(u.conj().T @ u - np.eye(len(u))).max() > 1e-10:
            raise ArgumentError("explicit generator is not unitary within 1e-10")
        object.__setattr__(self, "unitary", u)

    def matrix(self, N: int | None = None) -> np.ndarray:
        return self.unitary

    def to_json(self) -> dict:
        return {"type": "unitary", "re": self.unitary.real.tolist(), "im": self.unitary.imag.tolist()}


Generator = Union[Perm, Fourier, Explicit]


def _check_weights(weights: Sequence[float], tol: float) -> None:
    if not weights:
        raise ArgumentError("ensemble has no entries")
    if any(w <= 0 for w in weights):
        raise ArgumentError("weights must be positive")
    if abs(math.fsum(weights) - 1.0) > tol:
        raise ArgumentError(f"weights sum to {math.fsum(weights)!r}, not 1 within {tol}")


def generator_from_json(d: dict) -> Generator:
    kind = d.get("type")
    if kind == "perm":
        return Perm(tuple(int(x) for x in d["image"]))
    if kind == "fourier":
        return Fourier()
    if kind == "unitary":
        return Explicit(np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float))
    raise ArgumentError(f"unknown generator type {kind!r}")


@dataclass(frozen=True)
class PermDistribution:
    N: int
    entries: tuple[tuple[Perm, float], ...]
    tol: InitVar[float] = 1e-12

    def __post_init__(self, tol):
        entries = tuple(
            (p if isinstance(p, Perm) else Perm(tuple(int(x) for x in p)), float(w)) for p, w in self.entries
        )
        object.__setattr__(self, "entries", entries)
        _check_weights([w for _, w in entries], tol)
        for p, _ in entries:
            if len(p.image) != self.N:
                raise ArgumentError(f"permutation of length {len(p.image)} in ensemble on N={self.N}")

    @classmethod
    def uniform(cls, images: Sequence[Sequence[int]]) -> "PermDistribution":
        images = list(images)
        return cls(len(images[0]), [(im, 1.0 / len(images)) for im in images])

    @classmethod
    def random(cls, N: int, D: int, seed: int) -> "PermDistribution":
        rng = np.random.default_rng(seed)
        return cls.uniform([rng.permutation(N) for _ in range(D)])

    @classmethod
    def symmetric_group(cls, N: int) -> "PermDistribution":
        if N > 8:
            raise ArgumentError("full symmetric group only enumerated for N <= 8")
        return cls.uniform(list(permutations(range(N))))

    @property
    def D(self) -> int:
        return len(self.entries)

    def to_dict(self) -> dict:
        return {"n": self.N, "entries": [{"op": p.to_json(), "weight": w} for p, w in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "PermDistribution":
        entries = []
        for e in d["entries"]:
            g = generator_from_json(e["op"])
            if not isinstance(g, Perm):
                raise ArgumentError("classical ensemble may only contain permutations")
            entries.append((g, float(e["weight"])))
        return cls(int(d["n"]), entries, tol=LOAD_WEIGHT_TOL)


@dataclass(frozen=True)
class QuantumEnsemble:
    N: int
    k: int
    entries: tuple[tuple[Generator, float], ...]
    tol: InitVar[float] = 1e-12

    def __post_init__(self, tol):
        object.__setattr__(self, "entries", tuple((g, float(w)) for g, w in self.entries))
        _check_weights([w for _, w in self.entries], tol)
        for g, _ in self.entries:
            if isinstance(g, Perm) and len(g.image) != self.N:
                raise ArgumentError("permutation length does not match N")
            if isinstance(g, Explicit) and g.unitary.shape != (self.N, self.N):
                raise ArgumentError("explicit unitary has the wrong shape")

    @classmethod
    def from_classical(cls, nu: PermDistribution, k: int) -> "QuantumEnsemble":
        return cls(nu.N, k, nu.entries)

    @property
    def D(self) -> int:
        return len(self.entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.entries])

    def to_dict(self) -> dict:
        return {"n": self.N, "k": self.k, "entries": [{"op": g.to_json(), "weight": w} for g, w in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "QuantumEnsemble":
        entries = [(generator_from_json(e["op"]), float(e["weight"])) for e in d["entries"]]
        return cls(int(d["n"]), int(d["k"]), entries, tol=LOAD_WEIGHT_TOL)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "QuantumEnsemble":
        return cls.from_dict(json.loads(text))
