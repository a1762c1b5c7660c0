"""Run configuration shared by the CLI and the experiment scripts.

Precedence, lowest first: dataclass defaults, TPX_SEED / TPX_THREADS from
the environment, explicit command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

from .errors import ArgumentError

DEFAULT_TOLERANCES = {
    "power": 1e-9,
    "oracle": 1e-8,
    "idempotence": 1e-10,
    "residual": 1e-4,
}


def _parse_threads(value) -> int | str:
    if value == "auto":
        return "auto"
    try:
        n = int(value)
    except (TypeError, ValueError):
        raise ArgumentError(f"threads must be a positive integer or 'auto', got {value!r}") from None
    if n < 1:
        raise ArgumentError("threads must be positive")
    return n


def _parse_seed(value) -> int:
    try:
        s = int(value)
    except (TypeError, ValueError):
        raise ArgumentError(f"seed must be an integer, got {value!r}") from None
    if not 0 <= s < 2**64:
        raise ArgumentError("seed must fit in 64 unsigned bits")
    return s


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    threads: int | str = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        object.__setattr__(self, "seed", _parse_seed(self.seed))
        object.__setattr__(self, "threads", _parse_threads(self.threads))
        if self.format not in ("json", "csv"):
            raise ArgumentError(f"format must be json or csv, got {self.format!r}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ArgumentError(f"unknown tolerance keys {sorted(unknown)}")
        object.__setattr__(self, "tolerances", {**DEFAULT_TOLERANCES, **self.tolerances})

    @property
    def workers(self) -> int:
        return (os.cpu_count() or 1) if self.threads == "auto" else self.threads

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    @classmethod
    def resolve(cls, env=None, **flags) -> "RunConfig":
        """Defaults, then environment, then any flag that is not None."""
        env = os.environ if env is None else env
        cfg = cls()
        if "TPX_SEED" in env:
            cfg = replace(cfg, seed=env["TPX_SEED"])
        if "TPX_THREADS" in env:
            cfg = replace(cfg, threads=env["TPX_THREADS"])
        given = {k: v for k, v in flags.items() if v is not None}
        if "tolerances" in given:
            given["tolerances"] = {**cfg.tolerances, **given["tolerances"]}
        return replace(cfg, **given)
