"""Exhaustive identity suites behind ``tpx verify``.

Each check compares a computed quantity against an independent value.
``perturb`` names a check whose computed side is nudged before the
comparison; the harness must then report that check as failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import fourier
from .errors import ArgumentError
from .gaps import i_sum_of_squares, i_sum_upper_bound, lemma_gap_lambda_A
from .operators import haar_projector, symmetric_projector
from .partitions import (
    abs_mobius_sum,
    bell_number,
    enumerate_partitions,
    falling_factorial,
    is_refinement,
    mobius_closed_form_matrix,
    mobius_matrix,
    rising_factorial,
)
from .states import TupleSpace, class_size_E, class_size_I


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    error: float

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} (max error {self.error:.3g})"


# a check yields (name, computed, expected, tol); tol 0 means exact equality
Check = tuple[str, object, object, float]


def _mobius(n_max: int, k_max: int) -> Iterator[Check]:
    for n in range(1, n_max + 1):
        idx = enumerate_partitions(n)
        # zeta from the refinement test directly, not from the coarsening generator
        zeta = np.array([[int(is_refinement(p, q)) for q in idx] for p in idx], dtype=np.int64)
        mu = mobius_matrix(idx)
        yield f"zeta*mu=I n={n}", zeta @ mu, np.eye(len(idx), dtype=np.int64), 0
        yield f"mobius closed form n={n}", mobius_closed_form_matrix(idx), mu, 0
        for x in (1, 2, 3):
            lhs = [abs_mobius_sum(p, x) for p in idx]
            yield f"abs mobius sum x={x} n={n}", lhs, [rising_factorial(x, len(p)) for p in idx], 0
        yield f"abs mobius total n={n}", np.abs(mu).sum(axis=1), [math.factorial(len(p)) for p in idx], 0
        yield f"bell <= n! n={n}", max(bell_number(n) - math.factorial(n), 0), 0, 0
        yield f"bell count n={n}", len(idx), bell_number(n), 0


def _counting(n_max: int, k_max: int) -> Iterator[Check]:
    idx4 = enumerate_partitions(4)
    for N in range(6, 13):
        for p in idx4:
            up = sum(falling_factorial(N, len(q)) for q in idx4 if is_refinement(p, q))
            yield f"stirling N={N} p={p}", up, N ** len(p), 0
    for two_k in range(2, min(2 * k_max, 4) + 1, 2):
        idx = enumerate_partitions(two_k)
        for N in range(2, 9):
            yield f"class sizes 2k={two_k} N={N}", sum(class_size_I(p, N) for p in idx), N**two_k, 0
    for n in range(0, min(2 * k_max, 6) + 1):
        for N in (n + 1, 10, 1000, 10**6):
            if N < n:
                continue
            ff = Fraction(falling_factorial(N, n))
            lo = (1 - Fraction(n * n, 2 * N)) * N**n
            # violation amount of lo <= ff <= N^n
            yield f"sandwich n={n} N={N}", float(max(lo - ff, 0) + max(ff - N**n, 0)), 0.0, 0


def _lemmas(n_max: int, k_max: int) -> Iterator[Check]:
    for k in range(1, k_max + 1):
        idx = enumerate_partitions(2 * k)
        pairs = set(fourier.pair_partitions(k))
        for N in [n for n in (5, 8, 16) if n <= max(n_max, 5)]:
            e = fourier.e_matrix(N, k)
            size = np.array([math.sqrt(class_size_E(p, N)) for p in idx])
            b = idx.block_counts
            yield f"nonnegative k={k} N={N}", float(max(-e.min(), 0.0)), 0.0, 1e-12
            yield f"symmetric k={k} N={N}", e, e.T, 1e-12
            bound = float(N) ** (-np.abs(2 * k - (b[:, None] + b[None, :])) / 2)
            yield f"size bound k={k} N={N}", float(np.maximum(e - bound, 0).max()), 0.0, 1e-12
            scaled = size[:, None] * e * size[None, :]
            worst = 0.0
            for i, p1 in enumerate(idx):
                for j, p2 in enumerate(idx):
                    for i2, q1 in enumerate(idx):
                        if not is_refinement(q1, p1):
                            continue
                        for j2, q2 in enumerate(idx):
                            if is_refinement(q2, p2):
                                worst = max(worst, (scaled[i, j] - scaled[i2, j2]) / scaled[i2, j2])
            yield f"monotone k={k} N={N}", worst, 0.0, 1e-12
            worst = 0.0
            for i, p1 in enumerate(idx):
                for j, p2 in enumerate(idx):
                    if b[i] + b[j] != 2 * k:
                        continue
                    if p1 == p2 and p1 in pairs:
                        worst = max(worst, abs(e[i, j] - 1.0))
                    else:
                        worst = max(worst, e[i, j] - 2 * k / N)
            yield f"balanced pairs k={k} N={N}", max(worst, 0.0), 0.0, 1e-12
            if N ** (2 * k) <= 4096:
                dense = np.array([[fourier.e_matrix_element_dense(p, q, N, k) for q in idx] for p in idx])
                yield f"imag part k={k} N={N}", max(abs(v.imag) for v in dense.ravel()), 0.0, 1e-12
                yield f"counting vs dense k={k} N={N}", e, [[v.value for v in row] for row in dense], 1e-10
        c = fourier.vanishing_characterization(k)
        yield f"vanishing common reading k={k}", int(c["common_reading_matches"]), 1, 0


def _oracles(n_max: int, k_max: int) -> Iterator[Check]:
    for k in range(1, k_max + 1):
        for N in range(max(2 * k, 3), n_max + 1):
            if N ** (2 * k) > 4096:
                break
            a = lemma_gap_lambda_A(N, k, "ibasis").lambda_measured
            d = lemma_gap_lambda_A(N, k, "dense").lambda_measured
            yield f"lambda_A two routes k={k} N={N}", a, d, 1e-8
            yield f"I-elements vs dense k={k} N={N}", fourier.i_matrix(N, k), fourier.i_matrix_dense(N, k).real, 1e-10
    if k_max >= 2 and n_max >= 8:
        s = i_sum_of_squares(8, 2)
        yield "I-sum lower k=2 N=8", max(math.factorial(2) - s, 0.0), 0.0, 1e-9
        yield "I-sum upper k=2 N=8", max(s - i_sum_upper_bound(8, 2), 0.0), 0.0, 0


def _projectors(n_max: int, k_max: int) -> Iterator[Check]:
    rng = np.random.Generator(np.random.Philox(0))
    for k in range(1, k_max + 1):
        for N in range(max(k, 2), min(n_max, 6) + 1):
            space = TupleSpace(N, 2 * k)
            s = symmetric_projector(space)
            h = haar_projector(space, k)
            x = rng.standard_normal((space.dim, 3))
            diff = s(x) - h(x)
            yield f"E_SN - E_Haar idempotent k={k} N={N}", s(diff) - h(diff), diff, 1e-10
            yield f"E_Haar rank k={k} N={N}", h.meta["rank"], math.factorial(k), 0
            if N >= 2 * k:
                yield f"E_SN rank k={k} N={N}", s.meta["rank"], bell_number(2 * k), 0


SUITES: dict[str, Callable[[int, int], Iterator[Check]]] = {
    "mobius": _mobius,
    "counting": _counting,
    "lemmas": _lemmas,
    "oracles": _oracles,
    "projectors": _projectors,
}


def _compare(computed, expected, tol: float) -> tuple[bool, float]:
    if tol == 0 and not isinstance(computed, float):
        a, b = np.asarray(computed, dtype=object), np.asarray(expected, dtype=object)
        if a.shape != b.shape:
            return False, math.inf
        diff = [abs(x - y) for x, y in zip(a.ravel(), b.ravel())]
        err = float(max(diff, default=0))
        return err == 0, err
    a, b = np.asarray(computed, dtype=float), np.asarray(expected, dtype=float)
    if a.shape != b.shape:
        return False, math.inf
    err = float(np.abs(a - b).max()) if a.size else 0.0
    return err <= tol, err


def _nudge(value):
    if isinstance(value, (int, float)):
        return value + 1
    arr = np.array(value, dtype=object if np.asarray(value).dtype == object else None, copy=True)
    arr.flat[0] = arr.flat[0] + 1
    return arr


def run_suite(suite: str, n_max: int = 6, k_max: int = 2, perturb: str | None = None) -> list[CheckResult]:
    """Every check in ``suite``.  ``perturb`` is a substring of check names to corrupt."""
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in SUITES:
            raise ArgumentError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    out = []
    for name in names:
        for label, computed, expected, tol in SUITES[name](n_max, k_max):
            if perturb and perturb in label:
                computed = _nudge(computed)
            ok, err = _compare(computed, expected, tol)
            out.append(CheckResult(label, ok, err))
    return out


def first_failure(results: list[CheckResult]) -> CheckResult | None:
    return next((r for r in results if not r.passed), None)
