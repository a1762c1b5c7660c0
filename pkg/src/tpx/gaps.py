"""Classical and quantum TPE gaps, lambda_A, and the Fourier-mixing bound chain."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import permutations
from typing import Union

import numpy as np

from . import fourier
from .ensembles import Fourier, PermDistribution, QuantumEnsemble
from .errors import ArgumentError, SizeLimitError, UnsupportedRegimeError
from .operators import (
    DENSE_SVD_LIMIT,
    MomentOperator,
    ensemble_moment,
    haar_projector,
    spectral_norm,
)
from .partitions import SetPartition, enumerate_partitions, perm_partition
from .states import TupleSpace, build_state_E, build_state_I, class_mask_I, e_in_i_coeffs

Bound = Union[float, str]
VACUOUS = "vacuous"


def lemma_bound(N: int, k: int) -> float:
    """2 (2k)^(4k) / sqrt(N)."""
    return 2 * (2 * k) ** (4 * k) / math.sqrt(N)


def analytic_eps_a(N: int, k: int) -> float:
    return 1.0 - lemma_bound(N, k)


def _bound_or_vacuous(b: float) -> Bound:
    return VACUOUS if b >= 1.0 else b


@dataclass
class GapReport:
    N: int
    k: int
    D: int | None
    lambda_measured: float
    lambda_bound: Bound | None
    method: str
    residual: float = 0.0
    seed: int | None = None
    epsilon_C: float | None = None
    epsilon_A: float | None = None
    epsilon_Q: float | None = None
    p: float | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "n": self.N,
            "k": self.k,
            "d": self.D,
            "lambda": self.lambda_measured,
            "bound": self.lambda_bound,
            "eps_c": self.epsilon_C,
            "eps_a": self.epsilon_A,
            "p": self.p,
            "method": self.method,
            "residual": self.residual,
            "seed": self.seed,
        }
        if self.epsilon_Q is not None:
            out["eps_q"] = self.epsilon_Q
        if self.details:
            out["details"] = self.details
        return out


# --- classical -------------------------------------------------------------------


INDEX_BYTES_LIMIT = 2**30


def _injective_class_gap(
    nu: PermDistribution, b: int, seed: int, tol: float, max_iter: int, strict: bool
) -> tuple[float, float, bool]:
    """Second singular value of the averaged action on injective b-tuples.

    Every equality class with b blocks is isomorphic (as a permutation
    module) to this one, so its gap is shared by all of them.  Returns
    (value, residual, converged).
    """
    N = nu.N
    space = TupleSpace(N, b)
    cls = np.flatnonzero(class_mask_I(SetPartition.bottom(b), space))
    size = len(cls)
    digits = space.digits[cls]
    weights = N ** np.arange(b - 1, -1, -1)
    if size <= DENSE_SVD_LIMIT:
        m = np.zeros((size, size))
        for p, w in nu.entries:
            img = p.array[digits] @ weights
            m[np.searchsorted(cls, img), np.arange(size)] += w
        m -= 1.0 / size
        return float(np.linalg.svd(m, compute_uv=False)[0]), 0.0, True
    if 2 * nu.D * space.dim * 8 > INDEX_BYTES_LIMIT:
        raise SizeLimitError(f"gather tables for {nu.D} permutations on {space.dim} tuples exceed {INDEX_BYTES_LIMIT} bytes")
    # flat gather tables on the whole space; vectors stay real
    mask = np.zeros(space.dim, dtype=bool)
    mask[cls] = True
    fwd_idx, adj_idx = [], []
    for p, w in nu.entries:
        fwd_idx.append((w, p.inverse[space.digits] @ weights))
        adj_idx.append((w, p.array[space.digits] @ weights))
    u = mask / math.sqrt(size)

    def restrict(x):
        # onto the class, minus its uniform vector
        y = x * mask
        return y - u * (u @ y)

    def gather(table):
        def act(x):
            x = restrict(x)
            return restrict(sum(w * x[i] for w, i in table))

        return act

    op = MomentOperator(space, gather(fwd_idx), gather(adj_idx), "E_nu|class")
    res = spectral_norm(op, tol=tol, seed=seed, dense_limit=0, max_iter=max_iter, strict=strict, real=True)
    return res.value, res.residual, res.converged


def classical_gap(
    nu: PermDistribution,
    copies: int,
    seed: int = 0,
    tol: float = 1e-9,
    max_iter: int = 10_000,
    strict: bool = True,
) -> GapReport:
    """|| E_nu[B^{(x)copies}] - E_{S_N}[B^{(x)copies}] ||_inf, class by class.

    With ``strict=False`` an unconverged class returns its Rayleigh
    estimate, a lower bound on the true value; details record this.
    """
    if copies < 1:
        raise ArgumentError("copies must be positive")
    idx = enumerate_partitions(copies)
    by_blocks = {}
    residual = 0.0
    converged = True
    for b in sorted({len(p) for p in idx if len(p) <= nu.N}):
        if nu.N**b > 2**25:
            raise SizeLimitError(f"class with {b} blocks at N={nu.N} exceeds the dense-vector limit")
        val, res, ok = _injective_class_gap(nu, b, seed, tol, max_iter, strict)
        by_blocks[b] = val
        residual = max(residual, res)
        converged &= ok
    per_class = [(str(p), by_blocks[len(p)]) for p in idx if len(p) in by_blocks]
    lam = max(v for _, v in per_class)
    argmax = next(name for name, v in per_class if v == lam)
    return GapReport(
        N=nu.N,
        k=copies,
        D=nu.D,
        lambda_measured=lam,
        lambda_bound=None,
        method="blockwise",
        residual=residual,
        seed=seed,
        epsilon_C=1.0 - lam,
        details={"copies": copies, "argmax_class": argmax, "converged": converged, "per_class": dict(per_class)},
    )


# --- quantum ---------------------------------------------------------------------


def quantum_gap(ens: QuantumEnsemble, seed: int = 0, tol: float = 1e-9, max_iter: int = 10_000) -> GapReport:
    """|| E_ens[U^{(x)k,k}] - E_Haar ||_inf computed as ||(1-Q) E_ens (1-Q)||.

    Valid because every U^{(x)k,k} fixes the Haar fixed space pointwise.
    """
    if ens.N < ens.k:
        raise UnsupportedRegimeError(f"quantum gap needs N >= k, got N={ens.N}, k={ens.k}")
    space = TupleSpace(ens.N, 2 * ens.k)
    q = haar_projector(space, ens.k)
    res = spectral_norm(ensemble_moment(ens), deflate=q, tol=tol, seed=seed, max_iter=max_iter)
    return GapReport(
        N=ens.N,
        k=ens.k,
        D=ens.D,
        lambda_measured=res.value,
        lambda_bound=None,
        method=res.method,
        residual=res.residual,
        seed=seed,
        epsilon_Q=1.0 - res.value,
        details={"iterations": res.iterations},
    )


# --- lambda_A ----------------------------------------------------------------------


def haar_coordinates(N: int, k: int) -> np.ndarray:
    """Columns: |E_P(pi)> expressed in the orthonormal I-basis (beta_{2k} x k!)."""
    idx = enumerate_partitions(2 * k)
    cols = []
    for pi in permutations(range(k)):
        c = np.zeros(len(idx))
        for q, v in e_in_i_coeffs(perm_partition(pi), N).items():
            c[idx.index(q)] = v
        cols.append(c)
    return np.stack(cols, axis=1)


def _range_projector(c: np.ndarray) -> np.ndarray:
    g = c.T @ c
    return c @ np.linalg.pinv(g, hermitian=True) @ c.T


def lambda_a_ibasis(N: int, k: int, threads: int = 1) -> float:
    m = fourier.i_matrix(N, k, threads)
    comp = np.eye(len(m)) - _range_projector(haar_coordinates(N, k))
    return float(np.linalg.norm(comp @ m @ comp, 2))


def lambda_a_dense(N: int, k: int) -> float:
    """Same quantity from materialized states and an explicit DFT tensor action."""
    space = TupleSpace(N, 2 * k)
    if space.dim > DENSE_SVD_LIMIT:
        raise SizeLimitError(f"dense lambda_A needs N^(2k) <= {DENSE_SVD_LIMIT}, got {space.dim}")
    idx = enumerate_partitions(2 * k)
    basis = np.stack([build_state_I(p, space).amplitudes.real for p in idx if len(p) <= N], axis=1)
    haar = np.stack([build_state_E(perm_partition(pi), space).amplitudes.real for pi in permutations(range(k))], axis=1)
    # orthonormal basis of V_S minus its Haar-fixed part
    qh, _ = np.linalg.qr(haar)
    v0 = basis - qh @ (qh.T @ basis)
    u, s, _ = np.linalg.svd(v0, full_matrices=False)
    w = u[:, s > 1e-8]
    if w.shape[1] == 0:
        return 0.0
    block = w.conj().T @ fourier.apply_fourier_dense(w.astype(np.complex128), N, k)
    return float(np.linalg.svd(block, compute_uv=False)[0])


def lemma_gap_lambda_A(N: int, k: int, method: str = "ibasis", threads: int = 1) -> GapReport:
    if N < 2 * k:
        raise UnsupportedRegimeError(f"lambda_A needs N >= 2k = {2 * k}, got N={N}")
    if method == "ibasis":
        lam = lambda_a_ibasis(N, k, threads)
    elif method == "dense":
        lam = lambda_a_dense(N, k)
    else:
        raise ArgumentError(f"unknown method {method!r}")
    bound = lemma_bound(N, k)
    return GapReport(
        N=N,
        k=k,
        D=None,
        lambda_measured=lam,
        lambda_bound=_bound_or_vacuous(bound),
        method=method,
        epsilon_A=1.0 - lam,
        details={"bound_value": bound, "analytic_eps_a": 1.0 - bound},
    )


def i_sum_of_squares(N: int, k: int) -> float:
    """sum over partition pairs of |<I_p1|F|I_p2>|^2."""
    return float((fourier.i_matrix(N, k) ** 2).sum())


def i_sum_upper_bound(N: int, k: int) -> float:
    """k! + beta_{2k}^2 * 4 ((2k)!)^2 / N."""
    beta = len(enumerate_partitions(2 * k))
    return math.factorial(k) + beta**2 * 4 * math.factorial(2 * k) ** 2 / N


# --- bound chain ---------------------------------------------------------------------


def combine_gap_bound(eps_C: float, eps_A: float, p: float) -> float:
    """1 - (eps_A / 12) min(p eps_C, 1 - p).

    eps_C and eps_A may equal 1 (a gap of zero); p must lie strictly
    inside (0, 1).
    """
    if not (0 < eps_C <= 1 and 0 < eps_A <= 1 and 0 < p < 1):
        raise ArgumentError(f"need 0 < eps_C, eps_A <= 1 and 0 < p < 1; got {eps_C}, {eps_A}, {p}")
    return 1.0 - eps_A / 12.0 * min(p * eps_C, 1.0 - p)


def theorem_construction(
    nu_C: PermDistribution,
    k: int,
    p: float | str = "auto",
    measure: bool = True,
    seed: int = 0,
    tol: float = 1e-9,
    classical_max_iter: int = 10_000,
) -> tuple[QuantumEnsemble, GapReport]:
    """Mix nu_C with a point mass on F: p nu_C + (1 - p) delta_F.

    eps_C is measured from the 2k-copy classical gap.  If that power
    iteration stalls, its Rayleigh estimate is used: it can only
    understate lambda_C, which makes the predicted bound smaller and the
    check against it stricter.  When the analytic eps_A is not positive,
    the measured 1 - lambda_A is used instead and the report says so.
    """
    N = nu_C.N
    classical = classical_gap(nu_C, 2 * k, seed=seed, tol=tol, max_iter=classical_max_iter, strict=False)
    eps_c = classical.epsilon_C
    if p == "auto":
        if eps_c <= 0:
            raise ArgumentError("p='auto' needs a positive classical gap")
        p = 1.0 / (1.0 + eps_c)
    p = float(p)
    if not 0 < p < 1:
        raise ArgumentError(f"p must lie in (0, 1), got {p}")
    entries = [(g, p * w) for g, w in nu_C.entries] + [(Fourier(), 1.0 - p)]
    ens = QuantumEnsemble(N, k, entries)

    eps_a = analytic_eps_a(N, k)
    source = "analytic"
    if eps_a <= 0:
        warnings.warn(f"analytic eps_A = {eps_a:.4g} <= 0 at N={N}, k={k}; certificate uses measured eps_A")
        source = "measured-eps_a"
        eps_a = 1.0 - lemma_gap_lambda_A(N, k).lambda_measured
    bound: Bound | None
    if 0 < eps_c <= 1 and 0 < eps_a <= 1:
        bound = combine_gap_bound(eps_c, eps_a, p)
    else:
        bound = VACUOUS
    lam = None
    residual = 0.0
    method = "predicted"
    details = {
        "eps_a_source": source,
        "lambda_c": classical.lambda_measured,
        "lambda_c_converged": classical.details["converged"],
        "lambda_c_residual": classical.residual,
    }
    if measure:
        q = quantum_gap(ens, seed=seed, tol=tol)
        lam, residual, method = q.lambda_measured, q.residual, q.method
        details["iterations"] = q.details.get("iterations")
    report = GapReport(
        N=N,
        k=k,
        D=ens.D,
        lambda_measured=lam,
        lambda_bound=bound,
        method=method,
        residual=residual,
        seed=seed,
        epsilon_C=eps_c,
        epsilon_A=eps_a,
        epsilon_Q=None if bound == VACUOUS else 1.0 - bound,
        p=p,
        details=details,
    )
    return ens, report
