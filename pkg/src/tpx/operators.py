"""Matrix-free moment operators on C^(N^c) and their spectral norms.

Vectors are flat arrays of length N^c, or (N^c, b) blocks of column
vectors; operators reshape to an (N,)*c tensor and act factor by factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .ensembles import Explicit, Fourier, Perm, PermDistribution, QuantumEnsemble
from .errors import ArgumentError, ConvergenceError, IllConditionedError
from .partitions import join, perm_partition
from .states import TupleSpace, build_state_E

DENSE_SVD_LIMIT = 4096
GRAM_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class MomentOperator:
    space: TupleSpace
    _apply: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _adjoint: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    name: str = ""
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.space.dim

    def _check(self, x):
        x = getattr(x, "amplitudes", x)
        x = np.asarray(x)
        if x.shape[0] != self.dim:
            raise ArgumentError(f"vector of length {x.shape[0]} on a {self.dim}-dimensional space")
        return x

    def apply(self, x) -> np.ndarray:
        return self._apply(self._check(x))

    def adjoint_apply(self, x) -> np.ndarray:
        return self._adjoint(self._check(x))

    __call__ = apply

    def adjoint(self) -> "MomentOperator":
        return MomentOperator(self.space, self._adjoint, self._apply, f"({self.name})^dag", self.meta)

    def dense(self, chunk: int = 512) -> np.ndarray:
        self.space.check_dense()
        n = self.dim
        out = np.empty((n, n), dtype=np.complex128)
        for start in range(0, n, chunk):
            stop = min(start + chunk, n)
            block = np.zeros((n, stop - start), dtype=np.complex128)
            block[np.arange(start, stop), np.arange(stop - start)] = 1.0
            out[:, start:stop] = self._apply(block)
        return out

    def __matmul__(self, other: "MomentOperator") -> "MomentOperator":
        return MomentOperator(
            self.space,
            lambda x: self._apply(other._apply(x)),
            lambda x: other._adjoint(self._adjoint(x)),
            f"{self.name}*{other.name}",
        )


def _tensor(x: np.ndarray, space: TupleSpace) -> np.ndarray:
    return x.reshape(space.shape + (-1,))


def identity(space: TupleSpace) -> MomentOperator:
    return MomentOperator(space, lambda x: x.copy(), lambda x: x.copy(), "I")


def linear_combination(space: TupleSpace, terms, name: str = "") -> MomentOperator:
    """sum_i w_i op_i for ``terms`` = [(w_i, op_i)]."""
    terms = list(terms)

    def fwd(x):
        out = None
        for w, op in terms:
            y = w * op._apply(x)
            out = y if out is None else out + y
        return out

    def adj(x):
        out = None
        for w, op in terms:
            y = np.conj(w) * op._adjoint(x)
            out = y if out is None else out + y
        return out

    return MomentOperator(space, fwd, adj, name)


def deflated(op: MomentOperator, projector: MomentOperator | None) -> MomentOperator:
    """(1 - Q) op (1 - Q) for an orthogonal projector Q."""
    if projector is None:
        return op

    def comp(x):
        return x - projector._apply(x)

    return MomentOperator(
        op.space,
        lambda x: comp(op._apply(comp(x))),
        lambda x: comp(op._adjoint(comp(x))),
        f"(1-Q){op.name}(1-Q)",
    )


# --- single generators -------------------------------------------------------


def perm_action(image: np.ndarray, space: TupleSpace) -> MomentOperator:
    inv = np.empty_like(image)
    inv[image] = np.arange(len(image))

    def fwd(x):
        # (B x)[pi(a), pi(b), ...] = x[a, b, ...]
        t = _tensor(x, space)
        for ax in range(space.copies):
            t = np.take(t, inv, axis=ax)
        return t.reshape(x.shape)

    def adj(x):
        t = _tensor(x, space)
        for ax in range(space.copies):
            t = np.take(t, image, axis=ax)
        return t.reshape(x.shape)

    return MomentOperator(space, fwd, adj, "B(pi)")


def fourier_layer(space: TupleSpace, k: int) -> MomentOperator:
    """F on factors 1..k and conj(F) on factors k+1..2k, via FFTs."""
    if space.copies != 2 * k:
        raise ArgumentError(f"Fourier layer with k={k} needs {2 * k} factors, space has {space.copies}")
    # (F x)_n = N^-1/2 sum_m omega^(nm) x_m is the orthonormal inverse DFT
    first, last = tuple(range(k)), tuple(range(k, 2 * k))

    def fwd(x):
        t = _tensor(x.astype(np.complex128, copy=False), space)
        t = np.fft.ifftn(t, axes=first, norm="ortho")
        t = np.fft.fftn(t, axes=last, norm="ortho")
        return t.reshape(x.shape)

    def adj(x):
        t = _tensor(x.astype(np.complex128, copy=False), space)
        t = np.fft.fftn(t, axes=first, norm="ortho")
        t = np.fft.ifftn(t, axes=last, norm="ortho")
        return t.reshape(x.shape)

    return MomentOperator(space, fwd, adj, "F")


def _explicit_action(u: np.ndarray, space: TupleSpace, k: int) -> MomentOperator:
    if space.copies != 2 * k:
        raise ArgumentError("explicit generator needs 2k factors")

    def act(x, mats):
        t = _tensor(x.astype(np.complex128, copy=False), space)
        for ax, m in enumerate(mats):
            t = np.moveaxis(np.tensordot(m, t, axes=([1], [ax])), 0, ax)
        return t.reshape(x.shape)

    fwd_mats = [u] * k + [u.conj()] * k
    adj_mats = [u.conj().T] * k + [u.T] * k
    return MomentOperator(space, lambda x: act(x, fwd_mats), lambda x: act(x, adj_mats), "U")


def generator_action(g, space: TupleSpace, k: int) -> MomentOperator:
    if isinstance(g, Perm):
        return perm_action(g.array, space)
    if isinstance(g, Fourier):
        return fourier_layer(space, k)
    if isinstance(g, Explicit):
        return _explicit_action(g.unitary, space, k)
    raise ArgumentError(f"unknown generator {g!r}")


# --- ensemble averages ---------------------------------------------------------


def permutation_moment(nu: PermDistribution, copies: int) -> MomentOperator:
    """E_{pi ~ nu}[B(pi)^{(x) copies}]."""
    space = TupleSpace(nu.N, copies)
    space.check_dense()
    op = linear_combination(space, [(w, perm_action(p.array, space)) for p, w in nu.entries], "E_nu")
    return op


def ensemble_moment(ens: QuantumEnsemble) -> MomentOperator:
    """E_{U ~ ens}[U^{(x)k} (x) conj(U)^{(x)k}]."""
    space = TupleSpace(ens.N, 2 * ens.k)
    space.check_dense()
    return linear_combination(space, [(w, generator_action(g, space, ens.k)) for g, w in ens.entries], "E_ens")


def symmetric_projector(space: TupleSpace) -> MomentOperator:
    """Projector onto span{|I_P>}: averages amplitudes over each equality class."""
    _, labels = np.unique(space.pattern_codes, return_inverse=True)
    labels = labels.ravel()
    counts = np.bincount(labels)
    s = sp.csr_matrix((np.ones(space.dim), (np.arange(space.dim), labels)), shape=(space.dim, len(counts)))
    st = s.T.tocsr()
    inv = 1.0 / counts

    def fwd(x):
        sums = st @ x
        sums = sums * (inv if x.ndim == 1 else inv[:, None])
        return s @ sums

    return MomentOperator(space, fwd, fwd, "E_SN", {"rank": len(counts)})


def haar_gram(N: int, k: int) -> np.ndarray:
    """<E_P(pi)|E_P(sigma)> = N^(|P(pi) v P(sigma)| - k)."""
    pairs = [perm_partition(pi) for pi in permutations(range(k))]
    return np.array([[float(N) ** (len(join(a, b)) - k) for b in pairs] for a in pairs])


def haar_projector(space: TupleSpace, k: int, allow_singular: bool = False) -> MomentOperator:
    """Orthogonal projector onto span{|E_P(pi)> : pi in S_k}.

    The spanning states are not orthogonal, so the projector is
    E G^+ E^dag with G their Gram matrix.  For N < k the Gram matrix is
    singular; that regime raises unless ``allow_singular`` is set.
    """
    if space.copies != 2 * k:
        raise ArgumentError(f"Haar projector with k={k} needs {2 * k} factors")
    N = space.N
    gram = haar_gram(N, k)
    cond = np.linalg.cond(gram)
    singular = not np.isfinite(cond) or cond > GRAM_COND_LIMIT
    if singular and not allow_singular:
        raise IllConditionedError(f"Gram matrix of the Haar fixed states has condition {cond:.3g} (N={N}, k={k})")
    ginv = np.linalg.pinv(gram, hermitian=True)
    pairs = [perm_partition(pi) for pi in permutations(range(k))]
    states = np.stack([build_state_E(p, space).amplitudes.real for p in pairs], axis=1)

    def fwd(x):
        return states @ (ginv @ (states.T @ x))

    rank = int(np.linalg.matrix_rank(gram, hermitian=True))
    meta = {"rank": rank, "gram": gram, "condition": float(cond), "singular": bool(singular)}
    return MomentOperator(space, fwd, fwd, "E_Haar", meta)


# --- Haar sampling (validation only) --------------------------------------------


def haar_unitary(N: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """QR of a complex Ginibre matrix with the phases of diag(R) removed."""
    shape = (N, N) if size is None else (size, N, N)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def haar_moment_monte_carlo(N: int, k: int, samples: int, seed: int, batch: int = 2000) -> np.ndarray:
    """Sample mean of U^{(x)k,k} as a dense N^2k x N^2k matrix."""
    rng = np.random.Generator(np.random.Philox(seed))
    d = N**k
    acc = np.zeros((d * d, d * d), dtype=np.complex128)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        us = haar_unitary(N, rng, b)
        x = us
        for _ in range(k - 1):
            x = np.einsum("sab,scd->sacbd", x, us).reshape(b, x.shape[1] * N, x.shape[2] * N)
        v = x.reshape(b, d * d)
        # sum_s vec(X_s) vec(conj X_s)^T, then regroup indices into X (x) conj X
        acc += v.T @ v.conj()
        done += b
    acc /= samples
    # acc[(a,e),(c,g)] = mean X[a,e] conj(X)[c,g]; want M[(a,c),(e,g)]
    m = acc.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)
    return m


# --- norms --------------------------------------------------------------------


@dataclass(frozen=True)
class NormResult:
    value: float
    residual: float
    iterations: int
    method: str
    converged: bool = True

    def __float__(self) -> float:
        return self.value


def spectral_norm(
    op: MomentOperator,
    deflate: MomentOperator | None = None,
    tol: float = 1e-9,
    max_iter: int = 10_000,
    seed: int = 0,
    dense_limit: int = DENSE_SVD_LIMIT,
    residual_tol: float = 1e-4,
    strict: bool = True,
    real: bool = False,
) -> NormResult:
    """Largest singular value of (1 - Q) op (1 - Q).

    Dense SVD up to ``dense_limit``; otherwise power iteration on A^dag A
    from a Philox-seeded start, stopped when the singular-value estimate
    changes by less than ``tol`` (relative) and the eigen-residual of
    A^dag A is below ``residual_tol`` (relative).

    With ``strict=False`` an unconverged run returns its last Rayleigh
    estimate, which never exceeds the true norm, flagged ``converged=False``.
    ``real`` starts from a real vector, for operators with real entries.
    """
    a = deflated(op, deflate)
    if a.dim <= dense_limit:
        s = np.linalg.svd(a.dense(), compute_uv=False)
        return NormResult(float(s[0]), 0.0, 0, "dense")
    rng = np.random.Generator(np.random.Philox(seed))
    v = rng.standard_normal(a.dim)
    if not real:
        v = v + 1j * rng.standard_normal(a.dim)
    v /= np.linalg.norm(v)
    sigma_old = 0.0
    residual = math.inf
    for it in range(1, max_iter + 1):
        w = a._adjoint(a._apply(v))
        rho = float(np.vdot(v, w).real)
        sigma = math.sqrt(max(rho, 0.0))
        wn = np.linalg.norm(w)
        if wn == 0.0:
            return NormResult(0.0, 0.0, it, "power")
        residual = float(np.linalg.norm(w - rho * v) / wn)
        if abs(sigma - sigma_old) <= tol * max(sigma, 1e-300) and residual <= residual_tol:
            return NormResult(sigma, residual, it, "power")
        sigma_old = sigma
        v = w / wn
    if not strict:
        return NormResult(sigma_old, residual, max_iter, "power", converged=False)
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps (residual {residual:.3g})",
        last_iterate=v,
        residual=residual,
        iterations=max_iter,
    )
