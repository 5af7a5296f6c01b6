"""Ground-energy computation on full and pinned spaces.

The dense path (LAPACK ``eigh``) is the authoritative oracle at small sizes;
the iterative path is a Lanczos iteration with full reorthogonalization,
matrix-free Pauli application, and a seeded start vector, so results are
deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ConvergenceError, PreconditionError, ResourceLimitError
from .pauli import DENSE_QUBIT_CEILING, HamiltonianSum
from .pinning import PinSpec, PromiseBounds, effective_sum

ITERATIVE_QUBIT_CEILING = 20

YES = "YES"
NO = "NO"
GAP_VIOLATION = "GAP_VIOLATION"


@dataclass
class SpectralResult:
    value: float
    vector: np.ndarray | None
    method: str
    residual: float
    iterations: int = 0


def _as_matvec(obj):
    """Return (matvec, dim, hermitian_checked) for a sum or matrix input."""
    if isinstance(obj, HamiltonianSum):
        dim = 1 << obj.n
        return obj.apply, dim
    if sp.issparse(obj):
        if (abs(obj - obj.getH()) > 1e-10).nnz:
            raise PreconditionError("matrix input is not Hermitian")
        return (lambda v: obj @ v), obj.shape[0]
    mat = np.asarray(obj)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise PreconditionError("matrix input must be square")
    if not np.allclose(mat, mat.conj().T, atol=1e-10):
        raise PreconditionError("matrix input is not Hermitian")
    return (lambda v: mat @ v), mat.shape[0]


def _dense_matrix(obj) -> np.ndarray:
    if isinstance(obj, HamiltonianSum):
        if obj.n > DENSE_QUBIT_CEILING:
            raise ResourceLimitError(
                f"{obj.n} qubits exceeds the dense ceiling of {DENSE_QUBIT_CEILING}"
            )
        return obj.to_matrix(dense=True)
    if sp.issparse(obj):
        return obj.toarray()
    return np.asarray(obj)


def _lanczos_min(matvec, dim, seed=0, tol=1e-10, residual_tol=1e-8,
                 block_size=64, max_cycles=80):
    """Smallest eigenpair by restarted Lanczos with full reorthogonalization."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    # real Krylov basis suffices when the operator maps real to real
    probe = matvec(v)
    basis_dtype = complex if np.iscomplexobj(probe) else float
    iterations = 1
    theta_prev = np.inf
    for _ in range(max_cycles):
        m = min(dim, block_size)
        V = np.zeros((dim, m), dtype=basis_dtype)
        alphas = []
        betas = []
        V[:, 0] = v
        w = None
        used = 0
        for k in range(m):
            used = k + 1
            w = matvec(V[:, k])
            iterations += 1
            alpha = float(np.real(np.vdot(V[:, k], w)))
            alphas.append(alpha)
            w = w - alpha * V[:, k]
            if k > 0:
                w = w - betas[-1] * V[:, k - 1]
            # full reorthogonalization, twice for stability
            for _ in range(2):
                w = w - V[:, : k + 1] @ (V[:, : k + 1].conj().T @ w)
            beta = float(np.linalg.norm(w))
            if k + 1 < m:
                if beta < 1e-14:
                    break
                betas.append(beta)
                V[:, k + 1] = w / beta
        T = np.diag(alphas)
        for i, b in enumerate(betas[: used - 1]):
            T[i, i + 1] = b
            T[i + 1, i] = b
        evals, evecs = np.linalg.eigh(T[:used, :used])
        theta = float(evals[0])
        ritz = V[:, :used] @ evecs[:, 0]
        ritz /= np.linalg.norm(ritz)
        resid = float(np.linalg.norm(matvec(ritz) - theta * ritz))
        if abs(theta - theta_prev) < tol and resid <= residual_tol:
            return theta, ritz, resid, iterations
        theta_prev = theta
        v = ritz
    if resid <= residual_tol:
        return theta, ritz, resid, iterations
    raise ConvergenceError(
        f"Lanczos did not converge: residual {resid:.2e} after {iterations} matvecs"
    )


def min_eig(obj, method="auto", seed=0, with_vector=True) -> SpectralResult:
    """Smallest eigenvalue of a Hamiltonian sum or an explicit Hermitian matrix.

    ``method`` is one of ``auto`` (dense when it fits, else iterative),
    ``dense``, or ``iterative``.
    """
    matvec, dim = _as_matvec(obj)
    if method == "auto":
        small = dim <= (1 << DENSE_QUBIT_CEILING)
        method = "dense" if small else "iterative"
    if method == "dense":
        mat = _dense_matrix(obj)
        if mat.size == 1:
            val = float(np.real(mat[0, 0]))
            vec = np.ones(1)
            return SpectralResult(val, vec if with_vector else None, "dense", 0.0)
        evals, evecs = scipy.linalg.eigh(mat)
        val = float(evals[0])
        vec = evecs[:, 0]
        resid = float(np.linalg.norm(mat @ vec - val * vec))
        return SpectralResult(val, vec if with_vector else None, "dense", resid)
    if method == "iterative":
        if isinstance(obj, HamiltonianSum) and obj.n > ITERATIVE_QUBIT_CEILING:
            raise ResourceLimitError(
                f"{obj.n} qubits exceeds the iterative ceiling of {ITERATIVE_QUBIT_CEILING}"
            )
        if dim == 1:
            val = float(np.real(matvec(np.ones(1))[0]))
            return SpectralResult(val, np.ones(1) if with_vector else None, "iterative", 0.0)
        theta, vec, resid, iters = _lanczos_min(matvec, dim, seed=seed)
        return SpectralResult(theta, vec if with_vector else None, "iterative", resid, iters)
    raise ValueError(f"unknown method {method!r}")


def pinned_min_energy(h: HamiltonianSum, pin: PinSpec, method="auto", seed=0) -> SpectralResult:
    """min over psi of <psi,phi|H|psi,phi>, via the effective operator."""
    eff = effective_sum(h, pin)
    return min_eig(eff, method=method, seed=seed)


def promise_decide(h: HamiltonianSum, pin: PinSpec, bounds: PromiseBounds,
                   method="auto", seed=0) -> str:
    """YES if the pinned minimum is <= a, NO if >= b, GAP_VIOLATION between."""
    value = pinned_min_energy(h, pin, method=method, seed=seed).value
    if value <= bounds.a:
        return YES
    if value >= bounds.b:
        return NO
    return GAP_VIOLATION
