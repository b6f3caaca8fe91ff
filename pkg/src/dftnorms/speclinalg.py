"""Spectral and Frobenius norms, Gram eigenvalues, condition numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrixcore import DomainError, GramMatrix

DENSE_SVD_MAX_DIM = 128
DEFAULT_TOL = 1e-10
MAX_POWER_ITERATIONS = 10_000


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str  # "power_iteration" | "dense_svd"
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True

    def __float__(self) -> float:
        return self.value


def largest_singular_value(m: np.ndarray) -> float:
    """Dense LAPACK path, used as the oracle and by the Monte Carlo drivers."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def batch_largest_singular_values(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of each matrix in a ``(k, p, q)`` stack."""
    if stack.shape[0] == 0:
        return np.zeros(0)
    if stack.shape[1] == 0 or stack.shape[2] == 0:
        return np.zeros(stack.shape[0])
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def power_iteration(m: np.ndarray, tol: float = DEFAULT_TOL,
                    max_iter: int = MAX_POWER_ITERATIONS) -> NormResult:
    """Power iteration on ``M^* M`` from the normalized all-ones vector.

    Stops when successive singular value estimates differ by at most
    ``tol`` and the geometric extrapolation of the remaining steps is also
    within ``tol``.  After ``max_iter`` steps the last iterate is returned with
    ``converged=False`` and its residual.
    """
    rows, cols = m.shape
    if m.size == 0:
        return NormResult(0.0, "power_iteration", 0, 0.0, True)
    v = np.ones(cols, dtype=np.complex128) / math.sqrt(cols)
    mv = m @ v
    lam = float(np.vdot(mv, mv).real)
    if lam == 0.0:
        # fallback start: e_1, then the heaviest column if e_1 is in the kernel
        col_norms = np.linalg.norm(m, axis=0)
        for j in (0, int(np.argmax(col_norms))):
            v = np.zeros(cols, dtype=np.complex128)
            v[j] = 1.0
            mv = m @ v
            lam = float(np.vdot(mv, mv).real)
            if lam > 0.0:
                break
        else:
            return NormResult(0.0, "power_iteration", 0, 0.0, True)
    sigma = math.sqrt(lam)
    residual = math.inf
    prev_step = math.inf
    it = 0
    while it < max_iter:
        it += 1
        w = m.conj().T @ mv
        v = w / np.linalg.norm(w)
        mv = m @ v
        new_sigma = math.sqrt(float(np.vdot(mv, mv).real))
        step = abs(new_sigma - sigma)
        sigma = new_sigma
        # steps shrink geometrically at rate rho; remaining error ~ step * rho / (1 - rho)
        rho = step / prev_step if prev_step > 0 else 0.0
        tail = step * rho / (1.0 - rho) if rho < 1.0 else math.inf
        residual = max(step, tail)
        prev_step = step
        if residual <= tol:
            return NormResult(sigma, "power_iteration", it, residual, True)
    return NormResult(sigma, "power_iteration", it, residual, False)


def spectral_norm(m: np.ndarray, tol: float = DEFAULT_TOL, method: str = "auto") -> NormResult:
    """Largest singular value of ``m``.

    ``method="auto"`` uses the dense SVD when the smaller dimension is at
    most 128 and power iteration otherwise.  An empty matrix has norm 0.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise DomainError(f"expected a 2-d array, got shape {m.shape}")
    if m.size == 0:
        return NormResult(0.0, "dense_svd" if method != "power_iteration" else method, 0, 0.0)
    if method == "auto":
        method = "dense_svd" if min(m.shape) <= DENSE_SVD_MAX_DIM else "power_iteration"
    if method == "dense_svd":
        return NormResult(largest_singular_value(m), "dense_svd", 0, 0.0)
    if method == "power_iteration":
        return power_iteration(m, tol)
    raise DomainError(f"unknown method {method!r}")


def frobenius_norm(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(math.sqrt(math.fsum(np.abs(m).ravel() ** 2)))


def condition_number(sigma: float) -> float:
    """``(1 + sigma) / (1 - sigma)``; infinite once ``sigma >= 1 - 1e-12``."""
    # norms of unit-modulus blocks can overshoot 1 by a few ulps
    if not 0.0 <= sigma <= 1.0 + 1e-12:
        raise DomainError(f"sigma must lie in [0, 1], got {sigma}")
    if sigma >= 1.0 - 1e-12:
        return math.inf
    return (1.0 + sigma) / (1.0 - sigma)


def gram_extreme_eigenvalues(g: GramMatrix) -> tuple[float, float]:
    return g.extreme_eigenvalues()
