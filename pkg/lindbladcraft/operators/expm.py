import numpy as np
import scipy.linalg

from lindbladcraft.errors import ConvergenceError, DimensionMismatchError, NonFiniteError
from lindbladcraft.operators.algebra import ComplexMatrix, StateVector

DENSE_LIMIT = 64
KRYLOV_DIM = 30
MAX_KRYLOV_ITERATIONS = 10_000


def expm_action(
    a: ComplexMatrix,
    v: StateVector,
    tol: float = 1e-12,
    dense_limit: int = DENSE_LIMIT,
    krylov_dim: int = KRYLOV_DIM,
) -> StateVector:
    """
    Return exp(a) @ v.

    Matrices up to ``dense_limit`` use scipy's scaling-and-squaring Pade exponential;
    larger ones use a restarted Arnoldi projection with an a posteriori error estimate.
    """
    if tol <= 0:
        raise ValueError(f"Invalid tolerance: {tol}")
    if a.shape[0] != a.shape[1] or a.shape[1] != v.shape[0]:
        raise DimensionMismatchError(f"Cannot apply {a.shape} to {v.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
        raise NonFiniteError("expm_action received non-finite input")

    if a.shape[0] <= dense_limit:
        result = scipy.linalg.expm(a) @ v
    else:
        result = _krylov_expm_action(a, v, tol, min(krylov_dim, a.shape[0]))

    if not np.all(np.isfinite(result)):
        raise NonFiniteError("Matrix exponential produced non-finite entries")
    return result


def _arnoldi(a: ComplexMatrix, v: StateVector, m: int):
    n = v.shape[0]
    beta = float(np.linalg.norm(v))
    basis = np.zeros((n, m + 1), dtype=np.complex128)
    hessenberg = np.zeros((m + 1, m), dtype=np.complex128)
    basis[:, 0] = v / beta
    for j in range(m):
        w = a @ basis[:, j]
        for i in range(j + 1):
            hessenberg[i, j] = np.vdot(basis[:, i], w)
            w = w - hessenberg[i, j] * basis[:, i]
        h_next = float(np.linalg.norm(w))
        hessenberg[j + 1, j] = h_next
        if h_next <= 1e-14 * max(beta, 1.0):
            # happy breakdown: the subspace is invariant
            return basis[:, : j + 1], hessenberg[: j + 1, : j + 1], beta, 0.0
        basis[:, j + 1] = w / h_next
    return basis[:, :m], hessenberg[:m, :m], beta, float(hessenberg[m, m - 1].real)


def _krylov_expm_action(a: ComplexMatrix, v: StateVector, tol: float, m: int) -> StateVector:
    w = v.astype(np.complex128, copy=True)
    remaining = 1.0
    tau = min(1.0, max(m / 4.0, 1.0) / max(float(np.linalg.norm(a, 1)), 1e-300))
    iterations = 0
    while remaining > 1e-15:
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return w
        basis, hessenberg, beta, h_next = _arnoldi(a, w, m)
        tau = min(tau, remaining)
        while True:
            iterations += 1
            if iterations > MAX_KRYLOV_ITERATIONS:
                raise ConvergenceError(
                    f"Krylov exponential did not converge in {MAX_KRYLOV_ITERATIONS} iterations"
                )
            small = scipy.linalg.expm(tau * hessenberg)
            error = beta * tau * h_next * abs(small[-1, 0])
            if error <= tol * norm_w or h_next == 0.0:
                break
            tau /= 2.0
        w = beta * (basis @ small[:, 0])
        remaining -= tau
        if error < 0.1 * tol * norm_w:
            tau *= 2.0
    return w
