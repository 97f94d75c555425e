"""Dense real linear-algebra kernels.

Thin, contract-checked wrappers over LAPACK routines exposed by numpy and
scipy. Everything else in the package goes through these functions so that
tolerances and failure modes are handled in one place.
"""

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.spatial import cKDTree

from .exceptions import (
    ContractViolation,
    IllPosedEquation,
    KernelFailure,
    NotPSDError,
    SingularMatrixError,
)

# singular values below RANK_RTOL * sigma_max count as zero
RANK_RTOL = 1e-12


class SvdResult(NamedTuple):
    """Thin SVD ``A = U @ diag(s) @ V.T``."""

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray


class EigenSystem(NamedTuple):
    """Eigenvalues and right eigenvectors (column ``i`` pairs with ``values[i]``)."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(A, name="A"):
    """Return ``A`` as a finite 2-D float64 array."""
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ContractViolation(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ContractViolation(f"{name} has non-finite entries")
    return A


def _square(A, name="A"):
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ContractViolation(f"{name} must be square, got shape {A.shape}")
    return A


def svd(A):
    """Thin singular value decomposition.

    Parameters
    ----------
    A : (m, n) array_like

    Returns
    -------
    SvdResult
        ``U`` is m x r, ``s`` nonincreasing, ``V`` is n x r with
        ``r = min(m, n)``.
    """
    A = as_matrix(A)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise KernelFailure(f"SVD did not converge for {A.shape[0]}x{A.shape[1]} matrix") from exc
    return SvdResult(U, s, Vt.T)


def eig_real(A):
    """Eigendecomposition of a real square matrix.

    Complex conjugate eigenvalues are returned in adjacent positions, the
    one with positive imaginary part first.
    """
    A = _square(A)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise KernelFailure(f"eigensolver did not converge for {A.shape[0]}x{A.shape[0]} matrix") from exc
    w = np.asarray(w, dtype=complex)
    V = np.asarray(V, dtype=complex)
    # LAPACK already pairs conjugates; enforce the (+, -) order explicitly
    i = 0
    while i < len(w) - 1:
        if w[i].imag != 0.0 and np.isclose(w[i], np.conj(w[i + 1]), rtol=0, atol=1e-12 * max(1.0, abs(w[i]))):
            if w[i].imag < 0:
                w[[i, i + 1]] = w[[i + 1, i]]
                V[:, [i, i + 1]] = V[:, [i + 1, i]]
            i += 2
        else:
            i += 1
    return EigenSystem(w, V)


def _check_sylvester_spectrum(A):
    # operator X -> A^T X + X A has eigenvalues lambda_i + lambda_j
    w = np.linalg.eigvals(A)
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    pts = np.column_stack([w.real, w.imag])
    dist, idx = cKDTree(pts).query(-pts, k=1)
    j = int(np.argmin(dist))
    if dist[j] <= 1e-12 * scale:
        raise IllPosedEquation(
            f"Lyapunov operator singular: eigenvalues {w[j]:.3g} and {w[idx[j]]:.3g} sum to ~0"
        )


def solve_lyapunov(A, Q, side="primal"):
    """Solve a continuous Lyapunov equation.

    ``side='primal'`` solves ``A.T @ X + X @ A = -Q``; ``side='dual'``
    solves ``A @ X + X @ A.T = -Q``.

    Parameters
    ----------
    A : (n, n) array_like
    Q : (n, n) array_like, symmetric
    side : {'primal', 'dual'}

    Returns
    -------
    X : (n, n) ndarray, symmetrized

    Raises
    ------
    IllPosedEquation
        If two eigenvalues of ``A`` sum to (numerically) zero.
    """
    A = _square(A)
    Q = _square(Q, "Q")
    if Q.shape != A.shape:
        raise ContractViolation(f"Q has shape {Q.shape}, expected {A.shape}")
    if side not in ("primal", "dual"):
        raise ContractViolation(f"side must be 'primal' or 'dual', got {side!r}")
    _check_sylvester_spectrum(A)
    # scipy solves M X + X M^H = Q (Bartels-Stewart on the real Schur form)
    M = A.T if side == "primal" else A
    X = sla.solve_continuous_lyapunov(M, -Q)
    return 0.5 * (X + X.T)


def symmetric_factor(Xi, rtol=RANK_RTOL):
    """Rank-revealing symmetric factor ``R`` with ``Xi = R @ R.T``.

    Eigenvalues below ``rtol * lambda_max`` are dropped, so ``R`` has as
    many columns as the numerical rank of ``Xi``.

    Raises
    ------
    NotPSDError
        If the most negative eigenvalue is below ``-rtol * ||Xi||``.
    """
    Xi = _square(Xi, "Xi")
    if not np.allclose(Xi, Xi.T, rtol=0, atol=1e-10 * max(np.abs(Xi).max(), 1e-300)):
        raise ContractViolation("Xi must be symmetric")
    w, V = np.linalg.eigh(0.5 * (Xi + Xi.T))
    wmax = max(np.abs(w).max(initial=0.0), 1e-300)
    if w[0] < -rtol * wmax:
        raise NotPSDError(f"matrix is indefinite, most negative eigenvalue {w[0]:.6g}")
    keep = w > rtol * wmax
    R = V[:, keep] * np.sqrt(w[keep])
    # deterministic sign: largest entry of each column positive
    piv = np.argmax(np.abs(R), axis=0)
    sgn = np.sign(R[piv, np.arange(R.shape[1])])
    sgn[sgn == 0] = 1.0
    return R * sgn


def expm(A, t=1.0):
    """Matrix exponential ``exp(A t)`` (scaling and squaring, Pade core)."""
    A = _square(A)
    if not np.isfinite(t):
        raise ContractViolation("t must be finite")
    return sla.expm(A * t)


def solve_linear(A, B):
    """Solve ``A @ X = B``.

    Raises
    ------
    SingularMatrixError
        If ``A`` is singular or its reciprocal condition number is below
        machine precision.
    """
    A = _square(A)
    B = np.asarray(B, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            return sla.solve(A, B)
        except (np.linalg.LinAlgError, sla.LinAlgWarning) as exc:
            cond = np.linalg.cond(A)
            raise SingularMatrixError(f"singular system, condition number ~{cond:.3g}") from exc


def definiteness(S, tol=1e-12):
    """Classify a symmetric matrix as ``'SPD'``, ``'SPSD'`` or ``'indefinite'``.

    The smallest eigenvalue is compared with ``+-tol * ||S||_2``.
    """
    S = _square(S, "S")
    nrm = np.linalg.norm(S, 2)
    if not np.allclose(S, S.T, rtol=0, atol=max(tol * nrm, 1e-300)):
        raise ContractViolation("S must be symmetric")
    lmin = np.linalg.eigvalsh(0.5 * (S + S.T))[0]
    if lmin > tol * nrm:
        return "SPD"
    if lmin >= -tol * nrm:
        return "SPSD"
    return "indefinite"


def sym_sqrt(S, inverse=False, floor=1e-14):
    """Symmetric square root ``S^(1/2)`` (or ``S^(-1/2)``) of an SPD matrix.

    Eigenvalues below ``floor * lambda_max`` are clipped to that floor.
    """
    S = _square(S, "S")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    w = np.maximum(w, floor * w.max())
    p = -0.5 if inverse else 0.5
    return (V * w**p) @ V.T


def poisson_matrix(n):
    """Canonical Poisson matrix ``[[0, I_n], [-I_n, 0]]``."""
    if n < 1:
        raise ContractViolation("n must be positive")
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J
