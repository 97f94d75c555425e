"""Comparison reductions: POD-Galerkin, balanced truncation, balanced POD, SRSB.

None of these preserves marginal stability in general; they are the
reference points for the structure-preserving methods.
"""

import warnings
from typing import NamedTuple

import numpy as np

from . import kernels
from .exceptions import ContractViolation, InsufficientRank, PreconditionError, RegularizationWarning
from .inner import InnerProductProjector, inner_product_balance
from .lti import LtiSystem

STATE_TRAJECTORY = "state-trajectory"
PRIMAL_IMPULSE = "primal-impulse"
DUAL_IMPULSE = "dual-impulse"


class SnapshotMatrix(NamedTuple):
    """Snapshot columns ``X[:, i] = x(i * dt)``."""

    X: np.ndarray
    dt: float
    origin: str = STATE_TRAJECTORY


def _as_snapshots(X):
    return X.X if isinstance(X, SnapshotMatrix) else kernels.as_matrix(X, "X")


def pod_basis(X, k):
    """POD-Galerkin projector from the leading left singular vectors.

    Parameters
    ----------
    X : SnapshotMatrix or (n, N) array_like
    k : int

    Returns
    -------
    InnerProductProjector
        ``Phi = Psi`` orthonormal, ``M = I_n``, ``N = I_k``.
    """
    X = _as_snapshots(X)
    U, s, _ = kernels.svd(X)
    rank = int(np.sum(s > kernels.RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    if not 1 <= k <= rank:
        raise InsufficientRank(f"requested k={k} but snapshots have numerical rank {rank}")
    Phi = U[:, :k]
    return InnerProductProjector(Phi, Phi, np.eye(X.shape[0]), np.eye(k))


def _require_hurwitz(A, what):
    lmax = np.linalg.eigvals(A).real.max()
    if lmax >= 0:
        raise PreconditionError(f"{what} needs a Hurwitz matrix, max Re(lambda) = {lmax:.6g}")


def _gramian_factors(A, B, C, epsilon):
    n = A.shape[0]
    if epsilon:
        warnings.warn(f"Lyapunov right-hand sides regularized with epsilon={epsilon:g}", RegularizationWarning, stacklevel=3)
    Qo = C.T @ C + epsilon * np.eye(n)
    Qc = B @ B.T + epsilon * np.eye(n)
    Wo = kernels.solve_lyapunov(A, Qo, side="primal")
    Wc = kernels.solve_lyapunov(A, Qc, side="dual")
    return kernels.symmetric_factor(Wo), kernels.symmetric_factor(Wc)


def balanced_truncation(sys, k, epsilon=0.0):
    """Balanced truncation from the exact Gramians.

    ``A^T W_o + W_o A = -(C^T C + eps I)`` and
    ``A W_c + W_c A^T = -(B B^T + eps I)``; the observability factor plays
    the role of ``R`` and the controllability factor that of ``S``.

    Raises
    ------
    PreconditionError
        If ``A`` is not Hurwitz (use :func:`srsb` instead).
    """
    if not isinstance(sys, LtiSystem):
        raise ContractViolation("balanced_truncation expects an LtiSystem")
    _require_hurwitz(sys.A, "balanced truncation")
    R, S = _gramian_factors(sys.A, sys.B, sys.C, epsilon)
    return inner_product_balance(R, S, k)


def impulse_snapshots(A, B, N, dt):
    """``[B, e^{A dt} B, ..., e^{A (N-1) dt} B]`` by exact exponential stepping."""
    A = kernels.as_matrix(A)
    B = kernels.as_matrix(B, "B")
    E = kernels.expm(A, dt)
    cols = [B]
    for _ in range(N - 1):
        cols.append(E @ cols[-1])
    return np.hstack(cols)


def bpod(sys, N, dt, k):
    """Balanced POD from primal and dual impulse-response snapshots.

    ``S = [B, e^{A dt} B, ...]`` and ``R = [C^T, e^{A^T dt} C^T, ...]``
    give empirical Gramians ``S S^T`` and ``R R^T``. Stability of the
    reduced model is not guaranteed.
    """
    S = impulse_snapshots(sys.A, sys.B, N, dt)
    R = impulse_snapshots(sys.A.T, sys.C.T, N, dt)
    if not np.any(S) or not np.any(R):
        raise InsufficientRank("impulse snapshots are identically zero")
    return inner_product_balance(R, S, k)


def srsb(sys, mu, epsilon, k):
    """Shift-reduce-shift-back balancing.

    Gramians of the shifted matrix ``A - mu I`` (optionally regularized by
    ``eps I``) are balanced; the resulting bases are then applied to the
    original, unshifted system by the caller. No stability guarantee.

    Raises
    ------
    PreconditionError
        If ``A - mu I`` is not Hurwitz.
    """
    n = sys.n
    As = sys.A - mu * np.eye(n)
    _require_hurwitz(As, f"SRSB with mu={mu}")
    R, S = _gramian_factors(As, sys.B, sys.C, epsilon)
    return inner_product_balance(R, S, k)
