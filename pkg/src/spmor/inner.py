"""Inner-product projection and balancing for asymptotically stable systems.

A Petrov-Galerkin pair ``(Phi, Psi)`` is an inner-product projection when
``Phi.T @ M @ Phi = N`` and ``Psi = M @ Phi @ inv(N)``. If ``M`` solves a
strict Lyapunov inequality for ``A``, the reduced matrix
``Psi.T @ A @ Phi`` is Hurwitz for every full-rank ``Phi``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import ContractViolation, InsufficientRank, TieWarning
from .lti import LtiSystem


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@dataclass(frozen=True)
class InnerProductProjector:
    """Trial basis ``Phi``, test basis ``Psi`` and metrics ``M``, ``N``."""

    Phi: np.ndarray
    Psi: np.ndarray
    M: np.ndarray
    N: np.ndarray

    @property
    def k(self):
        return self.Phi.shape[1]

    def residuals(self):
        """Relative residuals of the three defining identities."""
        P, Q, M, N = self.Phi, self.Psi, self.M, self.N
        return {
            "orthogonality": _rel(P.T @ M @ P, N),
            "test_basis": _rel(Q, M @ P @ np.linalg.inv(N)),
            "biorthogonality": _rel(Q.T @ P, np.eye(self.k)),
        }

    def check(self, tol=1e-9):
        bad = {k: v for k, v in self.residuals().items() if not v <= tol}
        if bad:
            raise ContractViolation(f"inner-product projector invariants broken: {bad}")
        return self


@dataclass(frozen=True)
class BalanceResult:
    """Balancing of ``Xi = R R^T`` and ``Xi' = S S^T`` truncated to ``k``."""

    projector: InnerProductProjector
    sigma1: np.ndarray
    R: np.ndarray
    S: np.ndarray
    sigma: np.ndarray = None

    @property
    def Xi(self):
        return self.R @ self.R.T

    @property
    def XiPrime(self):
        return self.S @ self.S.T

    @property
    def Phi(self):
        return self.projector.Phi

    @property
    def Psi(self):
        return self.projector.Psi


def lyapunov_metric(A, Q=None):
    """``Theta`` solving ``A^T Theta + Theta A = -Q`` (``Q = I`` by default)."""
    A = kernels.as_matrix(A)
    Q = np.eye(A.shape[0]) if Q is None else Q
    return kernels.solve_lyapunov(A, Q, side="primal")


def project_inner(sys, proj, check=True):
    """Petrov-Galerkin reduction ``(Psi^T A Phi, Psi^T B, C Phi)``."""
    if not isinstance(sys, LtiSystem):
        sys = LtiSystem(sys)
    if proj.Phi.shape[0] != sys.n:
        raise ContractViolation(f"basis has {proj.Phi.shape[0]} rows, system has n={sys.n}")
    if check:
        proj.check()
    P, Q = proj.Phi, proj.Psi
    return LtiSystem(Q.T @ sys.A @ P, Q.T @ sys.B, sys.C @ P)


def inner_product_balance(R, S, k, rtol=kernels.RANK_RTOL):
    """Balance ``Xi = R R^T`` against ``Xi' = S S^T`` and truncate.

    With ``R^T S = U Sigma V^T`` the bases are
    ``Phi = S V_1 Sigma_1^{-1/2}`` and ``Psi = R U_1 Sigma_1^{-1/2}``.
    ``R`` and ``S`` may be rectangular (e.g. snapshot matrices), in which
    case the Gramians are never formed; factors with more columns than
    rows are first compressed to square triangular factors.

    Parameters
    ----------
    R, S : (n, r) and (n, s) array_like
        Factors of ``Xi`` and ``Xi'``.
    k : int
        Number of retained states.

    Returns
    -------
    BalanceResult
    """
    R = kernels.as_matrix(R, "R")
    S = kernels.as_matrix(S, "S")
    if R.shape[0] != S.shape[0]:
        raise ContractViolation(f"R and S must have the same row count, got {R.shape[0]} and {S.shape[0]}")
    # wide snapshot factors: replace by triangular factors with the same Gramian
    if R.shape[1] > R.shape[0]:
        R = np.linalg.qr(R.T, mode="r").T
    if S.shape[1] > S.shape[0]:
        S = np.linalg.qr(S.T, mode="r").T
    U, s, V = kernels.svd(R.T @ S)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    if k < 1 or k > rank:
        raise InsufficientRank(f"requested k={k} but R^T S has numerical rank {rank}")
    if k < len(s) and s[k] > 0 and abs(s[k - 1] - s[k]) <= 1e-10 * s[k - 1]:
        warnings.warn(f"singular-value tie at truncation k={k}: {s[k - 1]:.6g} ~ {s[k]:.6g}", TieWarning, stacklevel=2)
    s1 = s[:k]
    scale = 1.0 / np.sqrt(s1)
    Phi = (S @ V[:, :k]) * scale
    Psi = (R @ U[:, :k]) * scale
    proj = InnerProductProjector(Phi, Psi, R @ R.T, np.diag(s1))
    return BalanceResult(proj, s1, R, S, s)


def method2_from_basis(Phi, Theta):
    """Inner-product projector from an arbitrary full-rank trial basis.

    ``M = Theta``, ``N = Phi^T Theta Phi`` and ``Psi = Theta Phi N^{-1}``.
    """
    Phi = kernels.as_matrix(Phi, "Phi")
    Theta = kernels.as_matrix(Theta, "Theta")
    s = np.linalg.svd(Phi, compute_uv=False)
    if s.size == 0 or s[-1] <= kernels.RANK_RTOL * s[0]:
        raise ContractViolation("Phi must have full column rank")
    N = Phi.T @ Theta @ Phi
    N = 0.5 * (N + N.T)
    Psi = kernels.solve_linear(N, (Theta @ Phi).T).T
    return InnerProductProjector(Phi, Psi, Theta, N)


def method3_transport(Phi0, M0, N0, Theta, N):
    """Transport ``Phi0 in O(M0, N0)`` to a projector in ``O(Theta, N)``.

    Uses ``G = Theta^{-1/2} M0^{1/2}`` and ``Gt = N^{-1/2} N0^{1/2}``, so
    ``Phi = G Phi0 Gt^{-1}`` and ``Psi = Theta Phi N^{-1}``.
    """
    Phi0 = kernels.as_matrix(Phi0, "Phi0")
    M0, N0, Theta, N = (kernels.as_matrix(X) for X in (M0, N0, Theta, N))
    if _rel(Phi0.T @ M0 @ Phi0, N0) > 1e-9:
        raise ContractViolation("Phi0 is not in O(M0, N0)")
    G = kernels.sym_sqrt(Theta, inverse=True) @ kernels.sym_sqrt(M0)
    Gt = kernels.sym_sqrt(N, inverse=True) @ kernels.sym_sqrt(N0)
    Phi = G @ Phi0 @ np.linalg.inv(Gt)
    Psi = Theta @ Phi @ np.linalg.inv(N)
    return InnerProductProjector(Phi, Psi, Theta, N)


def projection_error(X, proj):
    """Snapshot projection error ``sum_i ||x_i - Phi Psi^T x_i||_M^2``."""
    X = kernels.as_matrix(X, "X")
    E = X - proj.Phi @ (proj.Psi.T @ X)
    return float(np.einsum("ij,ik,kj->", E, proj.M, E))
