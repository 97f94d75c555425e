"""Symplectic projection and balancing for pure marginally stable systems.

A pure marginally stable ``A`` is a generalized Hamiltonian matrix
``A = J L`` with ``J`` skew and ``L`` SPD. Reducing with a trial basis
``Phi in Sp(J_Omega, J_Pi)`` (``Phi^T J_Omega Phi = J_Pi``) and the test
basis ``Psi = J_Omega Phi J_Pi^{-1}`` keeps that structure, so the reduced
spectrum stays on the imaginary axis.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import AlphaSearchWarning, ContractViolation, PreconditionError, TransformFailure
from .inner import inner_product_balance
from .lti import PURE_MARGINALLY_STABLE, LtiSystem, classify_stability, default_tol, norm_estimate


def poisson(n):
    """Canonical Poisson matrix ``J_{2n} = [[0, I_n], [-I_n, 0]]``."""
    return kernels.poisson_matrix(n)


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@dataclass(frozen=True)
class GeneralizedHamiltonianForm:
    """Canonical form ``G^{-1} A G = J_{2n} diag(beta, beta)``.

    ``J = G J_{2n} G^T`` and ``L = G^{-T} diag(beta, beta) G^{-1}`` give
    ``A = J L``; ``JOmega = -J^{-1}`` is the Poisson structure for which
    ``G in Sp(JOmega, J_{2n})``.
    """

    A: np.ndarray
    J: np.ndarray
    L: np.ndarray
    G: np.ndarray
    beta: np.ndarray
    JOmega: np.ndarray
    alpha: int = 0
    cond: float = 1.0

    @property
    def L0(self):
        return np.diag(np.concatenate([self.beta, self.beta]))


@dataclass(frozen=True)
class SymplecticProjector:
    """Trial/test pair with ``Phi in Sp(JOmega, JPi)`` and ``Psi = JOmega Phi JPi^{-1}``."""

    Phi: np.ndarray
    Psi: np.ndarray
    JOmega: np.ndarray
    JPi: np.ndarray

    @property
    def k(self):
        return self.Phi.shape[1]

    def residuals(self):
        P, Q = self.Phi, self.Psi
        return {
            "symplectic": _rel(P.T @ self.JOmega @ P, self.JPi),
            "test_basis": _rel(Q, self.JOmega @ P @ np.linalg.inv(self.JPi)),
            "biorthogonality": _rel(Q.T @ P, np.eye(self.k)),
        }

    def check(self, tol=1e-9):
        bad = {k: v for k, v in self.residuals().items() if not v <= tol}
        if bad:
            raise ContractViolation(f"symplectic projector invariants broken: {bad}")
        return self


@dataclass(frozen=True)
class SymplecticBalanceResult:
    """Symplectic balancing of half-dimension Gramians ``R R^T`` and ``S S^T``."""

    projector: SymplecticProjector
    sigma1: np.ndarray
    PhiBar: np.ndarray
    PsiBar: np.ndarray
    G: np.ndarray

    @property
    def Phi(self):
        return self.projector.Phi

    @property
    def Psi(self):
        return self.projector.Psi


def check_generalized_hamiltonian(A, JOmega):
    """Relative residual ``||A^T J + J A|| / (||A|| ||J||)``; zero for GH matrices."""
    A = kernels.as_matrix(A)
    J = kernels.as_matrix(JOmega, "JOmega")
    den = max(np.linalg.norm(A) * np.linalg.norm(J), 1e-300)
    return float(np.linalg.norm(A.T @ J + J @ A) / den)


def hamiltonian_energy(L, x):
    """Quadratic Hamiltonian ``x^T L x / 2`` (column-wise for 2-D ``x``)."""
    L = np.asarray(L, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return 0.5 * float(x @ L @ x)
    return 0.5 * np.einsum("it,ij,jt->t", x, L, x)


def _orthonormal_cluster(V):
    if V.shape[1] == 1:
        v = V[:, 0] / np.linalg.norm(V[:, 0])
    else:
        V, _ = np.linalg.qr(V)
        return np.column_stack([_orthonormal_cluster(V[:, [j]])[:, 0] for j in range(V.shape[1])])
    k = np.argmax(np.abs(v))
    return (v * (np.conj(v[k]) / abs(v[k])))[:, None]


def canonical_transform(A, tol=None, first_hit=False):
    """Real transform to canonical Hamiltonian form.

    Finds ``G`` with ``G^{-1} A G = J_{2n} diag(beta, beta)``: eigenvectors
    ``P1`` of ``A`` are matched with the closed-form eigenvectors ``P2`` of
    the canonical matrix, ``P3 = P1 P2^{-1}`` and
    ``G = Re(P3) + alpha Im(P3)`` for an integer ``alpha`` in ``0..2n``.

    Parameters
    ----------
    A : (2n, 2n) array_like
        Pure marginally stable matrix.
    tol : float, optional
        Threshold on real parts; defaults to ``1e-8 * ||A||``.
    first_hit : bool
        Take the first nonsingular ``alpha`` instead of the best conditioned.

    Returns
    -------
    GeneralizedHamiltonianForm
    """
    A = kernels.as_matrix(A)
    m = A.shape[0]
    if m % 2 or A.shape[1] != m:
        raise PreconditionError(f"A must be square of even dimension, got {A.shape}")
    tol = default_tol(A) if tol is None else tol
    if classify_stability(A, tol) != PURE_MARGINALLY_STABLE:
        raise PreconditionError("canonical_transform needs a pure marginally stable matrix")
    n = m // 2
    w, V = kernels.eig_real(A)
    up = np.where(w.imag > 0)[0]
    if len(up) != n:
        raise TransformFailure(f"expected {n} eigenvalues with positive imaginary part, found {len(up)}")
    # descending frequency; orthonormalize within clusters of equal frequency
    up = up[np.argsort(-w[up].imag, kind="stable")]
    radius = 1e-8 * max(norm_estimate(A), 1.0)
    beta = w[up].imag.copy()
    vecs, i = [], 0
    while i < n:
        j = i + 1
        while j < n and beta[i] - beta[j] <= radius:
            j += 1
        vecs.append(_orthonormal_cluster(V[:, up[i:j]]))
        beta[i:j] = beta[i:j].mean()
        i = j
    Vp = np.hstack(vecs)
    P1 = np.hstack([Vp, np.conj(Vp)])
    # eigenvectors of J_{2n} diag(beta, beta): (e_j +- i e_{n+j}) / sqrt(2)
    E = np.eye(n)
    P2 = np.vstack([np.hstack([E, E]), np.hstack([1j * E, -1j * E])]) / np.sqrt(2)
    P3 = P1 @ np.conj(P2).T  # P2 is unitary

    best = None
    for alpha in range(0, m + 1):
        G = P3.real + alpha * P3.imag
        c = np.linalg.cond(G)
        if not np.isfinite(c) or c > 1.0 / np.finfo(float).eps:
            continue
        if best is None or c < best[1]:
            best = (alpha, c, G)
        if first_hit:
            break
    if best is None:
        raise TransformFailure("Re(P3) + alpha Im(P3) singular for every alpha in 0..2n")
    alpha, c, G = best
    if alpha:
        warnings.warn(f"canonical transform used alpha={alpha} (cond {c:.3g})", AlphaSearchWarning, stacklevel=2)
    J2n = poisson(n)
    Gi = np.linalg.inv(G)
    L0 = np.diag(np.concatenate([beta, beta]))
    J = G @ J2n @ G.T
    L = Gi.T @ L0 @ Gi
    JOmega = Gi.T @ J2n @ Gi
    return GeneralizedHamiltonianForm(A, J, 0.5 * (L + L.T), G, beta, JOmega, alpha, float(c))


def symplectic_congruence(JOmega):
    """Real ``G`` with ``G^T JOmega G = J_{2n}`` for a skew nonsingular ``JOmega``."""
    J = kernels.as_matrix(JOmega, "JOmega")
    if _rel(J, -J.T) > 1e-12:
        raise ContractViolation("JOmega must be skew-symmetric")
    form = canonical_transform(J)
    # form.G is orthogonal here (normal matrix, orthonormal eigenvectors)
    d = np.concatenate([form.beta, form.beta]) ** -0.5
    G = form.G * d
    n = J.shape[0] // 2
    if _rel(G.T @ J @ G, poisson(n)) > 1e-8:
        raise TransformFailure("congruence to the canonical Poisson matrix failed")
    return G


def symplectic_test_basis(Phi, JOmega, JPi):
    """Method 2: complete ``Phi in Sp(JOmega, JPi)`` with ``Psi = JOmega Phi JPi^{-1}``."""
    Phi = kernels.as_matrix(Phi, "Phi")
    JOmega = kernels.as_matrix(JOmega, "JOmega")
    JPi = kernels.as_matrix(JPi, "JPi")
    if _rel(Phi.T @ JOmega @ Phi, JPi) > 1e-9:
        raise ContractViolation("Phi is not in Sp(JOmega, JPi)")
    Psi = JOmega @ Phi @ np.linalg.inv(JPi)
    return SymplecticProjector(Phi, Psi, JOmega, JPi)


def method3_symplectic_transport(Phi0, JOmega, JPi, G=None):
    """Transport ``Phi0 in Sp(J_{2n}, J_{2k})`` to ``Sp(JOmega, JPi)``.

    ``Phi = G Phi0 Gt^{-1}`` with ``G in Sp(JOmega, J_{2n})`` and
    ``Gt in Sp(JPi, J_{2k})``. ``G`` may be supplied (e.g. from
    :func:`canonical_transform`); otherwise it is built by congruence.
    """
    Phi0 = kernels.as_matrix(Phi0, "Phi0")
    JOmega = kernels.as_matrix(JOmega, "JOmega")
    JPi = kernels.as_matrix(JPi, "JPi")
    n, k = JOmega.shape[0] // 2, JPi.shape[0] // 2
    if _rel(Phi0.T @ poisson(n) @ Phi0, poisson(k)) > 1e-9:
        raise ContractViolation("Phi0 is not in Sp(J_2n, J_2k)")
    if G is None:
        G = np.eye(2 * n) if _rel(JOmega, poisson(n)) == 0 else symplectic_congruence(JOmega)
    elif _rel(G.T @ JOmega @ G, poisson(n)) > 1e-9:
        raise ContractViolation("G is not in Sp(JOmega, J_2n)")
    Gt = np.eye(2 * k) if _rel(JPi, poisson(k)) == 0 else symplectic_congruence(JPi)
    Phi = G @ Phi0 @ np.linalg.inv(Gt)
    return symplectic_test_basis(Phi, JOmega, JPi)


def project_symplectic(sys, proj, check=True):
    """Petrov-Galerkin reduction with a symplectic projector."""
    if not isinstance(sys, LtiSystem):
        sys = LtiSystem(sys)
    if proj.Phi.shape[0] != sys.n:
        raise ContractViolation(f"basis has {proj.Phi.shape[0]} rows, system has n={sys.n}")
    if check:
        proj.check()
    P, Q = proj.Phi, proj.Psi
    return LtiSystem(Q.T @ sys.A @ P, Q.T @ sys.B, sys.C @ P)


def cotangent_lift(X, G, k):
    """Block-diagonal symplectic basis ``diag(PhiBar, PhiBar)`` from snapshots.

    Snapshots are mapped to canonical coordinates ``y = G^{-1} x``, split
    into ``(q, p)`` and ``PhiBar`` holds the leading ``k`` left singular
    vectors of ``[q_1 .. q_N, p_1 .. p_N]``.

    Parameters
    ----------
    X : (2n, N) array_like
        Snapshot columns.
    G : (2n, 2n) array_like or None
        Canonical transform; ``None`` means the identity.
    k : int
        Half of the reduced dimension.

    Returns
    -------
    Phi0 : (2n, 2k) ndarray in ``Sp(J_{2n}, J_{2k})``
    """
    X = kernels.as_matrix(X, "X")
    m = X.shape[0]
    n = m // 2
    if m % 2:
        raise ContractViolation("snapshots must have even dimension")
    if not 1 <= k <= n:
        raise PreconditionError(f"k must lie in 1..{n}, got {k}")
    Y = X if G is None else kernels.solve_linear(np.asarray(G, dtype=float), X)
    Mcot = np.hstack([Y[:n], Y[n:]])
    U = kernels.svd(Mcot).U
    PhiBar = U[:, :k]
    Phi0 = np.zeros((m, 2 * k))
    Phi0[:n, :k] = PhiBar
    Phi0[n:, k:] = PhiBar
    return Phi0


def symplectic_balance(R, S, JOmega, G, k):
    """Symplectic balancing of ``Xi = R R^T`` and ``Xi' = S S^T``.

    The half-dimension balancing ``(PhiBar, PsiBar)`` of ``R`` and ``S`` is
    lifted to ``Phi = G diag(PhiBar, PsiBar)`` and
    ``Psi = G^{-T} diag(PsiBar, PhiBar)`` with ``JPi = J_{2k}``.

    Parameters
    ----------
    R, S : (n, r), (n, s) array_like
        Factors of the two half-dimension Gramians.
    JOmega : (2n, 2n) array_like
    G : (2n, 2n) array_like or None
        Must lie in ``Sp(JOmega, J_{2n})``; ``None`` means the identity.
    k : int

    Returns
    -------
    SymplecticBalanceResult
    """
    R = kernels.as_matrix(R, "R")
    S = kernels.as_matrix(S, "S")
    n = R.shape[0]
    JOmega = kernels.as_matrix(JOmega, "JOmega")
    if JOmega.shape != (2 * n, 2 * n):
        raise ContractViolation(f"JOmega must be {2 * n}x{2 * n}")
    G = np.eye(2 * n) if G is None else kernels.as_matrix(G, "G")
    if _rel(G.T @ JOmega @ G, poisson(n)) > 1e-9:
        raise ContractViolation("G is not in Sp(JOmega, J_2n)")
    bal = inner_product_balance(R, S, k)
    PhiBar, PsiBar = bal.Phi, bal.Psi
    Z = np.zeros((n, k))
    Phi = G @ np.block([[PhiBar, Z], [Z, PsiBar]])
    Psi = np.linalg.solve(G.T, np.block([[PsiBar, Z], [Z, PhiBar]]))
    proj = SymplecticProjector(Phi, Psi, JOmega, poisson(k))
    return SymplecticBalanceResult(proj, bal.sigma1, PhiBar, PsiBar, G)
