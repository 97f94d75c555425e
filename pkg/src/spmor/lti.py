"""LTI systems, stability classification and spectral block decomposition.

A real matrix ``A`` with no defective eigenvalues on the imaginary axis is
brought to the block form ``A = T diag(A_s, A_m, A_u, 0) T^{-1}``, with
``A_s`` Hurwitz, ``A_m`` purely imaginary and nonsingular, ``A_u``
antistable and a zero block. ``T`` is built from realified eigenvectors.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .exceptions import ContractViolation, DecompositionUnsupported

STABLE = "stable"
MARGINAL = "pure-marginal"
ANTISTABLE = "antistable"
ZERO = "zero"
BLOCK_ORDER = (STABLE, MARGINAL, ANTISTABLE, ZERO)

# outcomes of classify_stability
ASYMPTOTICALLY_STABLE = "asymptotically-stable"
PURE_MARGINALLY_STABLE = "pure-marginally-stable"
MARGINALLY_STABLE = "marginally-stable"
CLASS_ANTISTABLE = "antistable"
CLASS_ZERO = "zero"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class LtiSystem:
    """State-space triple ``(A, B, C)`` for ``x' = Ax + Bu``, ``y = Cx``.

    ``B`` and ``C`` default to zero-width matrices, which is the autonomous
    view used by the simulations.
    """

    A: np.ndarray
    B: np.ndarray = None
    C: np.ndarray = None

    def __post_init__(self):
        A = kernels.as_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ContractViolation(f"A must be square, got {A.shape}")
        B = np.zeros((n, 0)) if self.B is None else kernels.as_matrix(self.B, "B")
        C = np.zeros((0, n)) if self.C is None else np.atleast_2d(np.asarray(self.C, dtype=float))
        if B.shape[0] != n:
            raise ContractViolation(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ContractViolation(f"C has {C.shape[1]} columns, expected {n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class Block:
    """One diagonal block of a :class:`DecomposedSystem`."""

    kind: str
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    index: slice

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class DecomposedSystem:
    """Similarity transform ``T`` and the diagonal blocks of ``T^{-1} A T``."""

    T: np.ndarray
    Tinv: np.ndarray
    blocks: tuple = field(default_factory=tuple)

    def block(self, kind):
        """Return the block of the given kind, or ``None`` if absent."""
        for b in self.blocks:
            if b.kind == kind:
                return b
        return None

    def block_diag(self):
        """Assemble ``diag(A_s, A_m, A_u, 0)``."""
        n = self.T.shape[0]
        D = np.zeros((n, n))
        for b in self.blocks:
            D[b.index, b.index] = b.A
        return D

    def to_blocks(self, x):
        """Map full-space states (columns) to block coordinates ``T^{-1} x``."""
        return self.Tinv @ x


def norm_estimate(A):
    """Cheap upper bound ``sqrt(||A||_1 ||A||_inf)`` on the spectral norm."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.sqrt(np.linalg.norm(A, 1) * np.linalg.norm(A, np.inf)))


def default_tol(A):
    return 1e-8 * norm_estimate(A)


def _clusters(w, radius):
    """Group eigenvalues lying within ``radius`` of each other (single linkage)."""
    order = np.lexsort((w.imag, w.real))
    groups = []
    for i in order:
        for g in groups:
            if np.min(np.abs(w[g] - w[i])) <= radius:
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _nondefective(A, w, idx, radius):
    """Geometric multiplicity of the cluster ``w[idx]`` equals its size."""
    if len(idx) == 1:
        return True
    lam = np.mean(w[idx])
    s = np.linalg.svd(A - lam * np.eye(A.shape[0]), compute_uv=False)
    nullity = int(np.sum(s <= max(radius, 1e-300)))
    return nullity >= len(idx)


def _marginal_defects(A, w, tol):
    """Eigenvalues with ``|Re| <= tol`` belonging to defective clusters."""
    scale = norm_estimate(A)
    radius = 1e-8 * max(scale, 1.0)
    bad = []
    on_axis = np.where(np.abs(w.real) <= tol)[0]
    for g in _clusters(w[on_axis], radius):
        idx = on_axis[g]
        # the conjugate cluster has the same Jordan structure
        if np.mean(w[idx]).imag < -radius:
            continue
        if not _nondefective(A, w, idx, radius):
            bad.append(complex(np.mean(w[idx])))
    return bad


def classify_stability(A, tol=None):
    """Stability class of ``x' = Ax`` from its spectrum.

    Parameters
    ----------
    A : (n, n) array_like
    tol : float, optional
        Threshold on real parts and on ``||A||``; defaults to
        ``1e-8 * ||A||``.

    Returns
    -------
    str
        One of ``'asymptotically-stable'``, ``'pure-marginally-stable'``,
        ``'marginally-stable'``, ``'antistable'``, ``'zero'``, ``'unstable'``.
    """
    A = kernels.as_matrix(A)
    tol = default_tol(A) if tol is None else tol
    if norm_estimate(A) <= tol:
        return CLASS_ZERO
    w = np.linalg.eigvals(A)
    re = w.real
    if re.max() < -tol:
        return ASYMPTOTICALLY_STABLE
    if re.min() > tol:
        return CLASS_ANTISTABLE
    if re.max() > tol:
        return UNSTABLE
    if _marginal_defects(A, w, tol):
        return UNSTABLE
    if np.all(np.abs(re) <= tol) and np.all(np.abs(w) > tol):
        return PURE_MARGINALLY_STABLE
    return MARGINALLY_STABLE


def _normalize(v):
    """Unit 2-norm with the largest-magnitude entry real and positive."""
    v = v / np.linalg.norm(v)
    k = np.argmax(np.abs(v))
    return v * (np.conj(v[k]) / abs(v[k]))


def _cluster_basis(V):
    """Orthonormal basis of the span of a cluster's eigenvectors."""
    if V.shape[1] == 1:
        return _normalize(V[:, 0])[:, None]
    Q, _ = np.linalg.qr(V)
    return np.column_stack([_normalize(Q[:, j]) for j in range(Q.shape[1])])


def _block_sort_key(lam):
    # descending modulus, then descending imaginary part
    return (-round(abs(lam), 10), -round(lam.imag, 10))


def decompose(sys, tol=None):
    """Split an LTI system into stability-class blocks.

    Conjugate pairs ``(v, conj(v))`` become real columns
    ``sqrt(2) (Re v, Im v)`` with ``v`` of unit norm, so that a pure
    marginal mode ``i beta`` contributes the canonical rotation
    ``[[0, beta], [-beta, 0]]``. Marginal columns are laid out as
    ``(q_1..q_m, p_1..p_m)`` with frequencies in descending order, giving
    ``A_m = J_{2m} diag(beta, beta)`` directly.

    Parameters
    ----------
    sys : LtiSystem or array_like
    tol : float, optional
        Threshold on real parts; defaults to ``1e-8 * ||A||``.

    Returns
    -------
    DecomposedSystem

    Raises
    ------
    DecompositionUnsupported
        If any eigenvalue is defective (Jordan blocks need invariant-subspace
        methods, which are not implemented).
    """
    if not isinstance(sys, LtiSystem):
        sys = LtiSystem(sys)
    A = sys.A
    n = A.shape[0]
    tol = default_tol(A) if tol is None else tol
    eigsys = kernels.eig_real(A)
    w, V = eigsys.values, eigsys.vectors
    bad = _marginal_defects(A, w, tol)
    if bad:
        raise DecompositionUnsupported(f"defective eigenvalue on the imaginary axis near {bad[0]:.6g}")

    radius = 1e-8 * max(norm_estimate(A), 1.0)
    kinds = np.where(np.abs(w) <= tol, ZERO,
                     np.where(w.real < -tol, STABLE, np.where(w.real > tol, ANTISTABLE, MARGINAL)))

    columns = {k: [] for k in BLOCK_ORDER}
    for kind in BLOCK_ORDER:
        sel = np.where(kinds == kind)[0]
        # keep one member of every conjugate pair (Im >= 0)
        upper = sel[w[sel].imag >= -radius]
        items = []
        for g in _clusters(w[upper], radius):
            idx = upper[g]
            if len(idx) > 1 and not _nondefective(A, w, idx, radius):
                # eigenvectors do not span the invariant subspace
                raise DecompositionUnsupported(f"defective eigenvalue near {w[idx[0]]:.6g}")
            lam = complex(np.mean(w[idx]))
            if abs(lam.imag) <= radius:
                lam = complex(lam.real, 0.0)
            items.append((lam, _cluster_basis(V[:, idx])))
        items.sort(key=lambda it: _block_sort_key(it[0]))
        if kind == MARGINAL:
            q = [np.sqrt(2) * Q.real for _, Q in items]
            p = [np.sqrt(2) * Q.imag for _, Q in items]
            columns[kind] = q + p
        else:
            for lam, Q in items:
                if lam.imag == 0.0:
                    R = Q.real
                    if Q.shape[1] > 1:
                        R, _ = np.linalg.qr(R)
                    columns[kind].append(R)
                else:
                    for j in range(Q.shape[1]):
                        columns[kind].append(np.sqrt(2) * np.column_stack([Q[:, j].real, Q[:, j].imag]))

    Ts, start, spans = [], 0, []
    for kind in BLOCK_ORDER:
        if not columns[kind]:
            continue
        Tk = np.hstack(columns[kind])
        Ts.append(Tk)
        spans.append((kind, slice(start, start + Tk.shape[1])))
        start += Tk.shape[1]
    T = np.hstack(Ts)
    if T.shape != (n, n):
        raise DecompositionUnsupported(f"eigenvector basis has {T.shape[1]} columns, expected {n}")
    Tinv = kernels.solve_linear(T, np.eye(n))
    Ab = Tinv @ A @ T
    TiB = Tinv @ sys.B
    CT = sys.C @ T
    blocks = []
    for kind, sl in spans:
        Ak = Ab[sl, sl]
        if kind == ZERO:
            Ak = np.zeros_like(Ak)
        blocks.append(Block(kind, Ak, TiB[sl], CT[:, sl], sl))
    return DecomposedSystem(T, Tinv, tuple(blocks))


def recombine(dec, states, bases):
    """Map per-block reduced states back to the full space.

    Computes ``T @ vstack([Phi_i @ z_i])``; each ``z_i`` may be a vector or
    a matrix whose columns are states at successive times.
    """
    if len(states) != len(bases):
        raise ContractViolation("need one basis per block state")
    parts = []
    for z, Phi in zip(states, bases):
        Phi = np.asarray(Phi, dtype=float)
        z = np.asarray(z, dtype=float)
        if Phi.shape[1] != z.shape[0]:
            raise ContractViolation(f"basis has {Phi.shape[1]} columns but state has dim {z.shape[0]}")
        parts.append(Phi @ z)
    X = np.concatenate(parts, axis=0)
    if X.shape[0] != dec.T.shape[1]:
        raise ContractViolation(f"stacked state has dim {X.shape[0]}, expected {dec.T.shape[1]}")
    return dec.T @ X
