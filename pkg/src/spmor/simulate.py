"""Time integration, snapshot collection and error/energy metrics.

Trajectories store states as columns, ``states[:, i] = x(t_i)``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import kernels
from .baselines import STATE_TRAJECTORY, SnapshotMatrix
from .exceptions import ContractViolation, DecompositionUnsupported, SamplingError, StepFailure
from .lti import default_tol, norm_estimate, _clusters, _nondefective

# re-anchor exponential stepping on exp(A t_i) x0 this often
ANCHOR_EVERY = 1000


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_i = i * dt`` for ``i = 0 .. count - 1``."""

    dt: float
    count: int

    def __post_init__(self):
        if not self.dt > 0 or self.count < 1:
            raise ContractViolation(f"invalid grid dt={self.dt}, count={self.count}")

    @classmethod
    def from_final(cls, dt, t_final):
        count = int(round(t_final / dt)) + 1
        if abs((count - 1) * dt - t_final) > 1e-9 * max(t_final, 1.0):
            raise ContractViolation(f"t_final={t_final} is not a multiple of dt={dt}")
        return cls(dt, count)

    @property
    def t(self):
        return self.dt * np.arange(self.count)

    @property
    def t_final(self):
        return self.dt * (self.count - 1)


@dataclass(frozen=True)
class Trajectory:
    grid: TimeGrid
    states: np.ndarray

    def __post_init__(self):
        if self.states.shape[1] != self.grid.count:
            raise ContractViolation("states do not match the grid")


@dataclass(frozen=True)
class Metrics:
    """Per-model summary used in the result tables."""

    eta: float
    eta_E: float
    instability_margin: float
    unstable_mode_count: int
    infinite_time_energy: float


def midpoint_integrate(A, x0, grid):
    """Implicit midpoint rule ``x_{i+1} = x_i + dt/2 A (x_i + x_{i+1})``.

    The step matrix ``I - dt/2 A`` is LU-factored once; each step is one
    triangular solve. Once the state overflows the remaining entries are
    set to ``inf``.
    """
    A = kernels.as_matrix(A)
    n = A.shape[0]
    x = np.asarray(x0, dtype=float).ravel()
    h = 0.5 * grid.dt
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(np.eye(n) - h * A)
        except (sla.LinAlgWarning, np.linalg.LinAlgError) as exc:
            raise StepFailure(f"I - dt/2 A is singular for dt={grid.dt}; try a smaller step") from exc
    if np.any(lu[0].diagonal() == 0):
        raise StepFailure(f"I - dt/2 A is singular for dt={grid.dt}; try a smaller step")
    Bp = np.eye(n) + h * A
    out = np.empty((grid.count, n))
    out[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, grid.count):
            x = sla.lu_solve(lu, Bp @ x, check_finite=False)
            if not np.all(np.isfinite(x)):
                out[i:] = np.inf
                break
            out[i] = x
    return Trajectory(grid, out.T)


def analytic_trajectory(A, x0, grid, anchor=ANCHOR_EVERY):
    """Exact flow ``x(t_i) = exp(A t_i) x0`` by exponential stepping."""
    A = kernels.as_matrix(A)
    x0 = np.asarray(x0, dtype=float).ravel()
    E = kernels.expm(A, grid.dt)
    out = np.empty((grid.count, A.shape[0]))
    out[0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, grid.count):
            if i % anchor == 0:
                out[i] = kernels.expm(A, i * grid.dt) @ x0
            else:
                out[i] = E @ out[i - 1]
    return Trajectory(grid, out.T)


def collect_snapshots(traj, dt):
    """Columns of ``traj`` at ``t = 0, dt, 2 dt, ...``."""
    ratio = dt / traj.grid.dt
    step = int(round(ratio))
    if step < 1 or abs(ratio - step) > 1e-9 * ratio:
        raise SamplingError(f"snapshot interval {dt} is not a multiple of the time step {traj.grid.dt}")
    return SnapshotMatrix(traj.states[:, ::step], dt, STATE_TRAJECTORY)


def exact_snapshots(A, x0, dt, N):
    """``N`` exact state snapshots ``x(i dt) = exp(A i dt) x0``."""
    traj = analytic_trajectory(A, x0, TimeGrid(dt, N))
    return SnapshotMatrix(traj.states, dt, STATE_TRAJECTORY)


def _states(x):
    return x.states if isinstance(x, Trajectory) else np.asarray(x, dtype=float)


def relative_state_error(ref, approx):
    """``sqrt(sum_i ||x_i - xhat_i||^2) / sqrt(sum_i ||x_i||^2)`` over all grid points."""
    X, Y = _states(ref), _states(approx)
    if X.shape != Y.shape:
        raise ContractViolation(f"trajectory shapes differ: {X.shape} vs {Y.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        num = np.sum((X - Y) ** 2)
    if not np.isfinite(num):
        return math.inf
    return float(np.sqrt(num / np.sum(X**2)))


def relative_energy_error(E_ref, E_approx):
    """``sqrt(sum_i (E_i - Ehat_i)^2) / sqrt(sum_i E_i^2)``."""
    E, F = np.asarray(E_ref, dtype=float), np.asarray(E_approx, dtype=float)
    if E.shape != F.shape:
        raise ContractViolation(f"energy series shapes differ: {E.shape} vs {F.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        num = np.sum((E - F) ** 2)
    if not np.isfinite(num):
        return math.inf
    return float(np.sqrt(num / np.sum(E**2)))


def energy_operator(dec, metrics):
    """Full-coordinate energy matrix ``W = T^{-T} diag(M_i) T^{-1}``.

    Parameters
    ----------
    dec : DecomposedSystem
    metrics : dict
        Block kind -> symmetric matrix (``M`` for the stable block, ``L``
        for the pure marginal block).
    """
    n = dec.T.shape[0]
    D = np.zeros((n, n))
    for b in dec.blocks:
        if b.kind not in metrics:
            raise ContractViolation(f"no energy metric given for the {b.kind} block")
        D[b.index, b.index] = metrics[b.kind]
    W = dec.Tinv.T @ D @ dec.Tinv
    return 0.5 * (W + W.T)


def quadratic_energy(W, x):
    """``x^T W x / 2`` for a vector or for each column of a matrix."""
    x = _states(x)
    with np.errstate(over="ignore", invalid="ignore"):
        if x.ndim == 1:
            return 0.5 * float(x @ W @ x)
        return 0.5 * np.einsum("it,it->t", x, W @ x)


def system_energy(dec, M, L, x):
    """Generalized system energy ``|x_s|_M^2 / 2 + x_m^T L x_m / 2`` with ``(x_s, x_m) = T^{-1} x``."""
    metrics = {}
    if M is not None:
        metrics["stable"] = M
    if L is not None:
        metrics["pure-marginal"] = L
    return quadratic_energy(energy_operator(dec, metrics), x)


def instability_margin(A, tol=None):
    """``(max Re(lambda), #{lambda : Re(lambda) > tol})``."""
    A = kernels.as_matrix(A)
    if A.size == 0:
        return -math.inf, 0
    tol = default_tol(A) if tol is None else tol
    re = np.linalg.eigvals(A).real
    return float(re.max()), int(np.sum(re > tol))


def infinite_time_energy(A, x0, W, basis=None, tol=None):
    """Limit of the energy ``x^T W x / 2`` along ``x(t) = V exp(A t) z0``.

    Returns ``inf`` if any mode grows, 0 if all modes decay, and otherwise
    the time average of the energy carried by the modes on the imaginary
    axis, which is the constant ``H(x_m(0))`` whenever that energy is
    conserved by the marginal flow.

    Parameters
    ----------
    A : (k, k) array_like
        Full or reduced system matrix.
    x0 : (k,) array_like
        Initial state in the coordinates of ``A``.
    W : (n, n) array_like
        Energy matrix in output coordinates.
    basis : (n, k) array_like, optional
        Map from the coordinates of ``A`` to output coordinates.
    """
    A = kernels.as_matrix(A)
    x0 = np.asarray(x0, dtype=float).ravel()
    V = np.eye(A.shape[0]) if basis is None else np.asarray(basis, dtype=float)
    tol = default_tol(A) if tol is None else tol
    w, P = kernels.eig_real(A)
    if np.any(w.real > tol):
        return math.inf
    on_axis = np.where(np.abs(w.real) <= tol)[0]
    if on_axis.size == 0:
        return 0.0
    radius = 1e-8 * max(norm_estimate(A), 1.0)
    for g in _clusters(w[on_axis], radius):
        if not _nondefective(A, w, on_axis[g], radius):
            raise DecompositionUnsupported("defective eigenvalue on the imaginary axis")
    c = np.linalg.solve(P, x0.astype(complex))
    Y = (V @ P[:, on_axis]) * c[on_axis]
    G = np.conj(Y).T @ W @ Y
    lam = w[on_axis].imag
    # only pairs of equal frequency survive time averaging
    same = np.abs(lam[:, None] - lam[None, :]) <= max(radius, tol)
    return float(0.5 * np.real(np.sum(G[same])))


def hamiltonian_drift(E):
    """Maximum relative deviation ``max_i |E_i - E_0| / |E_0|``."""
    E = np.asarray(E, dtype=float)
    return float(np.max(np.abs(E - E[0])) / abs(E[0]))
