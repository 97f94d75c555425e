"""Constructors for the two reference problems.

``example_1d`` is an 8-state companion-form system with spectrum
``{-3, -2 +- i, -1, +- i, +- 2i}``. ``mass_spring_2d`` is a lattice of
masses joined by springs, damped along x and undamped along y, which
splits exactly into a Hurwitz block and a canonical Hamiltonian block.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractViolation
from .kernels import poisson_matrix
from .lti import MARGINAL, STABLE, Block, DecomposedSystem, LtiSystem


@dataclass(frozen=True)
class Schedule:
    """Snapshot and integration settings used with a benchmark."""

    snapshot_dt: float
    snapshot_count: int
    dt: float
    t_final: float
    srsb_mu: float
    srsb_epsilon: float
    gramian_epsilon: float
    k: int


@dataclass(frozen=True)
class Example1D:
    sys: LtiSystem
    x0: np.ndarray
    A_s: np.ndarray
    A_m: np.ndarray
    Theta: np.ndarray
    JOmega: np.ndarray
    L0: np.ndarray
    schedule: Schedule


def example_1d():
    """The 8-state marginally stable benchmark with ``x0 = B = C^T = e_1``."""
    A = np.zeros((8, 8))
    A[0] = [-8, -29, -72, -139, -192, -171, -128, -60]
    A[1:, :7] = np.eye(7)
    x0 = np.zeros(8)
    x0[0] = 1.0
    A_s = np.array([[-3.0, 0, 0, 0], [0, -2, 1, 0], [0, -1, -2, 0], [0, 0, 0, -1]])
    L0 = np.diag([2.0, 1.0, 2.0, 1.0])
    J4 = poisson_matrix(2)
    A_m = J4 @ L0
    Theta = np.diag([1 / 6, 1 / 4, 1 / 4, 1 / 2])
    sched = Schedule(snapshot_dt=0.5, snapshot_count=11, dt=0.001, t_final=50.0,
                     srsb_mu=0.01, srsb_epsilon=0.0, gramian_epsilon=0.0, k=4)
    return Example1D(LtiSystem(A, x0[:, None], x0[None, :]), x0, A_s, A_m, Theta, J4, L0, sched)


@dataclass(frozen=True)
class MassSpringConfig:
    """Lattice size ``grid`` (interior masses per direction) and physical constants."""

    grid: int = 49
    m: float = 1.0
    k_x: float = 2500.0
    k_y: float = 2500.0
    b: float = 1.0
    l: float = 1.0

    def __post_init__(self):
        if self.grid < 1:
            raise ContractViolation("grid must be >= 1")
        for name in ("m", "k_x", "k_y", "b", "l"):
            if not getattr(self, name) > 0:
                raise ContractViolation(f"{name} must be positive")


@dataclass(frozen=True)
class MassSpringProblem:
    cfg: MassSpringConfig
    sys: LtiSystem
    dec: DecomposedSystem
    x0: np.ndarray
    A_s: np.ndarray
    A_m: np.ndarray
    L_x: np.ndarray
    L_y: np.ndarray
    schedule: Schedule = field(default=None)

    @property
    def energy_operator(self):
        """Total Hamiltonian ``H_x + H_y`` as ``x^T W x / 2``."""
        n2 = self.L_x.shape[0]
        W = np.zeros((2 * n2, 2 * n2))
        W[:n2, :n2] = self.L_x
        W[n2:, n2:] = self.L_y
        return W


def spline(alpha):
    """Cubic bump: ``1 - 1.5 a^2 + 0.75 a^3`` on [0, 1], ``(2 - a)^3 / 4`` on (1, 2], else 0."""
    a = np.abs(np.asarray(alpha, dtype=float))
    return np.where(a <= 1, 1 - 1.5 * a**2 + 0.75 * a**3, np.where(a <= 2, 0.25 * (2 - a) ** 3, 0.0))


def _laplacian_1d(nb):
    return -2.0 * np.eye(nb) + np.eye(nb, k=1) + np.eye(nb, k=-1)


def mass_spring_2d(cfg=None):
    """Damped/undamped 2-D mass-spring lattice in canonical coordinates.

    State ordering is ``(q, p, r, s)``, each in row-major mass order
    ``(i, j) -> (i - 1) * grid + (j - 1)``; boundaries are homogeneous
    Dirichlet. With ``K_x = k_x (D (x) I)`` and ``K_y = k_y (I (x) D)``
    the blocks are ``A_s = [[0, I/m], [K_x, -2b/m I]]`` and
    ``A_m = [[0, I/m], [K_y, 0]] = J diag(-K_y, I/m)``.

    Returns
    -------
    MassSpringProblem
        ``dec`` is the exact block split with ``T = I``; ``L_x`` and
        ``L_y`` are the Hamiltonian weights of the two subsystems.
    """
    cfg = MassSpringConfig() if cfg is None else cfg
    nb = cfg.grid
    n2 = nb * nb
    D = _laplacian_1d(nb)
    I = np.eye(nb)
    Kx = cfg.k_x * np.kron(D, I)
    Ky = cfg.k_y * np.kron(I, D)
    In = np.eye(n2)
    Z = np.zeros((n2, n2))
    A_s = np.block([[Z, In / cfg.m], [Kx, -(2 * cfg.b / cfg.m) * In]])
    A_m = np.block([[Z, In / cfg.m], [Ky, Z]])
    L_x = np.block([[-Kx, Z], [Z, In / cfg.m]])
    L_y = np.block([[-Ky, Z], [Z, In / cfg.m]])

    xs = np.arange(1, nb + 1) * cfg.l / (nb + 1)  # spacing l/(grid+1), ghosts at 0 and l
    h = spline(np.abs(xs - cfg.l / 2) / (cfg.l / 10))
    shape = np.outer(h, h).ravel()  # row-major over (i, j)
    x0 = np.concatenate([shape, np.zeros(n2), shape, np.zeros(n2)])

    n = 4 * n2
    A = np.zeros((n, n))
    A[: 2 * n2, : 2 * n2] = A_s
    A[2 * n2 :, 2 * n2 :] = A_m
    sys = LtiSystem(A, x0[:, None], x0[None, :])
    s, m = slice(0, 2 * n2), slice(2 * n2, n)
    dec = DecomposedSystem(
        np.eye(n), np.eye(n),
        (Block(STABLE, A_s, x0[s, None], x0[None, s], s), Block(MARGINAL, A_m, x0[m, None], x0[None, m], m)),
    )
    sched = Schedule(snapshot_dt=0.05, snapshot_count=101, dt=0.002, t_final=15.0,
                     srsb_mu=1.0, srsb_epsilon=1e-4, gramian_epsilon=1e-4, k=40)
    return MassSpringProblem(cfg, sys, dec, x0, A_s, A_m, L_x, L_y, sched)
