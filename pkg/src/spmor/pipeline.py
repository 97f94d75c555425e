"""End-to-end reduction runs: configuration, reduction, simulation, artifacts.

A run decomposes the full system into its Hurwitz and pure marginal parts,
reduces each part with the structure-preserving methods (``sp1``: POD with
a Lyapunov metric plus cotangent lift; ``sp2``: balanced truncation plus
symplectic balancing), applies the baselines to the full system, and
compares every reduced model with the exact solution.
"""

import csv
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np
import scipy.linalg as sla

from . import baselines, benchmarks, inner, simulate, symplectic
from .exceptions import PreconditionError, ReductionError, ReductionWarning
from .kernels import poisson_matrix
from .lti import ANTISTABLE, MARGINAL, STABLE, ZERO, LtiSystem, decompose
from .matrix_io import read_matrix, write_matrix

METHODS = ("pod", "bt", "bpod", "srsb", "sp1", "sp2")
DEFAULT_METHODS = ("pod", "srsb", "bpod", "sp1", "sp2")


class ConfigError(ReductionError):
    """Malformed or inconsistent run configuration."""

    code = "config"


_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}
CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["system"],
    "properties": {
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["source"],
            "properties": {
                "source": {"enum": ["builtin-1d", "builtin-spring", "matrix-files", "random"]},
                "grid": {"type": "integer", "minimum": 1},
                "m": _pos, "k_x": _pos, "k_y": _pos, "b": _pos, "l": _pos,
                "A": {"type": "string"}, "B": {"type": "string"},
                "C": {"type": "string"}, "x0": {"type": "string"},
                "n_stable": {"type": "integer", "minimum": 0},
                "n_marginal": {"type": "integer", "minimum": 0, "multipleOf": 2},
            },
        },
        "methods": {"type": "array", "items": {"enum": list(METHODS)}, "uniqueItems": True},
        "k": {
            "oneOf": [
                {"type": "integer", "minimum": 1},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["stable", "marginal"],
                    "properties": {
                        "stable": {"type": "integer", "minimum": 0},
                        "marginal": {"type": "integer", "minimum": 0, "multipleOf": 2},
                    },
                },
            ]
        },
        "snapshots": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dt": _pos, "count": {"type": "integer", "minimum": 1}},
        },
        "integration": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dt": _pos, "t_final": _pos},
        },
        "srsb": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"mu": {"type": "number"}, "epsilon": _nonneg},
        },
        "gramian_epsilon": _nonneg,
        "sp2_marginal_gramian": {"enum": ["hamiltonian", "snapshots"]},
        "energy": {"enum": ["lyapunov", "hamiltonian"]},
        "tol": _pos,
        "seed": {"type": "integer"},
        "plot_stride": {"type": "integer", "minimum": 1},
    },
}


@dataclass
class RunConfig:
    """Everything needed to reproduce one run."""

    source: str = "builtin-1d"
    spring: benchmarks.MassSpringConfig = None
    files: dict = field(default_factory=dict)
    n_stable: int = 4
    n_marginal: int = 4
    methods: tuple = DEFAULT_METHODS
    k_stable: int = None
    k_marginal: int = None
    k_total: int = 4
    snapshot_dt: float = 0.5
    snapshot_count: int = 11
    dt: float = 0.001
    t_final: float = 50.0
    srsb_mu: float = 0.01
    srsb_epsilon: float = 0.0
    gramian_epsilon: float = 0.0
    sp2_marginal_gramian: str = "hamiltonian"
    energy: str = "lyapunov"
    tol: float = None
    seed: int = 0
    plot_stride: int = 1

    @classmethod
    def from_dict(cls, d, base_dir="."):
        """Validate a parsed configuration and fill in source-specific defaults."""
        try:
            jsonschema.validate(d, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
            raise ConfigError(f"{where}: {exc.message}") from None
        sysd = d["system"]
        src = sysd["source"]
        cfg = cls(source=src)
        if src == "builtin-1d":
            sched = benchmarks.example_1d().schedule
        elif src == "builtin-spring":
            keys = ("grid", "m", "k_x", "k_y", "b", "l")
            cfg.spring = benchmarks.MassSpringConfig(**{k: sysd[k] for k in keys if k in sysd})
            sched = benchmarks.mass_spring_2d(benchmarks.MassSpringConfig(grid=1)).schedule
            cfg.sp2_marginal_gramian = "snapshots"
            cfg.energy = "hamiltonian"
        else:
            sched = benchmarks.Schedule(snapshot_dt=0.1, snapshot_count=51, dt=0.01, t_final=10.0,
                                        srsb_mu=0.01, srsb_epsilon=0.0, gramian_epsilon=0.0, k=4)
        if src == "matrix-files":
            for key in ("A", "x0"):
                if key not in sysd:
                    raise ConfigError(f"$.system: matrix-files source needs '{key}'")
            cfg.files = {k: str(Path(base_dir) / sysd[k]) for k in ("A", "B", "C", "x0") if k in sysd}
        if src == "random":
            cfg.n_stable = sysd.get("n_stable", 4)
            cfg.n_marginal = sysd.get("n_marginal", 4)
        cfg.snapshot_dt, cfg.snapshot_count = sched.snapshot_dt, sched.snapshot_count
        cfg.dt, cfg.t_final = sched.dt, sched.t_final
        cfg.srsb_mu, cfg.srsb_epsilon = sched.srsb_mu, sched.srsb_epsilon
        cfg.gramian_epsilon = sched.gramian_epsilon
        cfg.k_total = sched.k
        if "methods" in d:
            cfg.methods = tuple(d["methods"])
        if "k" in d:
            if isinstance(d["k"], dict):
                cfg.k_stable, cfg.k_marginal = d["k"]["stable"], d["k"]["marginal"]
                cfg.k_total = cfg.k_stable + cfg.k_marginal
            else:
                cfg.k_total = d["k"]
        snap = d.get("snapshots", {})
        cfg.snapshot_dt = snap.get("dt", cfg.snapshot_dt)
        cfg.snapshot_count = snap.get("count", cfg.snapshot_count)
        integ = d.get("integration", {})
        cfg.dt = integ.get("dt", cfg.dt)
        cfg.t_final = integ.get("t_final", cfg.t_final)
        sr = d.get("srsb", {})
        cfg.srsb_mu = sr.get("mu", cfg.srsb_mu)
        cfg.srsb_epsilon = sr.get("epsilon", cfg.srsb_epsilon)
        for key in ("gramian_epsilon", "sp2_marginal_gramian", "energy", "tol", "seed", "plot_stride"):
            if key in d:
                setattr(cfg, key, d[key])
        if cfg.energy == "hamiltonian" and src != "builtin-spring":
            raise ConfigError("$.energy: 'hamiltonian' is only defined for builtin-spring")
        try:
            simulate.TimeGrid.from_final(cfg.dt, cfg.t_final)
        except ReductionError as exc:
            raise ConfigError(f"$.integration: {exc}") from None
        return cfg

    @classmethod
    def from_file(cls, path):
        """Parse a JSON configuration file; syntax errors report line and column."""
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_dict(d, base_dir=path.parent)

    def to_dict(self):
        d = asdict(self)
        d["methods"] = list(self.methods)
        return d


@dataclass
class Problem:
    """Full system plus everything the reductions need about its blocks."""

    sys: LtiSystem
    x0: np.ndarray
    dec: object
    Theta: np.ndarray = None  # Lyapunov metric of the stable block (Q = I)
    W: np.ndarray = None  # energy matrix in full coordinates
    G: np.ndarray = None  # canonical transform of the marginal block
    JOmega: np.ndarray = None
    L: np.ndarray = None  # marginal Hamiltonian in block coordinates
    energy_metric_stable: np.ndarray = None


@dataclass
class ReducedModel:
    name: str
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    z0: np.ndarray
    V: np.ndarray  # reduced -> full coordinates
    marginal: slice = None  # reduced coordinates of the marginal part
    L: np.ndarray = None  # reduced Hamiltonian on those coordinates
    extras: dict = field(default_factory=dict)


@dataclass
class MethodResult:
    method: str
    k: int
    metrics: simulate.Metrics = None
    eigenvalues: np.ndarray = None
    wall_ms: float = math.nan
    t: np.ndarray = None
    energy: np.ndarray = None
    err_norm: np.ndarray = None
    model: ReducedModel = None
    error: str = None
    error_code: str = None
    extras: dict = field(default_factory=dict)


@dataclass
class RunReport:
    config: RunConfig
    results: list
    warnings: list
    full: MethodResult = None

    def result(self, method):
        for r in self.results:
            if r.method == method:
                return r
        raise KeyError(method)

    @property
    def failed(self):
        return [r for r in self.results if r.error is not None]


def _random_problem(cfg):
    rng = np.random.default_rng(cfg.seed)
    ns, nm = cfg.n_stable, cfg.n_marginal
    K = rng.standard_normal((ns, ns))
    M = rng.standard_normal((ns, ns))
    As = -(M @ M.T / ns + 0.1 * np.eye(ns)) + (K - K.T) / 2
    beta = np.sort(rng.uniform(0.5, 3.0, nm // 2))[::-1]
    Am = poisson_matrix(nm // 2) @ np.diag(np.concatenate([beta, beta])) if nm else np.zeros((0, 0))
    n = ns + nm
    T0 = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    D = sla.block_diag(As, Am)
    A = T0 @ D @ np.linalg.inv(T0)
    x0 = rng.standard_normal(n)
    return A, x0


def _marginal_structure(Am):
    """``(G, JOmega, L)`` for ``A_m``; ``G = I`` when it is already canonical."""
    n2 = Am.shape[0]
    J = poisson_matrix(n2 // 2)
    L = -J @ Am
    sym = np.linalg.norm(L - L.T) <= 1e-10 * max(np.linalg.norm(L), 1e-300)
    if sym and np.linalg.eigvalsh(0.5 * (L + L.T))[0] > 0:
        return np.eye(n2), J, 0.5 * (L + L.T)
    form = symplectic.canonical_transform(Am)
    return form.G, form.JOmega, form.L


def build_problem(cfg):
    """Construct the full system, its decomposition and energy operators."""
    energy_stable = None
    if cfg.source == "builtin-1d":
        ex = benchmarks.example_1d()
        sys, x0 = ex.sys, ex.x0
        dec = decompose(sys, cfg.tol)
    elif cfg.source == "builtin-spring":
        prob = benchmarks.mass_spring_2d(cfg.spring)
        sys, x0, dec = prob.sys, prob.x0, prob.dec
        if cfg.energy == "hamiltonian":
            energy_stable = prob.L_x
    elif cfg.source == "matrix-files":
        try:
            A = read_matrix(cfg.files["A"])
            x0 = read_matrix(cfg.files["x0"]).ravel()
            B = read_matrix(cfg.files["B"]) if "B" in cfg.files else x0[:, None]
            C = read_matrix(cfg.files["C"]) if "C" in cfg.files else x0[None, :]
        except OSError as exc:
            raise ConfigError(f"{exc.filename}: {exc.strerror}") from None
        except ReductionError as exc:
            raise ConfigError(str(exc)) from None
        if x0.size != A.shape[0]:
            raise ConfigError(f"x0 has {x0.size} entries, A is {A.shape[0]}x{A.shape[1]}")
        sys = LtiSystem(A, B, C)
        dec = decompose(sys, cfg.tol)
    elif cfg.source == "random":
        A, x0 = _random_problem(cfg)
        sys = LtiSystem(A, x0[:, None], x0[None, :])
        dec = decompose(sys, cfg.tol)
    else:
        raise ConfigError(f"unknown source {cfg.source!r}")

    for kind in (ANTISTABLE, ZERO):
        if dec.block(kind) is not None:
            raise PreconditionError(f"system has a {kind} block; structure-preserving reduction needs marginal stability")
    p = Problem(sys, np.asarray(x0, dtype=float), dec)
    metrics = {}
    bs, bm = dec.block(STABLE), dec.block(MARGINAL)
    if bs is not None:
        p.Theta = inner.lyapunov_metric(bs.A)
        p.energy_metric_stable = p.Theta if energy_stable is None else energy_stable
        metrics[STABLE] = p.energy_metric_stable
    if bm is not None:
        p.G, p.JOmega, p.L = _marginal_structure(bm.A)
        metrics[MARGINAL] = p.L
    p.W = simulate.energy_operator(dec, metrics)
    return p


def split_k(cfg, dec):
    """Reduced dimensions ``(k_s, k_m)`` of the stable and marginal parts."""
    ns = dec.block(STABLE).n if dec.block(STABLE) is not None else 0
    nm = dec.block(MARGINAL).n if dec.block(MARGINAL) is not None else 0
    if cfg.k_stable is not None:
        ks, km = cfg.k_stable, cfg.k_marginal
    else:
        k = cfg.k_total
        if nm == 0:
            ks, km = k, 0
        elif ns == 0:
            ks, km = 0, k - k % 2
        else:
            km = (k - k // 2) // 2 * 2
            ks = k - km
    if ks > ns or km > nm or km % 2:
        raise ConfigError(f"cannot split k into stable={ks} (n_s={ns}) and marginal={km} (n_m={nm}, even)")
    return ks, km


def _assemble_sp(p, name, parts):
    """Block-diagonal reduced model from per-block ``(block, Phi, Psi)``."""
    dec = p.dec
    n = dec.T.shape[0]
    k = sum(P.shape[1] for _, P, _ in parts)
    Phi = np.zeros((n, k))
    Psi = np.zeros((n, k))
    col, marginal = 0, None
    for b, P, Q in parts:
        sl = slice(col, col + P.shape[1])
        Phi[b.index, sl] = P
        Psi[b.index, sl] = Q
        if b.kind == MARGINAL:
            marginal = sl
        col += P.shape[1]
    Ab = dec.Tinv @ p.sys.A @ dec.T
    Ar = Psi.T @ Ab @ Phi
    # exact block structure: drop round-off coupling between blocks
    for b1, P1, _ in parts:
        for b2, _, _ in parts:
            if b1 is not b2:
                r1 = [i for i, (bb, _, _) in enumerate(parts) if bb is b1][0]
                r2 = [i for i, (bb, _, _) in enumerate(parts) if bb is b2][0]
                s1 = slice(sum(q.shape[1] for _, q, _ in parts[:r1]), sum(q.shape[1] for _, q, _ in parts[: r1 + 1]))
                s2 = slice(sum(q.shape[1] for _, q, _ in parts[:r2]), sum(q.shape[1] for _, q, _ in parts[: r2 + 1]))
                Ar[s1, s2] = 0.0
    model = ReducedModel(
        name, Ar, Psi.T @ dec.Tinv @ p.sys.B, p.sys.C @ dec.T @ Phi,
        Psi.T @ (dec.Tinv @ p.x0), dec.T @ Phi, marginal,
    )
    if marginal is not None:
        bm = [P for b, P, _ in parts if b.kind == MARGINAL][0]
        Lr = bm.T @ p.L @ bm
        model.L = 0.5 * (Lr + Lr.T)
    return model


def _snapshots(p, cfg):
    return simulate.exact_snapshots(p.sys.A, p.x0, cfg.snapshot_dt, cfg.snapshot_count).X


def reduce_sp1(p, cfg):
    """POD + Lyapunov metric (stable) and cotangent lift (marginal)."""
    ks, km = split_k(cfg, p.dec)
    Y = p.dec.Tinv @ _snapshots(p, cfg)
    parts = []
    bs, bm = p.dec.block(STABLE), p.dec.block(MARGINAL)
    if bs is not None and ks:
        P0 = baselines.pod_basis(Y[bs.index], ks).Phi
        proj = inner.method2_from_basis(P0, p.Theta).check()
        parts.append((bs, proj.Phi, proj.Psi))
    if bm is not None and km:
        Phi0 = symplectic.cotangent_lift(Y[bm.index], p.G, km // 2)
        proj = symplectic.method3_symplectic_transport(Phi0, p.JOmega, poisson_matrix(km // 2), G=p.G).check()
        parts.append((bm, proj.Phi, proj.Psi))
    return _assemble_sp(p, "sp1", parts)


def reduce_sp2(p, cfg):
    """Balanced truncation (stable) and symplectic balancing (marginal)."""
    ks, km = split_k(cfg, p.dec)
    parts = []
    bs, bm = p.dec.block(STABLE), p.dec.block(MARGINAL)
    extras = {}
    if bs is not None and ks:
        res = baselines.balanced_truncation(LtiSystem(bs.A, bs.B, bs.C), ks, epsilon=cfg.gramian_epsilon)
        parts.append((bs, res.Phi, res.Psi))
        extras["hankel_stable"] = res.sigma1.tolist()
    if bm is not None and km:
        h = bm.n // 2
        if cfg.sp2_marginal_gramian == "snapshots":
            Y = p.dec.Tinv @ _snapshots(p, cfg)
            Yc = np.linalg.solve(p.G, Y[bm.index])
            R, S = Yc[:h], Yc[h:]
        else:
            # position and momentum blocks of the Hamiltonian in canonical coordinates
            Lc = p.G.T @ p.L @ p.G
            from .kernels import symmetric_factor

            R, S = symmetric_factor(Lc[:h, :h]), symmetric_factor(Lc[h:, h:])
        res = symplectic.symplectic_balance(R, S, p.JOmega, p.G, km // 2)
        res.projector.check()
        parts.append((bm, res.Phi, res.Psi))
        extras["sigma_marginal"] = res.sigma1.tolist()
    model = _assemble_sp(p, "sp2", parts)
    model.extras.update(extras)
    return model


def _baseline_model(p, name, proj):
    P, Q = proj.Phi, proj.Psi
    sys = p.sys
    return ReducedModel(name, Q.T @ sys.A @ P, Q.T @ sys.B, sys.C @ P, Q.T @ p.x0, P)


def reduce_pod(p, cfg):
    return _baseline_model(p, "pod", baselines.pod_basis(_snapshots(p, cfg), cfg.k_total))


def reduce_bt(p, cfg):
    res = baselines.balanced_truncation(p.sys, cfg.k_total, epsilon=cfg.gramian_epsilon)
    return _baseline_model(p, "bt", res.projector)


def reduce_bpod(p, cfg):
    res = baselines.bpod(p.sys, cfg.snapshot_count, cfg.snapshot_dt, cfg.k_total)
    return _baseline_model(p, "bpod", res.projector)


def reduce_srsb(p, cfg):
    res = baselines.srsb(p.sys, cfg.srsb_mu, cfg.srsb_epsilon, cfg.k_total)
    return _baseline_model(p, "srsb", res.projector)


REDUCERS = {
    "pod": reduce_pod, "bt": reduce_bt, "bpod": reduce_bpod,
    "srsb": reduce_srsb, "sp1": reduce_sp1, "sp2": reduce_sp2,
}


@dataclass
class Truth:
    grid: simulate.TimeGrid
    X: np.ndarray
    E: np.ndarray


def _evaluate(model, p, truth, cfg):
    """Simulate a reduced model and compare it with the exact solution."""
    Z = simulate.midpoint_integrate(model.A, model.z0, truth.grid).states
    with np.errstate(over="ignore", invalid="ignore"):
        Xh = model.V @ Z
        err = np.sqrt(np.sum((truth.X - Xh) ** 2, axis=0))
    eta = simulate.relative_state_error(truth.X, Xh)
    E = simulate.quadratic_energy(p.W, Xh)
    eta_E = simulate.relative_energy_error(truth.E, E)
    margin, count = simulate.instability_margin(model.A, cfg.tol)
    e_inf = simulate.infinite_time_energy(model.A, model.z0, p.W, model.V, cfg.tol)
    extras = dict(model.extras)
    if model.marginal is not None:
        Hm = symplectic.hamiltonian_energy(model.L, Z[model.marginal])
        extras["hamiltonian_drift"] = simulate.hamiltonian_drift(Hm)
    return simulate.Metrics(eta, eta_E, margin, count, e_inf), E, err, extras


def _run_method(method, p, truth, cfg):
    res = MethodResult(method, cfg.k_total)
    t0 = time.perf_counter()
    try:
        model = REDUCERS[method](p, cfg)
        res.k = model.A.shape[0]
        res.metrics, res.energy, res.err_norm, res.extras = _evaluate(model, p, truth, cfg)
        res.eigenvalues = np.linalg.eigvals(model.A)
        res.model = model
        res.t = truth.grid.t
    except ReductionError as exc:
        res.error, res.error_code = str(exc), exc.code
    res.wall_ms = 1e3 * (time.perf_counter() - t0)
    return res


def _full_result(p, truth, cfg):
    t0 = time.perf_counter()
    X = simulate.midpoint_integrate(p.sys.A, p.x0, truth.grid).states
    eta = simulate.relative_state_error(truth.X, X)
    E = simulate.quadratic_energy(p.W, X)
    eta_E = simulate.relative_energy_error(truth.E, E)
    margin, count = simulate.instability_margin(p.sys.A, cfg.tol)
    bm = p.dec.block(MARGINAL)
    if bm is None:
        e_inf = 0.0
    else:
        y = (p.dec.Tinv @ p.x0)[bm.index]
        e_inf = symplectic.hamiltonian_energy(p.L, y)
    res = MethodResult("full", p.sys.n)
    res.metrics = simulate.Metrics(eta, eta_E, margin, count, e_inf)
    res.energy, res.err_norm = E, np.sqrt(np.sum((truth.X - X) ** 2, axis=0))
    res.t = truth.grid.t
    res.eigenvalues = np.linalg.eigvals(p.sys.A)
    res.wall_ms = 1e3 * (time.perf_counter() - t0)
    return res


def _threads():
    try:
        return max(1, int(os.environ.get("MOR_THREADS", "1")))
    except ValueError:
        return 1


def run_pipeline(cfg):
    """Run every requested method on the configured system.

    Method-level numerical failures are recorded in the report (see
    :attr:`RunReport.failed`) rather than raised; failures while building
    the full problem propagate.
    """
    log = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ReductionWarning)
        p = build_problem(cfg)
        grid = simulate.TimeGrid.from_final(cfg.dt, cfg.t_final)
        X = simulate.analytic_trajectory(p.sys.A, p.x0, grid).states
        truth = Truth(grid, X, simulate.quadratic_energy(p.W, X))
        full = _full_result(p, truth, cfg)
    log += [{"method": "setup", "category": w.category.__name__, "message": str(w.message)}
            for w in caught if issubclass(w.category, ReductionWarning)]

    nthreads = _threads()
    results = []
    if nthreads == 1:
        for m in cfg.methods:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", ReductionWarning)
                results.append(_run_method(m, p, truth, cfg))
            log += [{"method": m, "category": w.category.__name__, "message": str(w.message)}
                    for w in caught if issubclass(w.category, ReductionWarning)]
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ReductionWarning)
            with ThreadPoolExecutor(max_workers=nthreads) as pool:
                results = list(pool.map(lambda m: _run_method(m, p, truth, cfg), cfg.methods))
        log += [{"method": "*", "category": w.category.__name__, "message": str(w.message)}
                for w in caught if issubclass(w.category, ReductionWarning)]
    return RunReport(cfg, results, log, full)


METRIC_COLUMNS = ["method", "k", "eta", "eta_E", "instability_margin", "unstable_modes",
                  "infinite_time_energy", "wall_ms"]


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _metric_row(r):
    if r.metrics is None:
        nan = math.nan
        return [r.method, r.k, nan, nan, nan, "", nan, round(r.wall_ms, 3)]
    m = r.metrics
    return [r.method, r.k, m.eta, m.eta_E, m.instability_margin, m.unstable_mode_count,
            m.infinite_time_energy, round(r.wall_ms, 3)]


def write_artifacts(report, out_dir):
    """Write metrics, eigenvalues, reduced operators and plot data to ``out_dir``.

    Files: ``metrics.csv``; ``eigs_<method>.csv`` (re, im);
    ``plot_<method>.csv`` (t, E, err_norm); ``A_<method>.txt``,
    ``B_<method>.txt``, ``C_<method>.txt`` in the matrix file format; and
    ``report.json`` with configuration, warnings and errors.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = ([report.full] if report.full is not None else []) + list(report.results)
    written = []
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(METRIC_COLUMNS)
        for r in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in _metric_row(r)])
    written.append(out / "metrics.csv")
    stride = report.config.plot_stride
    for r in rows:
        if r.eigenvalues is None:
            continue
        ev = r.eigenvalues[np.lexsort((-r.eigenvalues.imag, -r.eigenvalues.real))]
        with open(out / f"eigs_{r.method}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im"])
            for lam in ev:
                w.writerow([repr(float(lam.real)), repr(float(lam.imag))])
        with open(out / f"plot_{r.method}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "E", "err_norm"])
            for i in range(0, len(r.t), stride):
                w.writerow([repr(float(r.t[i])), repr(float(r.energy[i])), repr(float(r.err_norm[i]))])
        written += [out / f"eigs_{r.method}.csv", out / f"plot_{r.method}.csv"]
        if r.model is not None:
            for name in ("A", "B", "C"):
                path = out / f"{name}_{r.method}.txt"
                write_matrix(path, getattr(r.model, name))
                written.append(path)
    summary = {
        "config": report.config.to_dict(),
        "warnings": report.warnings,
        "errors": [{"method": r.method, "code": r.error_code, "message": r.error} for r in report.failed],
        "extras": {r.method: r.extras for r in rows if r.extras},
    }
    with open(out / "report.json", "w") as fh:
        json.dump(summary, fh, indent=2, default=str)
    written.append(out / "report.json")
    return written


def read_metrics(path):
    """Parse ``metrics.csv`` into a dict keyed by method."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for row in rows:
        out[row["method"]] = {k: (v if k == "method" else float(v) if v not in ("",) else math.nan)
                              for k, v in row.items()}
    return out
