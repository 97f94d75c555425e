"""
Damped and undamped mass-spring lattice
=======================================

A square lattice of masses coupled by springs. Motion along x is damped and
motion along y is not, so the model splits into an asymptotically stable
part and a purely oscillatory part. Reducing the two parts separately keeps
the oscillations alive in the reduced model and the energy bounded.
"""

# %%
import warnings

from spmor import ReductionWarning, RunConfig, run_pipeline

cfg = RunConfig.from_dict({
    "system": {"source": "builtin-spring", "grid": 9},
    "k": 16,
    "methods": ["pod", "sp1", "sp2"],
    "integration": {"t_final": 5.0},
})
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ReductionWarning)
    report = run_pipeline(cfg)

# %%
# POD on the full state picks up spurious growing modes; the two
# structure-preserving variants keep every eigenvalue in the closed left
# half-plane and conserve the reduced Hamiltonian of the undamped part.
for r in [report.full] + report.results:
    m = r.metrics
    drift = r.extras.get("hamiltonian_drift", float("nan"))
    print(f"{r.method:>5}  k={r.k:<4d} eta={m.eta:.3e}  margin={m.instability_margin:+.2e}  "
          f"unstable={m.unstable_mode_count:<3d} E_inf={m.infinite_time_energy:.5g}  drift={drift:.1e}")
