"""
One-dimensional benchmark
=========================

An eight-state system with four asymptotically stable and four purely
imaginary eigenvalues, reduced to dimension four by every method in the
package. The structure-preserving reductions keep the oscillatory modes on
the imaginary axis, so the reduced energy settles to a finite value instead
of decaying or blowing up.
"""

# %%
# Run all methods
# ---------------
import math
import sys
import warnings

import numpy as np

from spmor import ReductionWarning, RunConfig, run_pipeline

cfg = RunConfig.from_dict({"system": {"source": "builtin-1d"}})
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ReductionWarning)
    report = run_pipeline(cfg)

# %%
# Error and energy table
# ----------------------
# ``eta`` is the relative state error over the whole window and ``E_inf``
# the limit of the system energy as t grows.
print(f"{'method':>6} {'eta':>10} {'eta_E':>10} {'margin':>10} {'E_inf':>9}")
for r in [report.full] + report.results:
    m = r.metrics
    print(f"{r.method:>6} {m.eta:10.4g} {m.eta_E:10.4g} {m.instability_margin:10.2e} {m.infinite_time_energy:9.5g}")

# %%
# Reduced spectra
# ---------------
for r in report.results:
    w = np.sort_complex(r.eigenvalues)
    print(f"{r.method:>6}: " + "  ".join(f"{z.real:+.4f}{z.imag:+.4f}i" for z in w))

# %%
# Energy histories
# ----------------
# Plotted when matplotlib is available; the data are also written by
# ``spmor bench-1d`` as ``plot_<method>.csv``.
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)

fig, ax = plt.subplots(figsize=(6, 3.5))
for r in [report.full] + report.results:
    E = np.where(np.isfinite(r.energy), r.energy, np.nan)
    ax.semilogy(r.t, E, label=r.method)
ax.set_xlabel("t")
ax.set_ylabel("E(t)")
ax.set_ylim(1e-2, 1e1)
ax.legend(ncol=3, fontsize=8)
fig.tight_layout()
fig.savefig("bench_1d_energy.png", dpi=120)
