"""Structure-preserving model reduction for marginally stable LTI systems."""

from .exceptions import ReductionError, ReductionWarning
from .lti import LtiSystem, classify_stability, decompose
from .pipeline import RunConfig, run_pipeline, write_artifacts

__all__ = [
    "LtiSystem",
    "ReductionError",
    "ReductionWarning",
    "RunConfig",
    "classify_stability",
    "decompose",
    "run_pipeline",
    "write_artifacts",
]
__version__ = "0.1.0"
