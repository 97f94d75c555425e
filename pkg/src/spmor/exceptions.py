"""Exception hierarchy shared by all modules."""


class ReductionError(Exception):
    """Base class for errors raised by :mod:`spmor`.

    Each subclass carries a short machine-readable ``code`` so that the
    command line front end can report failures without parsing messages.
    """

    code = "reduction-error"


class KernelFailure(ReductionError):
    """A dense linear-algebra routine did not converge."""

    code = "kernel-failure"


class IllPosedEquation(ReductionError):
    """A Lyapunov/Sylvester operator is (numerically) singular."""

    code = "ill-posed-equation"


class NotPSDError(ReductionError):
    """A matrix expected to be positive semidefinite is indefinite."""

    code = "not-psd"


class SingularMatrixError(ReductionError):
    """A linear system is singular to working precision."""

    code = "singular-matrix"


class ContractViolation(ReductionError):
    """An argument breaks a documented precondition."""

    code = "contract-violation"


class DecompositionUnsupported(ReductionError):
    """The spectral decomposition cannot be built (defective marginal modes)."""

    code = "decomposition-unsupported"


class InsufficientRank(ReductionError):
    """Fewer than ``k`` nonzero singular values are available."""

    code = "insufficient-rank"


class TransformFailure(ReductionError):
    """No real symplectic transform could be constructed."""

    code = "transform-failure"


class PreconditionError(ReductionError):
    """A method was applied to a system outside its domain."""

    code = "precondition"


class StepFailure(ReductionError):
    """The implicit midpoint step matrix is singular."""

    code = "step-failure"


class SamplingError(ReductionError):
    """Snapshot interval is not a multiple of the time step."""

    code = "sampling"


class ReductionWarning(UserWarning):
    """Base class for conditions recorded in run reports."""


class TieWarning(ReductionWarning):
    """Truncation falls between (numerically) equal singular values."""


class RegularizationWarning(ReductionWarning):
    """A Lyapunov right-hand side was shifted by ``epsilon * I``."""


class AlphaSearchWarning(ReductionWarning):
    """The real canonical transform needed ``alpha != 0``."""
