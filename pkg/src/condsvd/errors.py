"""Exception hierarchy shared by every module of the package."""


class CondSvdError(Exception):
    """Base class for all errors raised by condsvd."""


class InputError(CondSvdError, ValueError):
    """Input matrix is malformed or violates an operation's precondition."""


class DimensionError(InputError):
    """Shapes are not conformable."""


class NotHermitianError(InputError):
    pass


class NotPSDError(InputError):
    pass


class InfeasibleError(CondSvdError):
    """The dimensions or the spectrum of B admit no conditional decomposition.

    The offending :class:`~condsvd.conditional.FeasibilityReport` is kept on
    ``report`` when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularBError(InfeasibleError):
    """A singular value of B that the construction divides by is numerically zero."""

    def __init__(self, index, value, threshold, report=None):
        super().__init__(
            f"B singular within tolerance: sigma_B[{index}] = {value:.6g} "
            f"<= threshold {threshold:.6g}",
            report,
        )
        self.index = index
        self.value = value
        self.threshold = threshold


class NotExactError(CondSvdError):
    """A feasible pair is not exactly decomposable (strict mode only)."""

    def __init__(self, residual_tail, residual_rel):
        super().__init__(
            f"not exactly decomposable: residual_tail = {residual_tail:.17g} "
            f"(relative {residual_rel:.3g})"
        )
        self.residual_tail = residual_tail
        self.residual_rel = residual_rel


class ConvergenceError(CondSvdError, ArithmeticError):
    """An iterative solver hit its sweep cap."""
