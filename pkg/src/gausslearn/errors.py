"""Exception hierarchy."""


class GaussLearnError(Exception):
    pass


class ParameterError(GaussLearnError, ValueError):
    """Infeasible or out-of-range parameters."""


class GenerationError(GaussLearnError):
    """Random graph generation gave up after the rejection budget."""


class GraphValidationError(GaussLearnError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid graph: " + "; ".join(self.violations))


class DimensionError(GaussLearnError, ValueError):
    """Vectors or weights of mismatched length."""


class SingularMatrixError(GaussLearnError, ArithmeticError):
    """Gram matrix is singular or not positive definite."""


class ConvergenceBoundError(GaussLearnError):
    """The process failed to reach a fixed point within the allowed rounds.

    Carries the partial trace so the failure can be inspected.
    """

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace
