"""Shared exception types."""


class MdsatError(Exception):
    """Base class for package errors."""


class StructuralError(MdsatError):
    """Invalid domain object (bad index, wrong arity, broken invariant)."""


class ParseError(MdsatError):
    """Malformed DIMACS input; carries a 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CapacityError(MdsatError):
    """Requested size exceeds an enforced capacity limit."""


class ConfigError(MdsatError):
    """Impossible or inconsistent configuration."""


class GenerationFailureError(MdsatError):
    """Rejection budget exhausted; carries attempt statistics."""

    def __init__(self, message: str, attempts: int, rejections: dict):
        super().__init__(message)
        self.attempts = attempts
        self.rejections = dict(rejections)


class ContractError(MdsatError):
    """Operation called outside its stated precondition."""


class CertainFailureError(MdsatError):
    """A clause check failed with certainty (pass probability below tol)."""

    def __init__(self, clause_index: int, check_index: int):
        super().__init__(
            f"clause {clause_index} fails with certainty at check {check_index}"
        )
        self.clause_index = clause_index
        self.check_index = check_index


class ConditioningError(MdsatError):
    """Gram matrix numerically singular; carries its smallest eigenvalue."""

    def __init__(self, smallest_eigenvalue: float):
        super().__init__(
            f"solution Gram matrix near-singular "
            f"(smallest eigenvalue {smallest_eigenvalue:.3e})"
        )
        self.smallest_eigenvalue = smallest_eigenvalue


class NonConvergenceError(MdsatError):
    """Iterative eigensolver failed to converge; carries residuals."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class InfiniteExpectationError(MdsatError):
    """Success probability is zero; expected runtime diverges."""
