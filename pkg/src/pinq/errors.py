"""Exception types shared across the package."""


class PinqError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PinqError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class ResourceLimitError(PinqError):
    """Requested matrix or state exceeds the configured qubit ceiling."""


class UnsupportedTermError(PinqError):
    """A Hamiltonian term falls outside the set a reduction accepts."""


class PreconditionError(PinqError):
    """An operation's input contract is violated (bad bounds, impure state, ...)."""


class ConvergenceError(PinqError):
    """Iterative eigensolver failed to converge within its iteration budget."""


class SurvivalUnderflowError(PinqError):
    """Post-selected trajectory lost essentially all norm; result is meaningless."""


class PathConstructionError(PinqError):
    """A requested ground-space path could not be realized within tolerance."""
