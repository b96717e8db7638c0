"""Exception hierarchy shared by every module."""


class BalanceClustError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BalanceClustError, ValueError):
    """Malformed or inconsistent input data (empty sets, dimension mismatch)."""


class InvalidParameterError(BalanceClustError, ValueError):
    """A tuning parameter is outside its admissible range."""


class ModelParseError(BalanceClustError, ValueError):
    """A serialized model document could not be parsed."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ModelValidationError(BalanceClustError, ValueError):
    """A parsed model document violates a model invariant."""

    def __init__(self, invariant, detail=""):
        msg = f"invariant violated: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.invariant = invariant


class UnsupportedVersionError(ModelParseError):
    pass


class RegenerationStalledError(BalanceClustError, RuntimeError):
    """Random throw exhausted its attempt budget before reaching the target."""

    def __init__(self, accepted, target, attempts):
        self.accepted = accepted
        self.target = target
        self.attempts = attempts
        self.acceptance_rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"regeneration stalled: {accepted}/{target} points accepted after "
            f"{attempts} attempts (acceptance rate {self.acceptance_rate:.2e})"
        )


class CsvParseError(BalanceClustError, ValueError):
    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NodeError(BalanceClustError, RuntimeError):
    """A simulated node failed while building or shipping its local model."""

    def __init__(self, node_id, cause):
        super().__init__(f"node {node_id}: {cause}")
        self.node_id = node_id
        self.cause = cause
