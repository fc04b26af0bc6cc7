"""Exception classes.

Every error carries an ``exit_code`` so the command-line front end can map
failures onto distinct, machine-readable process exit statuses.
"""


class TvarSpreadError(Exception):
    """Base class for all package errors."""

    exit_code = 1
    code = "error"


class InvalidPriorError(TvarSpreadError, ValueError):
    exit_code = 10
    code = "invalid_prior"


class InvalidArgumentError(TvarSpreadError, ValueError):
    exit_code = 11
    code = "invalid_argument"


class NonFiniteObservationError(InvalidArgumentError):
    exit_code = 12
    code = "non_finite_observation"


class ConditioningError(TvarSpreadError, ArithmeticError):
    """Posterior covariance lost positive semi-definiteness beyond tolerance."""

    exit_code = 13
    code = "conditioning"


class InvalidRecordError(TvarSpreadError, ValueError):
    exit_code = 14
    code = "invalid_record"


class EmptyInputError(TvarSpreadError, ValueError):
    exit_code = 15
    code = "empty_input"


class ConvergenceConditionError(TvarSpreadError, ValueError):
    """Raised when ``delta_i >= phi_i**2`` so the limiting series diverges."""

    exit_code = 16
    code = "convergence_condition"


class DegenerateRegressorError(TvarSpreadError, ArithmeticError):
    exit_code = 17
    code = "degenerate_regressor"


class InputFileError(TvarSpreadError, OSError):
    exit_code = 20
    code = "missing_file"


class MalformedHeaderError(TvarSpreadError, ValueError):
    exit_code = 21
    code = "malformed_header"


class EmptyBodyError(TvarSpreadError, ValueError):
    exit_code = 22
    code = "empty_body"


class RowParseError(TvarSpreadError, ValueError):
    """One or more data rows failed to parse; ``lines`` holds their numbers."""

    exit_code = 23
    code = "row_parse"

    def __init__(self, message, lines=()):
        super().__init__(message)
        self.lines = list(lines)


class ConfigError(TvarSpreadError, ValueError):
    exit_code = 24
    code = "config"
