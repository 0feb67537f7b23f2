"""Exception hierarchy.

Every error carries a short machine-readable ``kind`` and the process exit
code the CLI maps it to (2 for configuration problems, 3 for numerical
failures).
"""


class OutflowError(Exception):
    kind = "error"
    exit_code = 3

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context

    def record(self):
        rec = {"error": self.kind, "message": str(self)}
        for key, val in self.context.items():
            rec[key] = val if isinstance(val, (int, float, str, bool)) or val is None else repr(val)
        return rec


class DomainError(OutflowError, ValueError):
    kind = "domain"


class RangeError(OutflowError, ValueError):
    kind = "range"


class PreconditionError(OutflowError, ValueError):
    kind = "precondition"


class InputError(OutflowError, ValueError):
    kind = "input"


class MissingDataError(InputError):
    kind = "missing-data"


class InsufficientDataError(InputError):
    kind = "insufficient-data"


class InsufficientResolutionError(InputError):
    kind = "insufficient-resolution"


class QuadratureResolutionError(InputError):
    kind = "quadrature-resolution"


class NonConvergenceError(OutflowError, ArithmeticError):
    kind = "non-convergence"

    def __init__(self, message, residual=None, **context):
        super().__init__(message, residual=residual, **context)
        self.residual = residual


class ParameterRegimeError(NonConvergenceError):
    kind = "parameter-regime"


class PositivityLossError(OutflowError, ArithmeticError):
    kind = "positivity-loss"


class NumericalError(OutflowError, ArithmeticError):
    kind = "numerical"


class ConfigError(OutflowError, ValueError):
    kind = "config"
    exit_code = 2

    def __init__(self, message, line=None, key=None):
        super().__init__(message, line=line, key=key)
        self.line = line
        self.key = key
