"""Exception hierarchy shared by every module.

The CLI maps each family to its own exit code, so callers can tell a bad
config from a broken model from a numerical breakdown.
"""


class SimlabError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(SimlabError, ValueError):
    """Invalid user input: bad parameters, malformed files, unknown names."""

    exit_code = 2


class ModelError(SimlabError):
    """A model invariant was violated at run time."""

    exit_code = 3


class NumericalError(SimlabError, ArithmeticError):
    """Non-finite values, non-convergence or an ill-conditioned factorization."""

    exit_code = 4
