"""Exception hierarchy; ``code`` and ``exit_status`` feed the CLI error line."""


class TripletError(Exception):
    code = "ERROR"
    exit_status = 1


class DomainError(TripletError, ValueError):
    """An argument lies outside the domain of the operation."""

    code = "DOMAIN"
    exit_status = 2


class DataError(TripletError):
    """Malformed, empty, or exhausted input data."""

    code = "DATA"
    exit_status = 3


class NumericalError(TripletError, ArithmeticError):
    code = "NUMERICAL"
    exit_status = 4


class SingularPriorError(NumericalError):
    """Class prior too close to 1/2: the mixture matrix loses rank."""

    code = "SINGULAR_PRIOR"


class EstimationError(NumericalError):
    """Keep/flip counts inconsistent with any class prior."""

    code = "ESTIMATION"


class DivergenceError(NumericalError):
    code = "DIVERGED"
