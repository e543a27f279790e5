"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` that the CLI copies
into its reports.
"""


class HoroLivsicError(Exception):
    code = "error"


class DomainError(HoroLivsicError, ValueError):
    """An argument lies outside the domain of the operation."""

    code = "domain_error"


class DegenerateInputError(DomainError):
    code = "degenerate_input"


class EndpointCollisionError(DegenerateInputError):
    code = "endpoint_collision"


class ResourceError(HoroLivsicError):
    """A configured size cap would be exceeded."""

    code = "resource_cap"


class ObstructionError(HoroLivsicError):
    """A periodic orbit obstruction is violated."""

    code = "obstruction"

    def __init__(self, message, orbit=None, value=None):
        super().__init__(message)
        self.orbit = orbit
        self.value = value


class CoverageError(HoroLivsicError):
    """The orbit segment did not visit every cylinder."""

    code = "coverage"

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class InvarianceError(HoroLivsicError):
    code = "invariance"

    def __init__(self, message, residual=None, worst=None):
        super().__init__(message)
        self.residual = residual
        self.worst = worst


class BracketError(HoroLivsicError):
    code = "bracket"


class ConfigError(HoroLivsicError):
    code = "config"
