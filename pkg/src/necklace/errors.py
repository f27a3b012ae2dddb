"""Exception hierarchy.

Cap errors (truncation, resource limits, non-stabilisation) are kept apart
from input errors so that a truncated computation is never reported as a
negative mathematical verdict.
"""


class NecklaceError(Exception):
    """Base class for all package errors."""


class MalformedInputError(NecklaceError):
    """Input that cannot be parsed or violates a structural schema."""


class MalformedAddressError(MalformedInputError):
    pass


class SpecError(MalformedInputError):
    """A glue table that is structurally invalid (duplicate index, bad symbol...)."""


class CapError(NecklaceError):
    """A configured resource or level cap was hit before an answer was reached."""


class NotACutError(NecklaceError):
    pass


class ParameterError(NecklaceError):
    """Builder parameters outside their admissible range."""


class ExtractionError(NecklaceError):
    """Symbolic gluing data could not be recovered from a geometric IFS."""
