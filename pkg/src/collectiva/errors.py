"""Exception taxonomy shared across the package.

The CLI maps these onto its exit-code contract: InputError -> 2,
CapacityError -> 3; everything that completes analysis exits 0.
"""


class CollectivaError(Exception):
    """Base class for all package errors."""


class InputError(CollectivaError):
    """Malformed, inconsistent, or out-of-domain input."""


class NotMeasurableError(InputError):
    """An event or variable is not measurable in the given algebra."""


class NullConditioningError(InputError):
    """Conditioning on an event of probability zero."""


class CapacityError(CollectivaError):
    """A configured size/memory cap would be exceeded."""


class ConstructionError(CollectivaError):
    """A constructive search exhausted its budget without a valid object."""


class CodecIntegrityError(CollectivaError):
    """A codec failed its lossless round-trip check."""
