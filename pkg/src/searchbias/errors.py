"""Exception types shared across the package.

Each maps to one failure class surfaced by the CLI: bad caller input,
a resource/evaluation-table shape mismatch, a combinatorial size guard,
or arithmetic that cannot be carried out at the requested scale.
"""


class SearchBiasError(Exception):
    """Base class for all searchbias errors."""


class InvalidArgumentError(SearchBiasError, ValueError):
    """A caller-supplied value violates a precondition."""


class DomainMismatchError(SearchBiasError, ValueError):
    """An evaluation table does not cover the search space it is used with."""


class ResourceLimitError(SearchBiasError, RuntimeError):
    """A desk-scale guard (enumeration count, space size) was exceeded."""


class PrecisionError(SearchBiasError, ArithmeticError):
    """The requested quantity is not representable at the required precision."""
