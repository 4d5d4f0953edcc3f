"""Exception taxonomy for the wave lab.

Every failure mode that a caller might want to catch selectively gets its
own class.  The CLI maps ConfigError to exit code 2 and every other
NlwError to exit code 3; check failures (which are results, not errors)
map to exit code 1.
"""


class NlwError(Exception):
    """Base class for all package errors."""


class ConfigError(NlwError):
    """Malformed or inconsistent configuration input."""


class OutOfRangeError(NlwError):
    """A model parameter lies outside its admissible range."""


class BoundaryLeakError(NlwError):
    """Initial data carries too much weight at the outer grid boundary."""


class DivergentIntegralError(NlwError):
    """A weighted integral grows decade over decade instead of settling."""


class BlowupError(NlwError):
    """The evolved field exceeded the runaway threshold."""


class NoContractionError(NlwError):
    """Picard iteration failed to reach tolerance within the sweep cap."""


class OffGridError(NlwError):
    """A requested time, radius, or characteristic label is not grid-aligned."""


class TailNotConvergedError(NlwError):
    """A truncated integral is still dominated by its unresolved tail."""


class WeightInvalidError(NlwError):
    """A Morawetz weight violates its normalization or growth hypotheses."""


class ShortSpanError(NlwError):
    """Too few dyadic samples fit inside the available time span."""


class DegenerateFitError(NlwError):
    """Power-law fit input contains non-positive values or too few points."""
