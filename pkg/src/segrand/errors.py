"""Exception types shared across the library."""


class SegrandError(Exception):
    """Base class for all library-specific errors."""


class ShapeMismatchError(SegrandError):
    """Two grids that must be aligned have different shapes."""


class EmptySelectionError(SegrandError):
    """A foreground mask keeps too few pixels to proceed."""


class DegenerateTotalError(SegrandError):
    """Fewer than two pixels: pair-based metrics carry no information."""


class ImpossibleTableError(SegrandError):
    """A metric denominator vanished while its numerator did not.

    This cannot happen for a contingency table built from real label maps;
    it is raised instead of returning garbage so that numeric or
    construction bugs surface immediately.
    """


class InvalidKError(SegrandError):
    """Requested class count is outside the feasible range."""


class TooLargeForExactError(SegrandError):
    """Exact permutation enumeration requested for too many pixels."""


class InvalidSampleCountError(SegrandError):
    """Monte-Carlo sample count must be at least one."""


class UnsupportedFormatError(SegrandError):
    """File is neither binary PGM nor the plain-text label format."""


class MalformedHeaderError(SegrandError):
    """Recognized format with an unparseable or inconsistent header."""


class TruncatedDataError(SegrandError):
    """File ends before the payload promised by its header."""


class LabelOutOfRangeError(SegrandError):
    """A label value does not fit the target file format."""


class IoFailureError(SegrandError):
    """Underlying file read or write failed."""


class DuplicateSampleIdError(SegrandError):
    """A manifest lists the same sample id twice."""


class EmptyManifestError(SegrandError):
    """A manifest contains a header but no entries."""


class EmptyInputError(SegrandError):
    """An aggregate over zero reports was requested."""
