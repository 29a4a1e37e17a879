"""Exception hierarchy for the tracker."""


class TrackingError(Exception):
    """Base class for all errors raised by bmatrack."""


class ConfigError(TrackingError, ValueError):
    pass


class RegionTooSmall(TrackingError):
    pass


class AllZeroWeights(TrackingError):
    pass


class LengthMismatch(TrackingError, ValueError):
    pass


class DegenerateWeights(TrackingError):
    pass


class FrameGeometryChanged(TrackingError):
    pass


class InvalidScenario(TrackingError, ValueError):
    pass


class UnknownScenario(TrackingError, KeyError):
    pass


class PPMError(TrackingError):
    """Base class for PPM decoding failures."""


class MalformedHeader(PPMError):
    pass


class MaxvalUnsupported(PPMError):
    pass


class TruncatedPixelData(PPMError):
    pass


class FrameSequenceError(TrackingError):
    """A frame directory is empty, out of order or has a gap in its numbering."""


class CSVFormatError(TrackingError, ValueError):
    pass
