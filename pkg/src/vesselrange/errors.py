"""Exception types raised by the ranging pipeline."""


class VesselRangeError(Exception):
    """Base class for every error raised by this package."""


class InvalidPoseError(VesselRangeError, ValueError):
    pass


class InvalidConfigurationError(VesselRangeError, ValueError):
    pass


class InvalidAltitudeError(InvalidConfigurationError):
    pass


class BehindCameraError(VesselRangeError, ValueError):
    pass


class NoIntersectionError(VesselRangeError, ValueError):
    pass


class DegenerateHullError(VesselRangeError, ValueError):
    pass


class HullOutOfViewError(VesselRangeError):
    pass


class MaskFormatError(VesselRangeError, ValueError):
    """Raised when a label mask file cannot be parsed."""


class PlacementError(VesselRangeError, RuntimeError):
    """Raised when scene generation runs out of placement attempts."""


class ConfigError(VesselRangeError, ValueError):
    """Raised for malformed run-configuration files.

    The message always names the offending field.
    """
