"""Exception types raised across the matching pipeline."""


class SolematchError(Exception):
    """Base class for all package-specific errors."""


class FormatError(SolematchError):
    """Input image or file has an unusable shape or encoding."""


class EmptyCloudError(SolematchError):
    """An operation that needs points received an empty cloud."""


class DegenerateCutError(SolematchError):
    """A partial-print cut discarded every point."""


class TooFewPointsError(SolematchError):
    """Clustering was asked for more clusters than there are points."""


class UndefinedMetricError(SolematchError):
    """A similarity metric is undefined on this input (recorded as missing)."""


class TooSmallError(SolematchError):
    """Image smaller than the analysis window."""


class DegenerateLabelsError(SolematchError):
    """Training data contains a single class."""


class SchemaError(SolematchError):
    """Feature columns do not match what the model was trained on."""


class StateError(SolematchError):
    """Operation requires a fitted model or imputer."""


class PairingError(SolematchError):
    """A scenario's pairing constraints cannot be satisfied."""
