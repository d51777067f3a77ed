"""Exception hierarchy shared across the toolkit."""


class PickPlanError(Exception):
    """Base class for all toolkit errors."""


class IoError(PickPlanError):
    """A file could not be read, decoded, or written."""


class RegistrationError(PickPlanError):
    """Color and depth images do not form a registered pair."""


class EmptyDepthError(PickPlanError):
    """A depth image contains no valid (non-zero) pixels."""


class InvalidDepthError(PickPlanError):
    """A depth value is non-positive where a positive one is required."""


class BehindCameraError(PickPlanError):
    """A 3D point with z <= 0 cannot be projected."""


class OutOfBoundsError(PickPlanError):
    """A pixel region extends past the image bounds."""


class NoGraspError(PickPlanError):
    """No grasp candidate survived sampling and filtering."""


class NoSuctionError(PickPlanError):
    """No suction sample satisfied the planarity and tilt limits."""


class FrustumError(PickPlanError):
    """A scene object lies outside the camera frustum."""


class PlacementError(PickPlanError):
    """Random scene placement failed to satisfy the overlap budget."""


class ProtocolError(PickPlanError):
    """A pipeline stage was invoked out of protocol order."""


class ConfigError(PickPlanError):
    """A configuration file or value is malformed."""
