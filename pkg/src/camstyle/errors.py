class CamstyleError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(CamstyleError):
    """Invalid configuration value or combination."""


class DatasetError(CamstyleError):
    """Dataset loading or construction failed."""


class CheckpointError(CamstyleError):
    """Checkpoint file is missing, unreadable, or has the wrong format."""
