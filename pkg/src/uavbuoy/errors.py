class ConfigError(ValueError):
    """Invalid scenario file or parameter set."""


class ModelError(RuntimeError):
    """Fatal dynamics failure. ``state`` holds a dump of the offending state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class TensionUndefinedError(ModelError):
    """Cable is (nearly) vertical, so tension cannot be recovered from the buoy surge equation."""


class ReferenceInfeasibleError(ValueError):
    """Commanded UAV height cannot be reached with a taut cable."""
