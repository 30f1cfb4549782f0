"""Planar simulator of a quadrotor towing a floating buoy through waves."""

from uavbuoy.errors import ConfigError, ModelError, ReferenceInfeasibleError, TensionUndefinedError
from uavbuoy.params import Parameters
from uavbuoy.waves import WaveComponent, WaveField

__all__ = [
    "ConfigError",
    "ModelError",
    "Parameters",
    "ReferenceInfeasibleError",
    "TensionUndefinedError",
    "WaveComponent",
    "WaveField",
]

__version__ = "0.1.0"
