"""Polynomial families attached to configurations of points, and their determinant."""
from .geom import Configuration, ConfigurationError, DegenerateConfigurationError
from .maps import determinant, family, normalized_determinant

__all__ = [
    "Configuration",
    "ConfigurationError",
    "DegenerateConfigurationError",
    "determinant",
    "family",
    "normalized_determinant",
]
__version__ = "0.1.0"
