"""Time-optimal control synthesis for a two-level quantum system with one bounded control."""

from .errors import ConsistencyError, DomainError
from .geometry import ModelParams

__all__ = ["ConsistencyError", "DomainError", "ModelParams"]
__version__ = "0.1.0"
