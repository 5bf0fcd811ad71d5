"""Finite models of observers, perfect observation and self-observation."""

from .errors import ModelError
from .spaces import EITHER, NO, YES, OutcomeSet, Property, StatePropertySpace, Test
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = ["EITHER", "NO", "YES", "ModelError", "OutcomeSet", "Property", "StatePropertySpace",
           "Test", "Verdict", "__version__"]
