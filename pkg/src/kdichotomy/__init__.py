"""Toolkit for k-automatic sets of naturals."""
from .automaton import Automaton
from .basek import BaseKSet

__version__ = "0.1.0"
__all__ = ["Automaton", "BaseKSet"]
