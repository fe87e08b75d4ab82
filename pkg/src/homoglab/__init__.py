"""Workbench for finite fragments of binary homogeneous structures."""

from .structure import FinStructure, Signature
from .types import AtomicType, atp

__all__ = ["FinStructure", "Signature", "AtomicType", "atp"]
__version__ = "0.1.0"
