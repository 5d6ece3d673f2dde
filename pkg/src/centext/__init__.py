"""Exact toolkit for central extensions, quasimorphisms and finite HHS models."""
from __future__ import annotations

from .errors import CentextError, InputError, ResourceCapError, StructuralError, VerificationFailure

__version__ = "0.1.0"
__all__ = ["CentextError", "InputError", "ResourceCapError", "StructuralError", "VerificationFailure"]
