"""Finite HHS models: axiom checking, restriction to unbounded domains, quotients."""
from __future__ import annotations

from .axioms import AXIOMS, AxiomReport, AxiomResult, check_axioms, derive_theta, min_delta, replay_witness
from .builders import builtin_model, cycle_model, grid_model, path_model, resolve_model
from .model import HHSModel, load_model, model_from_doc, model_to_doc
from .transform import quotient_model, restrict_to_unbounded

__all__ = [
    "AXIOMS", "AxiomReport", "AxiomResult", "HHSModel", "builtin_model", "check_axioms", "cycle_model",
    "derive_theta", "grid_model", "load_model", "min_delta", "model_from_doc", "model_to_doc", "path_model",
    "quotient_model", "replay_witness", "resolve_model", "restrict_to_unbounded",
]
