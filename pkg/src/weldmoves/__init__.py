"""Gauss-diagram calculus for welded knotted objects: local moves, move
macros, classifying invariants, and equivalence decision procedures."""

from .diagram import (CLOSED, OPEN, DiagramError, GaussDiagram, ParseError,
                      close, equal_raw, is_braid_form, open_at,
                      parse_gauss_code, relabel_strands, serialize, stack)
from .moves import (ALL_KINDS, WELDED_REIDEMEISTER, MoveApplication,
                    MoveError, MoveSequence, Portion, SequenceError,
                    apply_move, apply_sequence, enumerate_moves)

__all__ = [
    "CLOSED", "OPEN", "DiagramError", "GaussDiagram", "ParseError",
    "close", "equal_raw", "is_braid_form", "open_at", "parse_gauss_code",
    "relabel_strands", "serialize", "stack",
    "ALL_KINDS", "WELDED_REIDEMEISTER", "MoveApplication", "MoveError",
    "MoveSequence", "Portion", "SequenceError", "apply_move",
    "apply_sequence", "enumerate_moves",
]

__version__ = "0.1.0"
