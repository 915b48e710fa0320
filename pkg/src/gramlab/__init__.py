"""Grammar-based coding laboratory.

Admissible grammars and their algebra, a local grammar encoder with a
prefix-free integer code, minimal and heuristic grammar transforms, and a
simulator for the Santa Fe process with its ternary stationary coding.
"""

from .coder import DecodeError, IntCode, code_length, decode_grammar, encode_grammar
from .grammar import FLAT, GENERAL, Grammar, GrammarClass, GrammarError, expand, nt, voc, yk_length
from .kernels import BACKEND
from .transforms import Objective, TransformSpec, exhaustive_minimal, greedy_transform, kblock_transform

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DecodeError",
    "FLAT",
    "GENERAL",
    "Grammar",
    "GrammarClass",
    "GrammarError",
    "IntCode",
    "Objective",
    "TransformSpec",
    "code_length",
    "decode_grammar",
    "encode_grammar",
    "exhaustive_minimal",
    "expand",
    "greedy_transform",
    "kblock_transform",
    "nt",
    "voc",
    "yk_length",
]
