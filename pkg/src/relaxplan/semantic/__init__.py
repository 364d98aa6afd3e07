"""Semantic operators: problem generation, repair and goal adaptation."""

from .base import (
    CAPABILITIES,
    BackendError,
    GoalSpec,
    NoAlternative,
    NoProgress,
    NothingToRelax,
    RetriesExhausted,
    SemanticBackend,
    SemanticError,
    UnparseableOutput,
    Verdict,
)
from .llm import LLMBackend, LLMConfig, extract_block, replay_transport
from .scripted import FAMILY_FILES, RelaxEntry, RuleTable, RuleTableError, ScriptedBackend

__all__ = [
    "CAPABILITIES", "BackendError", "GoalSpec", "NoAlternative", "NoProgress", "NothingToRelax",
    "RetriesExhausted", "SemanticBackend", "SemanticError", "UnparseableOutput", "Verdict",
    "LLMBackend", "LLMConfig", "extract_block", "replay_transport",
    "FAMILY_FILES", "RelaxEntry", "RuleTable", "RuleTableError", "ScriptedBackend",
]
