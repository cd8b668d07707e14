"""Fixpoint engine, analysis graph, incremental repair, persistence."""

from .db import StaleDb, load_db, module_fingerprint, save_db
from .fixpoint import AnalysisAborted, Analyzer, EngineError, analyze, lookup_renamed
from .graph import AnalysisNode, AnalysisResult, CallKey, Stats
from .incremental import incremental_update
from .workspace import BUILTIN_MODULE, Workspace, qkey, split_qkey

__all__ = [
    "StaleDb",
    "load_db",
    "module_fingerprint",
    "save_db",
    "AnalysisAborted",
    "Analyzer",
    "EngineError",
    "analyze",
    "lookup_renamed",
    "AnalysisNode",
    "AnalysisResult",
    "CallKey",
    "Stats",
    "incremental_update",
    "BUILTIN_MODULE",
    "Workspace",
    "qkey",
    "split_qkey",
]
