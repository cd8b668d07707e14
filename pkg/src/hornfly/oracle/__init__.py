"""Bounded concrete interpreter: the test oracle."""

from .conform import (
    CONSISTENT,
    UNKNOWN,
    VIOLATED,
    check_calls_concrete,
    check_success_concrete,
    find_success_witness,
    run_bounded,
)
from .enum import enum_substs, enum_terms, sample_terms
from .interp import Event, Interpreter, Trace
from .unify import resolve, unify, walk

__all__ = [
    "CONSISTENT",
    "UNKNOWN",
    "VIOLATED",
    "check_calls_concrete",
    "check_success_concrete",
    "find_success_witness",
    "run_bounded",
    "enum_substs",
    "enum_terms",
    "sample_terms",
    "Event",
    "Interpreter",
    "Trace",
    "resolve",
    "unify",
    "walk",
]
