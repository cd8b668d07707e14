"""The abstract-domain plug-in interface.

A domain supplies the lattice operations and the transfer functions the
fixpoint engine is generic over. Values are immutable; every operation
returns a new value. Binary operations require both arguments to range
over the same variable set (project/rename first), and violations are
programming errors, not analysis results.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Mapping, Sequence

from ..terms import Term, Var


class Bottom:
    """Shared unreachable-state value, absorbing for glb, identity for lub."""

    _instance: "Bottom | None" = None

    def __new__(cls) -> "Bottom":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "<bottom>"


BOTTOM = Bottom()


class AbstractDomain(ABC):
    domain_id: str = ""

    # -- lattice -------------------------------------------------------

    def bottom(self) -> Any:
        return BOTTOM

    def is_bottom(self, v: Any) -> bool:
        return v is BOTTOM

    @abstractmethod
    def top(self, vars: Sequence[str]) -> Any:
        """No information about any of the variables."""

    @abstractmethod
    def fresh(self, vars: Sequence[str]) -> Any:
        """All variables free and pairwise independent (new clause locals)."""

    @abstractmethod
    def vars_of(self, v: Any) -> tuple[str, ...]: ...

    @abstractmethod
    def leq(self, a: Any, b: Any) -> bool: ...

    @abstractmethod
    def lub(self, a: Any, b: Any) -> Any: ...

    @abstractmethod
    def glb(self, a: Any, b: Any) -> Any: ...

    def widen(self, old: Any, new: Any) -> Any:
        """Default for finite-height domains: plain lub."""
        return self.lub(old, new)

    def equal(self, a: Any, b: Any) -> bool:
        return a == b

    # -- structure -----------------------------------------------------

    @abstractmethod
    def restrict(self, v: Any, vars: Sequence[str]) -> Any:
        """Project onto a variable subset (extra names are ignored)."""

    @abstractmethod
    def rename(self, v: Any, mapping: Mapping[str, str]) -> Any: ...

    @abstractmethod
    def combine(self, v: Any, w: Any) -> Any:
        """Conjoin two values over disjoint variable sets."""

    # -- transfer ------------------------------------------------------

    @abstractmethod
    def amgu(self, v: Any, x: Var, t: Term) -> Any:
        """Sound over-approximation of unifying variable x with term t."""

    def refine(self, a: Any, b: Any) -> Any:
        """Sound assume-meet: like glb but never under-approximates the
        concrete intersection (domains with an incomplete glb override)."""
        return self.glb(a, b)

    def incompatible(self, a: Any, b: Any) -> bool:
        """True only when the concretizations are provably disjoint."""
        if self.is_bottom(a) or self.is_bottom(b):
            return True
        return self.is_bottom(self.glb(a, b))

    def is_empty_value(self, v: Any) -> bool:
        """True when the concretization is empty (bottom, or an empty
        per-variable component in domains that track them)."""
        return self.is_bottom(v)

    def instantiation_closure(self, v: Any) -> Any:
        """Upward closure under further variable binding: keeps only the
        facts that survive arbitrary instantiation (e.g. groundness), so a
        call pattern can soundly constrain a success pattern."""
        if self.is_bottom(v):
            return v
        return self.top(self.vars_of(v))

    # -- canonical keys and serialization -------------------------------

    @abstractmethod
    def to_key(self, v: Any, ordered_vars: Sequence[str]) -> Any:
        """Hashable payload positional in ordered_vars (canonical renaming)."""

    @abstractmethod
    def from_key(self, payload: Any, ordered_vars: Sequence[str]) -> Any: ...

    @abstractmethod
    def render(self, v: Any) -> str: ...

    @abstractmethod
    def value_to_json(self, v: Any) -> Any: ...

    @abstractmethod
    def value_from_json(self, data: Any) -> Any: ...
