"""Abstract domain plug-ins and the property abstraction layer."""

from .base import BOTTOM, AbstractDomain, Bottom
from .modes import ModesDomain
from .pairsh import PairShDomain
from .props import Alpha, PropTable
from .regtypes import RegTypesDomain, TypeEnv

DOMAIN_IDS = ("modes", "pairsh", "regtypes")


def get_domain(domain_id: str, table: PropTable | None = None) -> AbstractDomain:
    if domain_id == "modes":
        return ModesDomain()
    if domain_id == "pairsh":
        return PairShDomain()
    if domain_id == "regtypes":
        env = table.env if table is not None else None
        return RegTypesDomain(env)
    raise KeyError(f"unknown domain: {domain_id}")


__all__ = [
    "BOTTOM",
    "AbstractDomain",
    "Bottom",
    "ModesDomain",
    "PairShDomain",
    "RegTypesDomain",
    "TypeEnv",
    "Alpha",
    "PropTable",
    "DOMAIN_IDS",
    "get_domain",
]
