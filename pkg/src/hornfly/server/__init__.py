"""Daemon, sessions, CLI, client adaptor, and the benchmark harness."""

from .batch import annotate_file, check_file
from .client import client_check
from .daemon import Daemon, default_port
from .session import Session, load_libdb

__all__ = [
    "annotate_file",
    "check_file",
    "client_check",
    "Daemon",
    "default_port",
    "Session",
    "load_libdb",
]
