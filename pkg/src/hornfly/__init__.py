"""hornfly: incremental assertion checking for Horn-clause programs.

A goal-dependent abstract-interpretation engine with pluggable domains,
an assertion checker producing source-anchored diagnostics, a background
daemon speaking newline-delimited JSON, and a bounded concrete
interpreter used as a test oracle.
"""

__version__ = "0.1.0"
