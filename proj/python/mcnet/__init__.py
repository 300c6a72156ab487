"""Interpreter and semantic toolkit for networks of measurement-calculus agents.

The heavy lifting lives in the compiled extension ``mcnet._core``; this
package re-exports its surface.
"""

from ._core import (
    McnetError,
    Network,
    check_compose,
    check_context,
    check_schedules,
    denote,
    equivalent,
    library,
    par_compose,
    parse_network,
    run,
    seq_compose,
)

__all__ = [
    "McnetError",
    "Network",
    "check_compose",
    "check_context",
    "check_schedules",
    "denote",
    "equivalent",
    "library",
    "par_compose",
    "parse_network",
    "run",
    "seq_compose",
]
