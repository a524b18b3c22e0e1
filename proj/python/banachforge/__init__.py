"""Exact and floating-point norms on exotic sequence spaces, set-family
queries, finite-stage extension models, and falsification suites.

Exact mode returns scalars as rational strings ("3/2"); float mode returns
Python floats.  JSON-shaped values (models, vectors, reports) are plain
dicts.
"""

try:
    from ._core import (
        CapError,
        ParseError,
        bd_analysis,
        bd_build,
        bd_eval,
        bd_norm,
        family_admissible,
        family_member,
        family_regular,
        norm,
        suite_names,
        verify,
    )
except ImportError:  # in-tree builds leave the extension beside the package
    from _core import (
        CapError,
        ParseError,
        bd_analysis,
        bd_build,
        bd_eval,
        bd_norm,
        family_admissible,
        family_member,
        family_regular,
        norm,
        suite_names,
        verify,
    )

__all__ = [
    "CapError",
    "ParseError",
    "bd_analysis",
    "bd_build",
    "bd_eval",
    "bd_norm",
    "family_admissible",
    "family_member",
    "family_regular",
    "norm",
    "suite_names",
    "verify",
]

__version__ = "0.1.0"
