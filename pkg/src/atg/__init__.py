"""Single-shot logical state preparation on alternating Tanner graph cluster states."""

from .codes import CssCode, fixture, logical_basis, parse_code_file, validate_css
from .graph import AtgGraph, bell_pattern, build_atg

__version__ = "0.1.0"

__all__ = ["CssCode", "AtgGraph", "build_atg", "bell_pattern", "fixture", "logical_basis",
           "parse_code_file", "validate_css", "__version__"]
