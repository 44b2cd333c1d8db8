"""circir: an array IR for multi-party programs, with a checker, a simulated
runtime, and a splitter that groups computation into circuit blocks."""

from .checker import check_program
from .diagnostics import Diagnostic, ParseError
from .errors import CircirError
from .parser import parse_program
from .printer import pretty_print

__version__ = "0.1.0"

__all__ = ["CircirError", "Diagnostic", "ParseError", "check_program", "parse_program", "pretty_print"]
