"""Textual block notation: printing, parsing, and LLM-output repair."""

from .parser import FailedScript, ParseDiagnostic, ParsedFragment, ParseResult, parse_fragments
from .printer import PROGRAM_SCOPE, AnnotatedText, print_procedure, print_program, print_script
from .repair import repair_text

__all__ = [
    "AnnotatedText",
    "FailedScript",
    "PROGRAM_SCOPE",
    "ParseDiagnostic",
    "ParseResult",
    "ParsedFragment",
    "parse_fragments",
    "print_procedure",
    "print_program",
    "print_script",
    "repair_text",
]
