"""The ``.spm`` model language: parsing, validation and canonical output."""

from .ast import ModelDocument, Span
from .build import Workspace, load, merge, validate
from .parser import (
    DuplicateId,
    EmptyOutcome,
    NonTotalTable,
    ParseError,
    SpecSyntaxError,
    UnresolvedReference,
    parse,
)
from .serialize import serialize

__all__ = [
    "DuplicateId", "EmptyOutcome", "ModelDocument", "NonTotalTable", "ParseError", "Span",
    "SpecSyntaxError", "UnresolvedReference", "Workspace", "load", "merge", "parse", "serialize",
    "validate",
]
