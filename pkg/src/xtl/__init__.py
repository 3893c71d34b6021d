"""XTL: one XML document that is both a template and a schema."""

from .algebra import Atom, Intersect, Minus, Union, enumerate_members, member
from .errors import XtlError
from .estimators import SchemaValidator, TemplateExpander
from .expander import ExpansionSettings, expand, is_fully_expanded
from .hedge import Element, Text, parse_xml, serialize_xml, string_value
from .reg import (
    EPSILON,
    AttrR,
    ElR,
    Epsilon,
    IncludeR,
    MacroR,
    Or,
    Star,
    TextR,
    Then,
    TxtR,
    canonical_eq,
    encode_document,
    first_set,
    normalize,
    nullable,
)
from .repo import Context, eval_query, parse_query, xml_repository
from .surface import parse_xtl, serialize_xtl
from .validator import ValidationReport, explain, oracle_validate, validate

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Intersect",
    "Minus",
    "Union",
    "enumerate_members",
    "member",
    "XtlError",
    "SchemaValidator",
    "TemplateExpander",
    "ExpansionSettings",
    "expand",
    "is_fully_expanded",
    "Element",
    "Text",
    "parse_xml",
    "serialize_xml",
    "string_value",
    "EPSILON",
    "AttrR",
    "ElR",
    "Epsilon",
    "IncludeR",
    "MacroR",
    "Or",
    "Star",
    "TextR",
    "Then",
    "TxtR",
    "canonical_eq",
    "encode_document",
    "first_set",
    "normalize",
    "nullable",
    "Context",
    "eval_query",
    "parse_query",
    "xml_repository",
    "parse_xtl",
    "serialize_xtl",
    "ValidationReport",
    "explain",
    "oracle_validate",
    "validate",
]
