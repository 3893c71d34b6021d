"""Unranked ordered trees (hedges) and the supported XML subset.

A hedge is a plain tuple of nodes, so concatenation is tuple ``+`` and the
empty hedge is ``()``.  Nodes are immutable.  Elements compare their
attributes as a set while keeping the original order for serialization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Tuple, Union
from xml.parsers import expat

from .errors import SerializationError, UnsupportedConstructError, XmlParseError

XTL_PREFIX = "xtl:"

_NAME_RE = re.compile(r"[^\s<>&/=\"']+\Z")


@dataclass(frozen=True)
class Text:
    value: str

    def __repr__(self):
        return f"Text({self.value!r})"


@dataclass(frozen=True, eq=False)
class Element:
    name: str
    attributes: Tuple[Tuple[str, str], ...] = ()
    children: Tuple["XmlNode", ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(tuple(a) for a in self.attributes))
        object.__setattr__(self, "children", tuple(self.children))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return (
            self.name == other.name
            and frozenset(self.attributes) == frozenset(other.attributes)
            and self.children == other.children
        )

    def __hash__(self):
        return hash((self.name, frozenset(self.attributes), self.children))

    def __repr__(self):
        parts = [repr(self.name)]
        if self.attributes:
            parts.append(repr(list(self.attributes)))
        if self.children:
            parts.append(repr(list(self.children)))
        return f"Element({', '.join(parts)})"

    def get(self, name, default=None):
        for key, value in self.attributes:
            if key == name:
                return value
        return default


XmlNode = Union[Element, Text]
Hedge = Tuple[XmlNode, ...]


def concat(*hedges: Iterable[XmlNode]) -> Hedge:
    out: list = []
    for h in hedges:
        out.extend(h)
    return tuple(out)


def is_valid_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


def is_xtl_name(name: str) -> bool:
    return name.startswith(XTL_PREFIX)


def string_value(node: XmlNode) -> str:
    if isinstance(node, Text):
        return node.value
    return "".join(string_value(c) for c in node.children)


def node_count(h: Hedge) -> int:
    return sum(1 + node_count(n.children) if isinstance(n, Element) else 1 for n in h)


def depth(h: Hedge) -> int:
    """Nesting depth; the empty hedge has depth 0, ``<a/>`` depth 1."""
    return max(
        (1 + depth(n.children) if isinstance(n, Element) else 1 for n in h),
        default=0,
    )


# -- parsing ----------------------------------------------------------------


class _Builder:
    def __init__(self, parser, preserve_space):
        self.parser = parser
        self.preserve_space = preserve_space
        self.stack = [("#document", [], [])]
        self.pending = []

    def _where(self):
        return self.parser.CurrentLineNumber, self.parser.CurrentColumnNumber + 1

    def _unsupported(self, what):
        raise UnsupportedConstructError(f"unsupported construct: {what}", *self._where())

    def flush(self):
        if self.pending:
            self.stack[-1][2].append(Text("".join(self.pending)))
            self.pending = []

    def start(self, name, attrs):
        self.flush()
        self._check_name(name, "element")
        pairs = []
        for i in range(0, len(attrs), 2):
            key = attrs[i]
            if key == "xmlns" or (key.startswith("xmlns:") and key != "xmlns:xtl"):
                self._unsupported(f"namespace declaration {key!r}")
            self._check_name(key, "attribute")
            pairs.append((key, attrs[i + 1]))
        self.stack.append((name, pairs, []))

    def end(self, name):
        self.flush()
        name, pairs, children = self.stack.pop()
        if not self.preserve_space and any(isinstance(c, Element) for c in children):
            children = [
                c for c in children if not (isinstance(c, Text) and not c.value.strip())
            ]
        self.stack[-1][2].append(Element(name, pairs, children))

    def chars(self, data):
        if len(self.stack) > 1:
            self.pending.append(data)

    def _check_name(self, name, kind):
        if ":" in name and not name.startswith(XTL_PREFIX) and name != "xmlns:xtl":
            self._unsupported(f"namespace-prefixed {kind} name {name!r}")
        if not is_valid_name(name):
            raise XmlParseError(f"illegal {kind} name {name!r}", *self._where())


def parse_xml(data: Union[str, bytes], preserve_space: bool = False) -> Hedge:
    """Parse one XML document into a single-root hedge.

    Comments are dropped.  Whitespace-only text that sits next to element
    siblings is dropped unless ``preserve_space`` is set.  Processing
    instructions, CDATA sections, DOCTYPE declarations and namespaces other
    than the lexical ``xtl`` prefix raise :class:`UnsupportedConstructError`.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate("UTF-8")
    parser.ordered_attributes = True
    builder = _Builder(parser, preserve_space)
    parser.StartElementHandler = builder.start
    parser.EndElementHandler = builder.end
    parser.CharacterDataHandler = builder.chars
    parser.CommentHandler = lambda text: None
    parser.ProcessingInstructionHandler = lambda t, d: builder._unsupported(
        "processing instruction"
    )
    parser.StartCdataSectionHandler = lambda: builder._unsupported("CDATA section")
    parser.StartDoctypeDeclHandler = lambda *a: builder._unsupported("DOCTYPE")
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise XmlParseError(
            expat.errors.messages[exc.code], exc.lineno, exc.offset + 1
        ) from None
    return tuple(builder.stack[0][2])


# -- serialization ----------------------------------------------------------

_TEXT_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", "\r": "&#13;"}
_ATTR_ESCAPES = dict(
    _TEXT_ESCAPES, **{'"': "&quot;", "'": "&apos;", "\n": "&#10;", "\t": "&#9;"}
)
_TEXT_RE = re.compile("[&<>\r]")
_ATTR_RE = re.compile("[&<>\r\"'\n\t]")


def escape_text(s: str) -> str:
    return _TEXT_RE.sub(lambda m: _TEXT_ESCAPES[m.group()], s)


def escape_attribute(s: str) -> str:
    return _ATTR_RE.sub(lambda m: _ATTR_ESCAPES[m.group()], s)


def _write(node, out):
    if isinstance(node, Text):
        out.append(escape_text(node.value))
        return
    if not is_valid_name(node.name):
        raise SerializationError(f"illegal element name {node.name!r}")
    out.append("<" + node.name)
    seen = set()
    for key, value in node.attributes:
        if key in seen:
            raise SerializationError(f"duplicate attribute {key!r} on <{node.name}>")
        if not is_valid_name(key):
            raise SerializationError(f"illegal attribute name {key!r}")
        seen.add(key)
        out.append(f' {key}="{escape_attribute(value)}"')
    if not node.children:
        out.append("/>")
        return
    out.append(">")
    for child in node.children:
        _write(child, out)
    out.append(f"</{node.name}>")


def serialize_xml(h: Hedge) -> str:
    out: list = []
    for node in h:
        _write(node, out)
    return "".join(out)
