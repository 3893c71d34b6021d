"""Concrete XTL syntax: XML with a small reserved ``xtl:`` vocabulary.

======================================  ===================================
surface tag                             term
======================================  ===================================
``<xtl:text select=Q/>``                ``TextR(Q)``
``<xtl:attribute name=N select=Q/>``    ``AttrR(N, Q)``
``<xtl:include select=Q/>``             ``IncludeR(Q)``
``<xtl:call-macro name=M/>``            ``MacroR(M)``
``<xtl:macro name=M>...</xtl:macro>``   macro table entry ``M``
``<xtl:for-each select=Q>...``          ``Star(body, Q)``
``<xtl:choice>a b ...</xtl:choice>``    ``Or(a, Or(b, ...))``
``<xtl:template>...</xtl:template>``    root wrapper; entry is its chain
======================================  ===================================

Everything else is literal: elements become ``ElR`` and text ``TxtR``.
Macros are global to the document and must be defined (opened) before
their first call in document order, which still admits self-recursion.
"""

from __future__ import annotations

from typing import List, Mapping, Tuple

from .errors import NotSerializableError, UnknownMacroError, XtlSyntaxError
from .hedge import Element, Hedge, Text, XmlNode, is_xtl_name
from .reg import (
    AttrR,
    ElR,
    Epsilon,
    IncludeR,
    MacroR,
    MacroTable,
    Or,
    Reg,
    Star,
    TextR,
    Then,
    TxtR,
    alternatives,
    chain,
    chain_items,
    normalize,
)

TEXT = "xtl:text"
ATTRIBUTE = "xtl:attribute"
INCLUDE = "xtl:include"
CALL_MACRO = "xtl:call-macro"
MACRO = "xtl:macro"
FOR_EACH = "xtl:for-each"
CHOICE = "xtl:choice"
TEMPLATE = "xtl:template"

_LEAF_TAGS = {TEXT: ("select",), ATTRIBUTE: ("name", "select"), INCLUDE: ("select",),
              CALL_MACRO: ("name",)}


class _Reader:
    def __init__(self):
        self.macros: MacroTable = {}
        self.opened = set()

    def required(self, node: Element, attr: str) -> str:
        value = node.get(attr)
        if value is None:
            raise XtlSyntaxError(f"<{node.name}> requires attribute {attr!r}")
        return value

    def sequence(self, nodes) -> Reg:
        items = []
        for node in nodes:
            item = self.node(node)
            if item is not None:
                items.append(item)
        return chain(items)

    def node(self, node: XmlNode):
        if isinstance(node, Text):
            return TxtR(node.value)
        name = node.name
        if not is_xtl_name(name):
            return ElR(name, node.attributes, self.sequence(node.children))
        if name in _LEAF_TAGS:
            values = [self.required(node, a) for a in _LEAF_TAGS[name]]
            if node.children:
                raise XtlSyntaxError(f"<{name}> must be empty")
            if name == TEXT:
                return TextR(*values)
            if name == ATTRIBUTE:
                return AttrR(*values)
            if name == INCLUDE:
                return IncludeR(*values)
            if values[0] not in self.opened:
                raise UnknownMacroError(values[0])
            return MacroR(values[0])
        if name == MACRO:
            macro = self.required(node, "name")
            if macro in self.opened:
                raise XtlSyntaxError(f"duplicate macro {macro!r}")
            self.opened.add(macro)
            self.macros[macro] = normalize(self.sequence(node.children))
            return None
        if name == FOR_EACH:
            return Star(self.sequence(node.children), node.get("select"))
        if name == CHOICE:
            alts = [a for a in (self.node(c) for c in node.children) if a is not None]
            if len(alts) < 2:
                raise XtlSyntaxError("<xtl:choice> needs at least two alternatives")
            out = alts[-1]
            for alt in reversed(alts[:-1]):
                out = Or(alt, out)
            return out
        if name == TEMPLATE:
            raise XtlSyntaxError("<xtl:template> is only allowed as the root element")
        raise XtlSyntaxError(f"unknown tag <{name}>")


def parse_xtl(doc: Hedge) -> Tuple[Reg, MacroTable]:
    """Read a single-root XTL document into ``(entry, macros)``."""
    if len(doc) != 1 or not isinstance(doc[0], Element):
        raise XtlSyntaxError("an XTL document has exactly one root element")
    root = doc[0]
    reader = _Reader()
    if root.name == TEMPLATE:
        entry = reader.sequence(root.children)
    elif is_xtl_name(root.name):
        raise XtlSyntaxError(f"<{root.name}> cannot be the root element")
    else:
        entry = reader.node(root)
    return normalize(entry), reader.macros


# -- writing ----------------------------------------------------------------


def _attrs(*pairs):
    return tuple((k, v) for k, v in pairs if v is not None)


def to_surface(r: Reg) -> List[XmlNode]:
    """Surface nodes for a term in sequence position."""
    if isinstance(r, (Then, Epsilon)):
        out: List[XmlNode] = []
        for item in chain_items(r):
            out.extend(to_surface(item))
        return out
    return [surface_node(r)]


def surface_node(r: Reg) -> XmlNode:
    """The single surface node for a non-sequence term."""
    if isinstance(r, TxtR):
        return Text(r.value)
    if isinstance(r, ElR):
        return Element(r.name, r.attributes, to_surface(r.content))
    if isinstance(r, TextR):
        return Element(TEXT, _attrs(("select", r.query)))
    if isinstance(r, AttrR):
        return Element(ATTRIBUTE, _attrs(("name", r.name), ("select", r.query)))
    if isinstance(r, IncludeR):
        return Element(INCLUDE, _attrs(("select", r.query)))
    if isinstance(r, MacroR):
        return Element(CALL_MACRO, _attrs(("name", r.name)))
    if isinstance(r, Star):
        return Element(FOR_EACH, _attrs(("select", r.selector)), to_surface(r.body))
    if isinstance(r, Or):
        children = []
        for alt in alternatives(r):
            nodes = to_surface(alt)
            if len(nodes) != 1:
                raise NotSerializableError(
                    "a choice alternative must be exactly one node, got "
                    f"{len(nodes)}"
                )
            children.extend(nodes)
        return Element(CHOICE, (), children)
    raise NotSerializableError(f"{type(r).__name__} has no single-node form")


def macro_definitions(macros: Mapping[str, Reg], names=None) -> List[Element]:
    names = macros if names is None else [n for n in macros if n in names]
    return [Element(MACRO, (("name", n),), to_surface(macros[n])) for n in names]


def serialize_xtl(entry: Reg, macros: Mapping[str, Reg]) -> Hedge:
    """Write ``(entry, macros)`` as an XTL document.

    Macro definitions lead the root's children in table order.  An ``ElR``
    entry becomes the root itself; a sequence entry is wrapped in
    ``<xtl:template>``.
    """
    definitions = macro_definitions(macros)
    if isinstance(entry, ElR):
        root = surface_node(entry)
        return (Element(root.name, root.attributes, definitions + list(root.children)),)
    if isinstance(entry, (Then, Epsilon)):
        return (Element(TEMPLATE, (), definitions + to_surface(entry)),)
    raise NotSerializableError(
        f"a bare {type(entry).__name__} cannot be the root of an XML document"
    )
