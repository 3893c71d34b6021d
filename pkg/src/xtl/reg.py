"""The regular model shared by instantiation and validation.

Ten constructors describe both a template and a schema.  A sequence is a
right-nested ``Then`` chain that ends in ``Epsilon``; ``encode_document``
turns a plain hedge into exactly that shape.

``normalize`` rewrites a term into its canonical form:

* ``Then`` is right-associated and every chain ends in ``Epsilon``;
  ``Epsilon`` heads are dropped.
* ``Star`` never wraps ``Epsilon`` or another ``Star``.
* ``Or`` is right-associated, duplicates are dropped, the order of the
  remaining alternatives is kept (instantiation picks the first success).
* ``AttrR`` may only open the content chain of an ``ElR``.

Macro references are never inlined, so recursive macros are fine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import IllegalCombinationError, UnknownMacroError
from .hedge import Element, Hedge, Text, XmlNode


@dataclass(frozen=True)
class MacroR:
    name: str


@dataclass(frozen=True)
class AttrR:
    name: str
    query: str


@dataclass(frozen=True)
class TextR:
    query: str


@dataclass(frozen=True)
class IncludeR:
    query: str


@dataclass(frozen=True, eq=False)
class ElR:
    name: str
    attributes: Tuple[Tuple[str, str], ...] = ()
    content: "Reg" = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(tuple(a) for a in self.attributes))
        if self.content is None:
            object.__setattr__(self, "content", EPSILON)

    def __eq__(self, other):
        if not isinstance(other, ElR):
            return NotImplemented
        return (
            self.name == other.name
            and frozenset(self.attributes) == frozenset(other.attributes)
            and self.content == other.content
        )

    def __hash__(self):
        return hash((self.name, frozenset(self.attributes), self.content))


@dataclass(frozen=True)
class TxtR:
    value: str


@dataclass(frozen=True)
class Epsilon:
    def __repr__(self):
        return "Epsilon"


@dataclass(frozen=True)
class Or:
    left: "Reg"
    right: "Reg"


@dataclass(frozen=True)
class Then:
    head: "Reg"
    tail: "Reg"


@dataclass(frozen=True)
class Star:
    body: "Reg"
    # iteration source for instantiation; validation ignores it
    selector: Optional[str] = None


EPSILON = Epsilon()

Reg = Union[MacroR, AttrR, TextR, IncludeR, ElR, TxtR, Epsilon, Or, Then, Star]
MacroTable = Dict[str, Reg]

ATOMS = (MacroR, AttrR, TextR, IncludeR, ElR, TxtR)


# -- building blocks ----------------------------------------------------------


def chain(items: Iterable[Reg]) -> Reg:
    """Right-nested ``Then`` chain over ``items`` terminated by ``Epsilon``."""
    out: Reg = EPSILON
    for item in reversed(list(items)):
        out = Then(item, out)
    return out


def chain_items(r: Reg) -> List[Reg]:
    """Items of a canonical chain; a non-chain term is a chain of one."""
    items = []
    while isinstance(r, Then):
        items.append(r.head)
        r = r.tail
    if not isinstance(r, Epsilon):
        items.append(r)
    return items


def alternatives(r: Reg) -> List[Reg]:
    alts = []
    while isinstance(r, Or):
        alts.extend(alternatives(r.left))
        r = r.right
    alts.append(r)
    return alts


def either(alts: Iterable[Reg]) -> Reg:
    alts = list(alts)
    out = alts[-1]
    for alt in reversed(alts[:-1]):
        out = Or(alt, out)
    return out


def seq(*parts: Reg) -> Reg:
    """Sequential composition, normalized."""
    return normalize(chain(parts))


def split_content(content: Reg) -> Tuple[List[AttrR], List[Reg]]:
    """Split an element content chain into its AttrR prefix and the rest."""
    items = chain_items(content)
    i = 0
    while i < len(items) and isinstance(items[i], AttrR):
        i += 1
    return items[:i], items[i:]


def size(r: Reg) -> int:
    """Number of constructors in ``r``."""
    if isinstance(r, ElR):
        return 1 + size(r.content)
    if isinstance(r, (Or, Then)):
        a, b = (r.left, r.right) if isinstance(r, Or) else (r.head, r.tail)
        return 1 + size(a) + size(b)
    if isinstance(r, Star):
        return 1 + size(r.body)
    return 1


def macro_refs(r: Reg) -> set:
    found = set()
    stack = [r]
    while stack:
        r = stack.pop()
        if isinstance(r, MacroR):
            found.add(r.name)
        elif isinstance(r, ElR):
            stack.append(r.content)
        elif isinstance(r, Or):
            stack.extend((r.left, r.right))
        elif isinstance(r, Then):
            stack.extend((r.head, r.tail))
        elif isinstance(r, Star):
            stack.append(r.body)
    return found


def strip_selectors(r: Reg) -> Reg:
    if isinstance(r, Star):
        return Star(strip_selectors(r.body))
    if isinstance(r, ElR):
        return ElR(r.name, r.attributes, strip_selectors(r.content))
    if isinstance(r, Or):
        return Or(strip_selectors(r.left), strip_selectors(r.right))
    if isinstance(r, Then):
        return Then(strip_selectors(r.head), strip_selectors(r.tail))
    return r


# -- document encoding --------------------------------------------------------


def encode_node(node: XmlNode) -> Reg:
    if isinstance(node, Text):
        return TxtR(node.value)
    return ElR(node.name, node.attributes, encode_document(node.children))


def encode_document(h: Hedge) -> Reg:
    """Encode a hedge as ``Then n0 (Then n1 (... Epsilon))``."""
    return chain(encode_node(n) for n in h)


def decode_document(r: Reg) -> Hedge:
    """Inverse of :func:`encode_document` on its image."""
    out = []
    for item in chain_items(r):
        if isinstance(item, TxtR):
            out.append(Text(item.value))
        elif isinstance(item, ElR):
            out.append(Element(item.name, item.attributes, decode_document(item.content)))
        else:
            raise ValueError(f"not a document term: {item!r}")
    return tuple(out)


# -- normalization ------------------------------------------------------------


def _sequence(head: Reg, tail: Reg) -> Reg:
    if isinstance(head, Epsilon):
        return tail
    return chain(chain_items(head) + chain_items(tail))


def _normalize(r: Reg) -> Reg:
    if isinstance(r, Then):
        return _sequence(_normalize(r.head), _normalize(r.tail))
    if isinstance(r, Or):
        alts = []
        for alt in alternatives(Or(_normalize(r.left), _normalize(r.right))):
            if alt not in alts:
                alts.append(alt)
        return either(alts)
    if isinstance(r, Star):
        body = _normalize(r.body)
        if isinstance(body, Epsilon):
            return EPSILON
        if isinstance(body, Star):
            return Star(body.body, r.selector if r.selector is not None else body.selector)
        return Star(body, r.selector)
    if isinstance(r, ElR):
        content = _normalize(r.content)
        if not isinstance(content, (Then, Epsilon)):
            content = Then(content, EPSILON)
        return ElR(r.name, r.attributes, content)
    return r


def check_placement(r: Reg) -> None:
    stack = [r]
    while stack:
        r = stack.pop()
        if isinstance(r, AttrR):
            raise IllegalCombinationError(
                f"xtl attribute {r.name!r} outside the start of an element's content"
            )
        if isinstance(r, ElR):
            prefix, rest = split_content(r.content)
            names = [k for k, _ in r.attributes] + [a.name for a in prefix]
            if len(set(names)) != len(names):
                raise IllegalCombinationError(f"duplicate attribute names on <{r.name}>")
            stack.extend(rest)
        elif isinstance(r, Or):
            stack.extend((r.left, r.right))
        elif isinstance(r, Then):
            stack.extend((r.head, r.tail))
        elif isinstance(r, Star):
            stack.append(r.body)


def normalize(r: Reg) -> Reg:
    out = _normalize(r)
    check_placement(out)
    return out


def is_canonical(r: Reg) -> bool:
    try:
        return normalize(r) == r
    except IllegalCombinationError:
        return False


def canonical_eq(a: Reg, b: Reg) -> bool:
    """Structural equality of canonical forms, ignoring iteration selectors."""
    return strip_selectors(normalize(a)) == strip_selectors(normalize(b))


def normalize_macros(macros: Mapping[str, Reg]) -> MacroTable:
    return {name: normalize(body) for name, body in macros.items()}


# -- lookahead analysis -------------------------------------------------------


@dataclass(frozen=True)
class NodeDescriptor:
    """One symbol of the lookahead alphabet.

    ``kind`` is ``element``, ``any-element``, ``any-text`` or ``literal-text``.
    """

    kind: str
    value: Optional[str] = None

    def matches(self, node: XmlNode) -> bool:
        if self.kind == "element":
            return isinstance(node, Element) and node.name == self.value
        if self.kind == "any-element":
            return isinstance(node, Element)
        if self.kind == "any-text":
            return isinstance(node, Text)
        return isinstance(node, Text) and node.value == self.value

    def __str__(self):
        if self.kind == "element":
            return f"<{self.value}>"
        if self.kind == "literal-text":
            return f"text {self.value!r}"
        return self.kind


ANY_ELEMENT = NodeDescriptor("any-element")
ANY_TEXT = NodeDescriptor("any-text")


def element(name: str) -> NodeDescriptor:
    return NodeDescriptor("element", name)


def literal_text(value: str) -> NodeDescriptor:
    return NodeDescriptor("literal-text", value)


class Grammar:
    """Nullability and first sets for terms over one macro table.

    Macro tables are solved once as least fixed points; per-term answers are
    cached by identity for the lifetime of the object.
    """

    def __init__(self, macros: Optional[Mapping[str, Reg]] = None):
        self.macros = dict(macros or {})
        for body in self.macros.values():
            for name in macro_refs(body):
                if name not in self.macros:
                    raise UnknownMacroError(name)
        self._macro_nullable = {name: False for name in self.macros}
        self._macro_first: Dict[str, FrozenSet[NodeDescriptor]] = {
            name: frozenset() for name in self.macros
        }
        self._solve()
        self._nullable_cache: Dict[int, Tuple[Reg, bool]] = {}
        self._first_cache: Dict[int, Tuple[Reg, FrozenSet[NodeDescriptor]]] = {}

    def _solve(self):
        changed = True
        while changed:
            changed = False
            for name, body in self.macros.items():
                if not self._macro_nullable[name] and self._nullable(body):
                    self._macro_nullable[name] = changed = True
        changed = True
        while changed:
            changed = False
            for name, body in self.macros.items():
                first = self._first(body)
                if first != self._macro_first[name]:
                    self._macro_first[name] = first
                    changed = True

    def _lookup(self, name):
        if name not in self.macros:
            raise UnknownMacroError(name)
        return name

    def _nullable(self, r: Reg) -> bool:
        if isinstance(r, (Epsilon, Star, AttrR)):
            return True
        if isinstance(r, MacroR):
            return self._macro_nullable[self._lookup(r.name)]
        if isinstance(r, Or):
            return self._nullable(r.left) or self._nullable(r.right)
        if isinstance(r, Then):
            return self._nullable(r.head) and self._nullable(r.tail)
        return False

    def _first(self, r: Reg) -> FrozenSet[NodeDescriptor]:
        if isinstance(r, TextR):
            return frozenset([ANY_TEXT])
        if isinstance(r, IncludeR):
            return frozenset([ANY_ELEMENT])
        if isinstance(r, TxtR):
            return frozenset([literal_text(r.value)])
        if isinstance(r, ElR):
            return frozenset([element(r.name)])
        if isinstance(r, MacroR):
            return self._macro_first[self._lookup(r.name)]
        if isinstance(r, Or):
            return self._first(r.left) | self._first(r.right)
        if isinstance(r, Then):
            first = self._first(r.head)
            if self._nullable(r.head):
                first = first | self._first(r.tail)
            return first
        if isinstance(r, Star):
            return self._first(r.body)
        return frozenset()

    def nullable(self, r: Reg) -> bool:
        hit = self._nullable_cache.get(id(r))
        if hit is None:
            hit = self._nullable_cache[id(r)] = (r, self._nullable(r))
        return hit[1]

    def first(self, r: Reg) -> FrozenSet[NodeDescriptor]:
        hit = self._first_cache.get(id(r))
        if hit is None:
            hit = self._first_cache[id(r)] = (r, self._first(r))
        return hit[1]

    def may_start(self, r: Reg, node: XmlNode) -> bool:
        return any(d.matches(node) for d in self.first(r))


def nullable(r: Reg, macros: Optional[Mapping[str, Reg]] = None) -> bool:
    return Grammar(macros).nullable(r)


def first_set(r: Reg, macros: Optional[Mapping[str, Reg]] = None) -> FrozenSet[NodeDescriptor]:
    return Grammar(macros).first(r)
