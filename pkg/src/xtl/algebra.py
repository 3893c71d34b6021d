"""Union, intersection and difference of schema languages.

Closure is semantic: a composed expression is decided by combining the
membership verdicts of its atoms.  No product term is ever built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Mapping, Optional, Sequence, Tuple
from typing import Union as AnyOf

from .errors import BoundError
from .hedge import Element, Hedge, Text, XmlNode
from .reg import Reg
from .validator import validate

PROBE_TEXTS = ("", "t")
MAX_ENUMERATION_NODES = 12


@dataclass(frozen=True)
class Atom:
    schema: Reg
    macros: Mapping[str, Reg] = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class Union:
    left: "SchemaExpr"
    right: "SchemaExpr"


@dataclass(frozen=True)
class Intersect:
    left: "SchemaExpr"
    right: "SchemaExpr"


@dataclass(frozen=True)
class Minus:
    left: "SchemaExpr"
    right: "SchemaExpr"


SchemaExpr = AnyOf[Atom, Union, Intersect, Minus]


def member(e: SchemaExpr, doc: Hedge) -> bool:
    if isinstance(e, Atom):
        return validate(e.schema, e.macros, doc).valid
    if isinstance(e, Union):
        return member(e.left, doc) or member(e.right, doc)
    if isinstance(e, Intersect):
        return member(e.left, doc) and member(e.right, doc)
    if isinstance(e, Minus):
        return member(e.left, doc) and not member(e.right, doc)
    raise TypeError(f"not a schema expression: {e!r}")


def hedge_key(h: Hedge):
    """Total order on hedges: text before element, then by value or name."""
    return tuple(
        (0, n.value) if isinstance(n, Text) else (1, n.name, hedge_key(n.children))
        for n in h
    )


@lru_cache(maxsize=None)
def _forests(n: int, names: Tuple[str, ...], texts: Tuple[str, ...], depth: int):
    if n == 0:
        return ((),)
    if depth == 0:
        return ()
    out = []
    for k in range(1, n + 1):
        for tree in _trees(k, names, texts, depth):
            for rest in _forests(n - k, names, texts, depth):
                out.append((tree,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _trees(k: int, names, texts, depth) -> Tuple[XmlNode, ...]:
    out: List[XmlNode] = []
    if k == 1:
        out.extend(Text(t) for t in texts)
    for children in _forests(k - 1, names, texts, depth - 1):
        out.extend(Element(name, (), children) for name in names)
    return tuple(out)


def all_hedges(
    max_nodes: int,
    names: Sequence[str],
    texts: Sequence[str] = PROBE_TEXTS,
    max_depth: Optional[int] = None,
) -> Iterator[Hedge]:
    """Every hedge with at most ``max_nodes`` nodes, smallest first."""
    depth = max_nodes if max_depth is None else max_depth
    for n in range(max_nodes + 1):
        yield from sorted(_forests(n, tuple(names), tuple(texts), depth), key=hedge_key)


def enumerate_members(e: SchemaExpr, max_nodes: int, alphabet: Sequence[str]) -> List[Hedge]:
    """All members of ``e`` up to ``max_nodes`` nodes, ordered by size then key."""
    if not alphabet:
        raise BoundError("alphabet must not be empty")
    if not 0 <= max_nodes <= MAX_ENUMERATION_NODES:
        raise BoundError(f"max_nodes must lie in 0..{MAX_ENUMERATION_NODES}")
    return [h for h in all_hedges(max_nodes, alphabet) if member(e, h)]

