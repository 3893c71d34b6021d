"""Repository access through a small path language.

Grammar::

    path := '/'? step ('/' step)*
    step := name ('[' int ']')? | '@' name | 'text()'

Attribute and ``text()`` steps may only come last.  A leading ``/`` starts
at the document, whose only child is the root element.
"""

from __future__ import annotations

import abc
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import QueryError
from .hedge import Hedge, Text, string_value


@dataclass(frozen=True)
class Child:
    name: str
    index: Optional[int] = None


@dataclass(frozen=True)
class Attribute:
    name: str


@dataclass(frozen=True)
class TextStep:
    pass


Step = (Child, Attribute, TextStep)


@dataclass(frozen=True)
class Query:
    absolute: bool
    steps: Tuple[object, ...]

    def __str__(self):
        parts = []
        for step in self.steps:
            if isinstance(step, Attribute):
                parts.append("@" + step.name)
            elif isinstance(step, TextStep):
                parts.append("text()")
            elif step.index is None:
                parts.append(step.name)
            else:
                parts.append(f"{step.name}[{step.index}]")
        return ("/" if self.absolute else "") + "/".join(parts)


_CHILD_RE = re.compile(r"([^\s/\[\]@()]+)(?:\[([^\]]*)\])?\Z")


@lru_cache(maxsize=1024)
def parse_query(src: str) -> Query:
    if not src:
        raise QueryError("empty query")
    absolute = src.startswith("/")
    body = src[1:] if absolute else src
    steps: List[object] = []
    for raw in body.split("/"):
        if steps and not isinstance(steps[-1], Child):
            raise QueryError(f"{src!r}: attribute and text() steps must be last")
        if raw == "text()":
            steps.append(TextStep())
        elif raw.startswith("@") and _CHILD_RE.match(raw[1:]) and "[" not in raw:
            steps.append(Attribute(raw[1:]))
        else:
            m = _CHILD_RE.match(raw)
            if not m:
                raise QueryError(f"{src!r}: malformed step {raw!r}")
            index = None
            if m.group(2) is not None:
                if not m.group(2).isdigit() or int(m.group(2)) < 1:
                    raise QueryError(f"{src!r}: malformed index [{m.group(2)}]")
                index = int(m.group(2))
            steps.append(Child(m.group(1), index))
    return Query(absolute, tuple(steps))


class RepoNode:
    """A node of a repository snapshot; identity is its document position."""

    __slots__ = ("order", "kind", "name", "value", "source", "children", "attributes")

    def __init__(self, order, kind, name=None, value=None, source=None):
        self.order = order
        self.kind = kind  # "element", "attribute" or "text"
        self.name = name
        self.value = value
        self.source = source
        self.children: List["RepoNode"] = []
        self.attributes: List["RepoNode"] = []

    def __repr__(self):
        label = self.name if self.kind != "text" else repr(self.value)
        return f"<{self.kind} {label} #{self.order}>"


@dataclass(frozen=True)
class Context:
    """The node set relative queries start from."""

    current: Tuple[RepoNode, ...]


class Repository(abc.ABC):
    """Read-only data source queried during instantiation.

    ``select`` must be referentially transparent for the duration of a run
    and return duplicate-free node sets in document order.  Absolute
    queries ignore the context.
    """

    @abc.abstractmethod
    def roots(self) -> Tuple[RepoNode, ...]:
        ...

    @abc.abstractmethod
    def select(self, context: Sequence[RepoNode], q: Query) -> Tuple[RepoNode, ...]:
        ...

    @abc.abstractmethod
    def string_of(self, node: RepoNode) -> str:
        ...

    def to_hedge(self, node: RepoNode) -> Hedge:
        """Hedge form of an element node, for splicing."""
        raise NotImplementedError


class XmlRepository(Repository):
    def __init__(self, doc: Hedge):
        self.doc = tuple(doc)
        self._nodes: List[RepoNode] = []
        self._document = RepoNode(-1, "document")
        self._document.children = [self._build(n) for n in self.doc]

    def _build(self, node) -> RepoNode:
        if isinstance(node, Text):
            rn = RepoNode(len(self._nodes), "text", value=node.value, source=node)
            self._nodes.append(rn)
            return rn
        rn = RepoNode(len(self._nodes), "element", name=node.name, source=node)
        self._nodes.append(rn)
        for key, value in node.attributes:
            attr = RepoNode(len(self._nodes), "attribute", name=key, value=value)
            self._nodes.append(attr)
            rn.attributes.append(attr)
        rn.children = [self._build(c) for c in node.children]
        return rn

    def roots(self):
        return tuple(n for n in self._document.children if n.kind == "element")

    def select(self, context, q):
        current: Iterable[RepoNode] = (self._document,) if q.absolute else context
        for step in q.steps:
            found = []
            for node in current:
                if isinstance(step, Child):
                    matches = [c for c in node.children if c.kind == "element" and c.name == step.name]
                    if step.index is not None:
                        matches = matches[step.index - 1 : step.index]
                    found.extend(matches)
                elif isinstance(step, Attribute):
                    found.extend(a for a in node.attributes if a.name == step.name)
                else:
                    found.extend(c for c in node.children if c.kind == "text")
            current = {n.order: n for n in found}.values()
            current = sorted(current, key=lambda n: n.order)
        return tuple(current)

    def string_of(self, node):
        if node.kind == "element":
            return string_value(node.source)
        return node.value

    def to_hedge(self, node):
        if node.kind == "element":
            return (node.source,)
        return ()

    def preorder(self) -> List[RepoNode]:
        return list(self._nodes)


def xml_repository(doc: Hedge) -> XmlRepository:
    return XmlRepository(doc)


def eval_query(repo: Repository, ctx: Context, q: Query) -> Tuple[RepoNode, ...]:
    return repo.select(ctx.current, q)
