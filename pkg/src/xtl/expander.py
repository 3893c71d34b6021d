"""Template instantiation: fill a template's slots from a repository.

Expansion is deterministic and top-down.  When a query comes back empty the
command tag is *staged*: it is written out unchanged, so the result is again
an XTL document that a later run (with a richer repository) can finish.

Two places stage more than the failing tag, because a partially expanded
body would be re-read at the wrong context on the next run:

* ``Or`` falls back to its right alternative when the left one staged
  anything, and keeps the left's staged form when both do.
* ``Star`` stages the whole ``xtl:for-each`` if any iteration staged.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import List, Mapping, Optional, Tuple

from .errors import RecursionLimitError, UnsatisfiedQueryError
from .hedge import Element, Hedge, Text, XmlNode, is_xtl_name
from .reg import (
    ElR,
    Epsilon,
    IncludeR,
    MacroR,
    Or,
    Reg,
    Star,
    TextR,
    Then,
    TxtR,
    chain_items,
    macro_refs,
    split_content,
)
from .repo import Context, Repository, parse_query
from .surface import FOR_EACH, TEMPLATE, macro_definitions, surface_node


@dataclass(frozen=True)
class ExpansionSettings:
    max_macro_depth: int = 256
    staging_enabled: bool = True

    def __post_init__(self):
        if self.max_macro_depth < 1:
            raise ValueError("max_macro_depth must be at least 1")


@dataclass(frozen=True)
class StageEvent:
    query: Optional[str]
    template_path: str
    term: Reg


class _Run:
    def __init__(self, macros, repo, settings):
        self.macros = macros
        self.repo = repo
        self.settings = settings

    def query(self, q: str, ctx: Context):
        return self.repo.select(ctx.current, parse_query(q))

    def expand(self, r: Reg, ctx: Context, path: str, depth: int):
        """Return ``(nodes, events)`` for ``r`` in sequence position."""
        if isinstance(r, (Then, Epsilon)):
            nodes: List[XmlNode] = []
            events: List[StageEvent] = []
            for item in chain_items(r):
                n, e = self.expand(item, ctx, path, depth)
                nodes.extend(n)
                events.extend(e)
            return nodes, events
        if isinstance(r, TxtR):
            return [Text(r.value)], []
        if isinstance(r, ElR):
            return self.element(r, ctx, path, depth)
        if isinstance(r, TextR):
            found = self.query(r.query, ctx)
            if found:
                return [Text(self.repo.string_of(found[0]))], []
            return self.stage(r, r.query, path + "/xtl:text")
        if isinstance(r, IncludeR):
            for node in self.query(r.query, ctx):
                spliced = self.repo.to_hedge(node)
                if spliced:
                    return list(spliced), []
            return self.stage(r, r.query, path + "/xtl:include")
        if isinstance(r, Star):
            return self.star(r, ctx, path, depth)
        if isinstance(r, Or):
            left = self.expand(r.left, ctx, path, depth)
            if not left[1]:
                return left
            right = self.expand(r.right, ctx, path, depth)
            return left if right[1] else right
        if isinstance(r, MacroR):
            if depth >= self.settings.max_macro_depth:
                raise RecursionLimitError(
                    f"macro {r.name!r} exceeds depth {self.settings.max_macro_depth}"
                )
            return self.expand(self.macros[r.name], ctx, path, depth + 1)
        # AttrR outside an element prefix never survives normalize
        raise TypeError(f"cannot expand {r!r}")

    def stage(self, r, query, path):
        return [surface_node(r)], [StageEvent(query, path, r)]

    def element(self, r: ElR, ctx, path, depth):
        path = f"{path}/{r.name}"
        prefix, rest = split_content(r.content)
        attributes = list(r.attributes)
        children: List[XmlNode] = []
        events: List[StageEvent] = []
        for attr in prefix:
            found = self.query(attr.query, ctx)
            if found:
                attributes.append((attr.name, self.repo.string_of(found[0])))
            else:
                n, e = self.stage(attr, attr.query, f"{path}/@{attr.name}")
                children.extend(n)
                events.extend(e)
        for item in rest:
            n, e = self.expand(item, ctx, path, depth)
            children.extend(n)
            events.extend(e)
        return [Element(r.name, attributes, children)], events

    def star(self, r: Star, ctx, path, depth):
        path = path + "/" + FOR_EACH
        if r.selector is None:
            return self.stage(r, None, path)
        found = self.query(r.selector, ctx)
        if not found:
            return self.stage(r, r.selector, path)
        nodes: List[XmlNode] = []
        for node in found:
            n, e = self.expand(r.body, Context((node,)), path, depth)
            if e:
                return [surface_node(r)], [StageEvent(e[0].query, e[0].template_path, r)]
            nodes.extend(n)
        return nodes, []


@contextmanager
def _stack_room(max_macro_depth):
    # each macro level costs a handful of Python frames
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * max_macro_depth + 2000))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _macros_needed(events, macros) -> set:
    pending = set()
    for event in events:
        if isinstance(event.term, Star):
            pending |= macro_refs(event.term)
    needed = set()
    while pending:
        name = pending.pop()
        if name not in needed:
            needed.add(name)
            pending |= macro_refs(macros[name])
    return needed


def expand_with_events(
    entry: Reg,
    macros: Mapping[str, Reg],
    repo: Repository,
    settings: Optional[ExpansionSettings] = None,
) -> Tuple[Hedge, List[StageEvent]]:
    settings = settings or ExpansionSettings()
    run = _Run(dict(macros), repo, settings)
    with _stack_room(settings.max_macro_depth):
        nodes, events = run.expand(entry, Context(repo.roots()), "", 0)
    if events and not settings.staging_enabled:
        raise UnsatisfiedQueryError(events[0].query, events[0].template_path)
    needed = _macros_needed(events, macros)
    if needed:
        definitions = macro_definitions(macros, needed)
        if isinstance(entry, ElR):
            root = nodes[0]
            nodes = [Element(root.name, root.attributes, definitions + list(root.children))]
        else:
            nodes = [Element(TEMPLATE, (), definitions + nodes)]
    return tuple(nodes), events


def expand(
    entry: Reg,
    macros: Mapping[str, Reg],
    repo: Repository,
    settings: Optional[ExpansionSettings] = None,
) -> Hedge:
    """Instantiate ``entry`` against ``repo``.

    Raises :class:`UnsatisfiedQueryError` when staging is disabled and a
    query is empty, and :class:`RecursionLimitError` when macro calls nest
    deeper than ``settings.max_macro_depth``.
    """
    return expand_with_events(entry, macros, repo, settings)[0]


def is_fully_expanded(h: Hedge) -> bool:
    stack = list(h)
    while stack:
        node = stack.pop()
        if isinstance(node, Element):
            if is_xtl_name(node.name):
                return False
            stack.extend(node.children)
    return True
