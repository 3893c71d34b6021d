"""Validation: decide whether a document belongs to the language of a term.

The matcher walks the schema against the document sequence.  For a term
``r`` and a start position ``i`` in one sibling sequence it computes the set
of positions ``j`` such that ``nodes[i:j]`` matches ``r``; a ``Then`` is a
nondeterministic split over those end positions.  Before any attempt the
next node is checked against ``r``'s first set (one node of lookahead), so
hopeless splits are never tried.  Results are memoized per
:class:`MatchKey`, and keys that recurse into themselves through macros
without consuming input are solved as least fixed points.

Command tags get their schema reading: ``TextR`` matches any text node,
``IncludeR`` any single element, and ``AttrR`` requires its attribute to be
present with any value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Optional, Tuple

from .errors import UnknownMacroError
from .hedge import Element, Hedge, Text, XmlNode
from .reg import (
    AttrR,
    ElR,
    Epsilon,
    Grammar,
    IncludeR,
    MacroR,
    Or,
    Reg,
    Star,
    TextR,
    Then,
    TxtR,
    check_placement,
    macro_refs,
    split_content,
    chain,
)

PathStep = Tuple[int, str]


@dataclass(frozen=True)
class Failure:
    path: Tuple[PathStep, ...]
    expected: str
    found: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failures: Tuple[Failure, ...] = ()

    def __bool__(self):
        return self.valid


class MatchKey(NamedTuple):
    schema: int  # id() of the schema node
    sequence: int  # index of the sibling sequence inside the document
    position: int


_EMPTY: FrozenSet[int] = frozenset()


def _describe(node: Optional[XmlNode]) -> str:
    if node is None:
        return "end of content"
    if isinstance(node, Text):
        return f"text {node.value!r}"
    return f"<{node.name}>"


def _step_name(node: Optional[XmlNode]) -> str:
    if node is None:
        return "#end"
    return "#text" if isinstance(node, Text) else node.name


class _Sequence(NamedTuple):
    nodes: Tuple[XmlNode, ...]
    path: Tuple[PathStep, ...]
    preorder: Tuple[int, ...]  # one entry per position, including the end
    children: Tuple[Optional[int], ...]


class _Frame:
    __slots__ = ("depth", "low")

    def __init__(self, depth):
        self.depth = depth
        self.low = depth + 1


class _Matcher:
    def __init__(self, grammar: Grammar, doc: Hedge):
        self.grammar = grammar
        self.sequences: List[_Sequence] = []
        self._counter = 0
        self._index(tuple(doc), ())
        self.done: Dict[MatchKey, FrozenSet[int]] = {}
        self.approx: Dict[MatchKey, FrozenSet[int]] = {}
        self.active: Dict[MatchKey, int] = {}
        self.frames: List[_Frame] = []
        self.contents: Dict[int, Tuple[ElR, Tuple[str, ...], Reg]] = {}
        self.best = -1
        self.failures: Dict[Tuple[PathStep, ...], Tuple[set, str]] = {}

    def _index(self, nodes, path) -> int:
        number = len(self.sequences)
        self.sequences.append(None)
        preorder, children = [], []
        for i, node in enumerate(nodes):
            preorder.append(self._counter)
            self._counter += 1
            if isinstance(node, Element):
                children.append(self._index(node.children, path + ((i, node.name),)))
            else:
                children.append(None)
        preorder.append(self._counter)
        self.sequences[number] = _Sequence(nodes, path, tuple(preorder), tuple(children))
        return number

    # -- diagnostics ---------------------------------------------------------

    def fail(self, s: int, i: int, *expected):
        """Record a mismatch; ``expected`` holds strings or terms (their first sets)."""
        seq = self.sequences[s]
        progress = seq.preorder[i]
        if progress < self.best:
            return
        if progress > self.best:
            self.best = progress
            self.failures = {}
        node = seq.nodes[i] if i < len(seq.nodes) else None
        path = seq.path + ((i, _step_name(node)),)
        entry = self.failures.setdefault(path, (set(), _describe(node)))
        for item in expected:
            if isinstance(item, str):
                entry[0].add(item)
            else:
                entry[0].update(str(d) for d in self.grammar.first(item))

    def report(self) -> Tuple[Failure, ...]:
        return tuple(
            Failure(path, " or ".join(sorted(expected)), found)
            for path, (expected, found) in sorted(self.failures.items())
        )

    # -- matching ------------------------------------------------------------

    def ends(self, r: Reg, s: int, i: int) -> FrozenSet[int]:
        nodes = self.sequences[s].nodes
        if i == len(nodes) or not self.grammar.may_start(r, nodes[i]):
            if self.grammar.nullable(r):
                if i < len(nodes):
                    self.fail(s, i, r)
                return frozenset((i,))
            self.fail(s, i, r if self.grammar.first(r) else "nothing")
            return _EMPTY

        key = MatchKey(id(r), s, i)
        hit = self.done.get(key)
        if hit is not None:
            return hit
        if key in self.active:
            frame = self.frames[-1]
            frame.low = min(frame.low, self.active[key])
            return self.approx.get(key, _EMPTY)

        depth = len(self.frames)
        self.active[key] = depth
        result = self.approx.get(key, _EMPTY)
        while True:
            frame = _Frame(depth)
            self.frames.append(frame)
            new = self._compute(r, s, i)
            self.frames.pop()
            if frame.low > depth or new == result:
                result = new
                break
            result = self.approx[key] = new
        del self.active[key]
        if frame.low >= depth:
            self.done[key] = result
            self.approx.pop(key, None)
        else:
            self.approx[key] = result
            parent = self.frames[-1]
            parent.low = min(parent.low, frame.low)
        return result

    def _compute(self, r: Reg, s: int, i: int) -> FrozenSet[int]:
        node = self.sequences[s].nodes[i]
        if isinstance(r, (TxtR, TextR, IncludeR)):
            # the lookahead already checked the node's kind and value
            return frozenset((i + 1,))
        if isinstance(r, ElR):
            return self._element(r, s, i, node)
        if isinstance(r, MacroR):
            return self.ends(self.grammar.macros[r.name], s, i)
        if isinstance(r, Or):
            return self.ends(r.left, s, i) | self.ends(r.right, s, i)
        if isinstance(r, Then):
            out = set()
            for j in self.ends(r.head, s, i):
                out |= self.ends(r.tail, s, j)
            return frozenset(out)
        if isinstance(r, Star):
            reached = {i}
            frontier = [i]
            while frontier:
                j = frontier.pop()
                for k in self.ends(r.body, s, j):
                    if k > j and k not in reached:
                        reached.add(k)
                        frontier.append(k)
            return frozenset(reached)
        if isinstance(r, Epsilon):
            return frozenset((i,))
        raise TypeError(f"cannot match {r!r}")

    def _content(self, r: ElR):
        hit = self.contents.get(id(r))
        if hit is None:
            prefix, rest = split_content(r.content)
            hit = self.contents[id(r)] = (r, tuple(a.name for a in prefix), chain(rest))
        return hit

    def _element(self, r: ElR, s: int, i: int, node: Element) -> FrozenSet[int]:
        _, required, rest = self._content(r)
        present = dict(node.attributes)
        for key, value in r.attributes:
            if present.get(key) != value:
                self.fail(s, i, f"<{r.name}> with {key}={value!r}")
                return _EMPTY
        for key in required:
            if key not in present:
                self.fail(s, i, f"<{r.name}> with attribute {key!r}")
                return _EMPTY
        c = self.sequences[s].children[i]
        size = len(node.children)
        inner = self.ends(rest, c, 0)
        if size in inner:
            return frozenset((i + 1,))
        short = [j for j in inner if j < size]
        if short:
            self.fail(c, max(short), "end of content")
        return _EMPTY


class CompiledSchema:
    """A schema checked once and ready to validate many documents."""

    def __init__(self, schema: Reg, macros: Optional[Mapping[str, Reg]] = None):
        self.schema = schema
        self.grammar = Grammar(macros)
        for name in macro_refs(schema):
            if name not in self.grammar.macros:
                raise UnknownMacroError(name)
        check_placement(schema)
        for body in self.grammar.macros.values():
            check_placement(body)

    def validate(self, doc: Hedge) -> ValidationReport:
        matcher = _Matcher(self.grammar, doc)
        reached = matcher.ends(self.schema, 0, 0)
        if len(doc) in reached:
            return ValidationReport(True)
        short = [j for j in reached if j < len(doc)]
        if short:
            matcher.fail(0, max(short), "end of content")
        if not matcher.failures:
            matcher.fail(0, 0, "a different document")
        return ValidationReport(False, matcher.report())


def compile_schema(schema: Reg, macros: Optional[Mapping[str, Reg]] = None) -> CompiledSchema:
    return CompiledSchema(schema, macros)


def validate(schema: Reg, macros: Optional[Mapping[str, Reg]], doc: Hedge) -> ValidationReport:
    """Match ``doc`` against ``schema`` and report the furthest failure."""
    return CompiledSchema(schema, macros).validate(doc)


# -- brute-force oracle ---------------------------------------------------------


def oracle_validate(
    schema: Reg, macros: Optional[Mapping[str, Reg]], doc: Hedge, depth_bound: int
) -> bool:
    """Decide membership by plain backtracking over every split point.

    No lookahead and no memoization.  A branch fails when it would nest more
    than ``depth_bound`` macro unfoldings, or when one macro would be
    unfolded more than ``len(level) + 1`` times inside a single sibling
    level.  The second cap never loses a match: in a shortest derivation two
    nested unfoldings of one macro in one level cover strictly nested spans.
    A ``depth_bound`` of ``len(macros) * (nodes + depth + 1) + 1`` is always
    enough for the oracle to be exact.
    """
    macros = dict(macros or {})

    def ends(r, nodes, i, level, unfold):
        if isinstance(r, Epsilon):
            yield i
        elif isinstance(r, AttrR):
            yield i
        elif isinstance(r, (TxtR, TextR, IncludeR, ElR)):
            if i < len(nodes) and single(r, nodes[i], level, unfold):
                yield i + 1
        elif isinstance(r, Or):
            yield from ends(r.left, nodes, i, level, unfold)
            yield from ends(r.right, nodes, i, level, unfold)
        elif isinstance(r, Then):
            for j in ends(r.head, nodes, i, level, unfold):
                yield from ends(r.tail, nodes, j, level, unfold)
        elif isinstance(r, Star):
            yield i
            for j in ends(r.body, nodes, i, level, unfold):
                if j > i:
                    yield from ends(r, nodes, j, level, unfold)
        elif isinstance(r, MacroR):
            total, counts = unfold
            here = counts.get((r.name, level), 0)
            if total < depth_bound and here <= len(nodes):
                counts = dict(counts)
                counts[(r.name, level)] = here + 1
                yield from ends(macros[r.name], nodes, i, level, (total + 1, counts))

    def single(r, node, level, unfold):
        if isinstance(r, TxtR):
            return isinstance(node, Text) and node.value == r.value
        if isinstance(r, TextR):
            return isinstance(node, Text)
        if isinstance(r, IncludeR):
            return isinstance(node, Element)
        if not isinstance(node, Element) or node.name != r.name:
            return False
        present = dict(node.attributes)
        if any(present.get(k) != v for k, v in r.attributes):
            return False
        prefix, rest = split_content(r.content)
        if any(a.name not in present for a in prefix):
            return False
        children = node.children
        return any(
            j == len(children) for j in ends(chain(rest), children, 0, level + 1, unfold)
        )

    return any(j == len(doc) for j in ends(schema, tuple(doc), 0, 0, (0, {})))


# -- rendering -------------------------------------------------------------------


def render_path(path) -> str:
    return "/" + "/".join(f"{name}[{index}]" for index, name in path)


def explain(report: ValidationReport) -> str:
    if report.valid:
        return "valid"
    return "\n".join(
        f"{render_path(f.path)}: expected {f.expected}, found {f.found}"
        for f in report.failures
    )
