"""Populations for exhaustive and randomized tests.

Exhaustive populations are enumerated in increasing size so a time budget
always covers a prefix that is complete for every size it reaches.
Random generators take an explicit ``random.Random`` so runs are repeatable.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator, Tuple

from xtl.errors import IllegalCombinationError
from xtl.hedge import Element, Text
from xtl.reg import (
    EPSILON,
    AttrR,
    ElR,
    IncludeR,
    MacroR,
    Or,
    Star,
    TextR,
    Then,
    TxtR,
    _normalize,
    chain,
    check_placement,
    either,
    macro_refs,
    normalize,
)

NAMES = ("a", "b")
PROBE_TEXTS = ("", "t")
MACRO = "m"


# -- exhaustive schema population ---------------------------------------------


def _leaves(with_macro: bool):
    out = [EPSILON, TxtR(""), TxtR("t"), TextR("q"), IncludeR("q"), AttrR("a", "q")]
    if with_macro:
        out.append(MacroR(MACRO))
    return out


@lru_cache(maxsize=None)
def _terms(n: int, with_macro: bool):
    """Terms of exactly ``n`` constructors in normal form (placement unchecked)."""
    if n == 1:
        return tuple(_leaves(with_macro))
    out = []
    for c in _terms(n - 1, with_macro):
        out.extend((ElR("a", (), c), ElR("b", (), c), Star(c)))
    for k in range(1, n - 1):
        for left in _terms(k, with_macro):
            for right in _terms(n - 1 - k, with_macro):
                out.extend((Or(left, right), Then(left, right)))
    return tuple(t for t in out if _normalize(t) == t)


def _placed(t) -> bool:
    try:
        check_placement(t)
    except IllegalCombinationError:
        return False
    return True


@lru_cache(maxsize=None)
def canonical_terms(n: int, with_macro: bool = True):
    return tuple(t for t in _terms(n, with_macro) if _placed(t))


def schema_population(max_size: int = 8) -> Iterator[Tuple[object, dict]]:
    """Every canonical ``(entry, macros)`` with at most ``max_size`` constructors.

    The single macro slot ``m`` is filled only when the entry calls it; its
    body counts towards the size and may call ``m`` itself.
    """
    for total in range(1, max_size + 1):
        for entry_size in range(1, total + 1):
            body_size = total - entry_size
            for entry in canonical_terms(entry_size):
                uses_macro = MACRO in macro_refs(entry)
                if not uses_macro:
                    if body_size == 0:
                        yield entry, {}
                    continue
                if body_size == 0:
                    continue
                for body in canonical_terms(body_size):
                    yield entry, {MACRO: body}


def schema_population_size(max_size: int = 8) -> int:
    count = 0
    for total in range(1, max_size + 1):
        for entry_size in range(1, total + 1):
            body_size = total - entry_size
            for entry in canonical_terms(entry_size):
                if MACRO in macro_refs(entry):
                    count += len(canonical_terms(body_size)) if body_size else 0
                elif body_size == 0:
                    count += 1
    return count


# -- random hedges -------------------------------------------------------------


def random_hedge(rng: random.Random, max_nodes: int, names=NAMES, texts=PROBE_TEXTS,
                 attributes=()) -> tuple:
    """A random hedge with at most ``max_nodes`` nodes.

    ``attributes`` lists ``(name, values)`` pairs each element may carry.
    """
    budget = [rng.randint(0, max_nodes)]

    def forest():
        out = []
        while budget[0] > 0 and rng.random() < 0.75:
            budget[0] -= 1
            if rng.random() < 0.3:
                out.append(Text(rng.choice(texts)))
            else:
                attrs = [(k, rng.choice(v)) for k, v in attributes if rng.random() < 0.5]
                out.append(Element(rng.choice(names), attrs, forest()))
        return tuple(out)

    return forest()


def random_document(rng, max_nodes, **kw) -> tuple:
    """A hedge that has no whitespace-only text next to elements, no empty and
    no adjacent text nodes, so it survives an XML round trip."""
    h = random_hedge(rng, max_nodes, **kw)
    return _clean(h)


def _clean(h):
    out = []
    for node in h:
        if isinstance(node, Text):
            if not node.value or (out and isinstance(out[-1], Text)):
                continue
            out.append(node)
        else:
            out.append(Element(node.name, node.attributes, _clean(node.children)))
    if any(isinstance(n, Element) for n in out):
        out = [n for n in out if not (isinstance(n, Text) and not n.value.strip())]
    return tuple(out)


# -- random (not necessarily canonical) terms ----------------------------------


def random_reg(rng: random.Random, budget: int, with_macro=True):
    """A random term of roughly ``budget`` constructors.

    ``AttrR`` only ever opens an element's content, so the result always
    normalizes.
    """
    if budget <= 1:
        choices = [EPSILON, TxtR(rng.choice(PROBE_TEXTS)), TextR("q"), IncludeR("q")]
        if with_macro:
            choices.append(MacroR(MACRO))
        return rng.choice(choices)
    kind = rng.choice(["el", "star", "or", "then", "then", "leaf"])
    if kind == "leaf":
        return random_reg(rng, 1, with_macro)
    if kind == "el":
        content = random_reg(rng, budget - 1, with_macro)
        if rng.random() < 0.3:
            content = Then(AttrR(rng.choice(NAMES), "q"), content)
        attrs = (("k", "v"),) if rng.random() < 0.2 else ()
        return ElR(rng.choice(NAMES), attrs, content)
    if kind == "star":
        return Star(random_reg(rng, budget - 1, with_macro), rng.choice([None, "q"]))
    split = rng.randint(1, budget - 2) if budget > 2 else 1
    left = random_reg(rng, split, with_macro)
    right = random_reg(rng, max(1, budget - 1 - split), with_macro)
    return Or(left, right) if kind == "or" else Then(left, right)


def random_macro_table(rng, budget=4):
    return {MACRO: normalize(random_reg(rng, budget))}


# -- templates and repositories ------------------------------------------------

ABSOLUTE_ELEMENT_QUERIES = ["/r/name", "/r/i", "/r/i[2]", "/r/j", "/r/missing", "/r", "/r/i/k"]
ABSOLUTE_VALUE_QUERIES = ["/r/name", "/r/i/@id", "/r/name/text()", "/r/j/@id", "/r/missing",
                          "/r/i[2]/@id"]
RELATIVE_ELEMENT_QUERIES = ["k", "i", "missing", "k[2]"]
RELATIVE_VALUE_QUERIES = ["@id", "text()", "k/@id", "k", "missing"]
LITERAL_NAMES = ("p", "q", "x")
LITERAL_TEXTS = ("hello", "", " ", "a&b", "t")
ATTRIBUTE_NAMES = ("id", "n")


def random_repository(rng: random.Random) -> tuple:
    def text():
        return rng.choice(["Ann", "", "7", "x y", "<&>"])

    def item(name, depth):
        attrs = [("id", str(rng.randint(1, 9)))] if rng.random() < 0.7 else []
        children = []
        if rng.random() < 0.6:
            children.append(Text(text() or "v"))
        if depth < 3:
            for _ in range(rng.choice([0, 0, 1, 2])):
                children.append(item("k", depth + 1))
            for _ in range(rng.choice([0, 0, 0, 1])):
                children.append(item("i", depth + 1))
        return Element(name, attrs, children)

    children = []
    if rng.random() < 0.8:
        children.append(Element("name", (), (Text(text() or "Ann"),)))
    for _ in range(rng.choice([0, 1, 2, 3])):
        children.append(item("i", 1))
    for _ in range(rng.choice([0, 1])):
        children.append(item("j", 1))
    return (Element("r", (), children),)


class _TemplateGen:
    def __init__(self, rng, macros, in_macro=False):
        self.rng = rng
        self.in_macro = in_macro  # absolute for-each would reset the recursion
        self.macros = macros  # names callable from here, excluding self
        self.current = None  # macro being defined, callable when self_ok

    def items(self, depth, relative, self_ok, n=None):
        rng = self.rng
        n = rng.randint(0, 3) if n is None else n
        return [self.item(depth, relative, self_ok) for _ in range(n)]

    def value_query(self, relative):
        pool = ABSOLUTE_VALUE_QUERIES + (RELATIVE_VALUE_QUERIES if relative else [])
        return self.rng.choice(pool)

    def element_query(self, relative):
        pool = ABSOLUTE_ELEMENT_QUERIES + (RELATIVE_ELEMENT_QUERIES if relative else [])
        return self.rng.choice(pool)

    def item(self, depth, relative, self_ok, allow_star=True):
        rng = self.rng
        kinds = ["el", "txt", "text", "text", "include"]
        if depth < 3:
            kinds += ["el", "star", "star", "or"] if allow_star else ["el", "or"]
        if self.macros:
            kinds.append("call")
        if self_ok and self.current:
            kinds.append("self")
        kind = rng.choice(kinds)
        if kind == "el" and depth < 4:
            return self.element(depth, relative, self_ok)
        if kind == "text":
            return TextR(self.value_query(relative))
        if kind == "include":
            return IncludeR(self.element_query(relative))
        if kind == "star":
            if rng.random() < 0.1:
                return Star(chain(self.items(depth + 1, relative, False, 1)), None)
            if self.in_macro or rng.random() < 0.5:
                sel = rng.choice(["i", "k"])
                body = self.items(depth + 1, True, True, rng.randint(1, 3))
            else:
                sel = rng.choice(ABSOLUTE_ELEMENT_QUERIES + ["@id"])
                body = self.items(depth + 1, True, False, rng.randint(1, 3))
            return Star(chain(body), sel)
        if kind == "or":
            alts = [self.item(depth + 1, relative, self_ok) for _ in range(rng.randint(2, 3))]
            return either(alts)
        if kind == "call":
            return MacroR(rng.choice(self.macros))
        if kind == "self":
            return MacroR(self.current)
        return TxtR(rng.choice(LITERAL_TEXTS))

    def element(self, depth, relative, self_ok):
        rng = self.rng
        attrs = [("lang", "en")] if rng.random() < 0.2 else []
        prefix = [AttrR(name, self.value_query(relative))
                  for name in ATTRIBUTE_NAMES if rng.random() < 0.25]
        content = prefix + self.items(depth + 1, relative, self_ok)
        return ElR(rng.choice(LITERAL_NAMES), attrs, chain(content))


def random_template(rng: random.Random):
    """A canonical ``(entry, macros)`` shaped like ``parse_xtl`` output.

    Recursive macro calls only occur inside an ``xtl:for-each`` over a
    relative child step, so every expansion terminates on a finite repository.
    """
    macros = {}
    for k in range(rng.choice([0, 0, 1, 2])):
        gen = _TemplateGen(rng, list(macros), in_macro=True)
        gen.current = f"m{k}"
        body = gen.items(0, True, False, rng.randint(1, 3))
        if rng.random() < 0.5:
            recurse = Star(chain([ElR("node", (), chain([TextR("@id"), MacroR(gen.current)]))]), "k")
            # an empty for-each stages; a literal fallback lets recursion finish
            body.append(either([recurse, ElR("leaf")]) if rng.random() < 0.7 else recurse)
        macros[gen.current] = normalize(chain(body))
    gen = _TemplateGen(rng, list(macros))
    entry = ElR("doc", (), chain(gen.items(0, False, False, rng.randint(1, 4))))
    return normalize(entry), macros


def parse_shaped_reg(rng: random.Random):
    """A random ``(entry, macros)`` in the image of ``parse_xtl``."""
    return random_template(rng)


def oracle(schema, macros, doc) -> bool:
    """The brute-force oracle with a depth bound that makes it exact."""
    from xtl.hedge import depth, node_count
    from xtl.validator import oracle_validate

    bound = len(macros) * (node_count(doc) + depth(doc) + 1) + 1
    return oracle_validate(schema, macros, doc, bound)
