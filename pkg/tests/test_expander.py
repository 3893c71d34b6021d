import random

import pytest

from xtl.errors import RecursionLimitError, UnsatisfiedQueryError
from xtl.expander import ExpansionSettings, expand, expand_with_events, is_fully_expanded
from xtl.hedge import Element, Text, parse_xml, serialize_xml
from xtl.reg import EPSILON, ElR, IncludeR, MacroR, Star, TextR, Then
from xtl.repo import xml_repository
from xtl.surface import parse_xtl
from xtl.validator import validate

from generators import random_repository, random_template


def run(template, repo, **settings):
    entry, macros = parse_xtl(parse_xml(template))
    out = expand(entry, macros, xml_repository(parse_xml(repo)), ExpansionSettings(**settings))
    return serialize_xml(out)


def test_text_slot():
    t = '<p><xtl:text select="/r/name"/></p>'
    assert run(t, "<r><name>Ann</name></r>") == "<p>Ann</p>"
    assert run(t, "<r/>") == '<p><xtl:text select="/r/name"/></p>'


def test_for_each():
    t = '<l><xtl:for-each select="/r/i"><x/></xtl:for-each></l>'
    assert run(t, "<r><i/><i/></r>") == "<l><x/><x/></l>"
    assert run(t, "<r/>") == t


def test_relative_queries_follow_the_iteration():
    t = '<l><xtl:for-each select="/r/i"><x><xtl:attribute name="n" select="@id"/><xtl:text select="text()"/></x></xtl:for-each></l>'
    out = run(t, '<r><i id="1">a</i><i id="2">b</i></r>')
    assert out == '<l><x n="1">a</x><x n="2">b</x></l>'


def test_attribute_merges_after_literals():
    t = '<p lang="en"><xtl:attribute name="id" select="/r/@k"/></p>'
    assert run(t, '<r k="7"/>') == '<p lang="en" id="7"/>'
    assert run(t, "<r/>") == t


def test_scalar_slots_take_the_first_result():
    t = '<p><xtl:text select="/r/i"/></p>'
    assert run(t, "<r><i>1</i><i>2</i></r>") == "<p>1</p>"


def test_include_splices_a_copy():
    t = '<p><xtl:include select="/r/b"/></p>'
    assert run(t, '<r><b k="1"><c/>x</b></r>') == '<p><b k="1"><c/>x</b></p>'
    assert run(t, "<r/>") == t


def test_choice_is_first_success():
    t = '<p><xtl:choice><xtl:text select="/r/a"/><xtl:text select="/r/b"/></xtl:choice></p>'
    assert run(t, "<r><a>A</a><b>B</b></r>") == "<p>A</p>"
    assert run(t, "<r><b>B</b></r>") == "<p>B</p>"
    # both stage: the left alternative's staged form is kept
    assert run(t, "<r/>") == '<p><xtl:text select="/r/a"/></p>'


def test_for_each_without_selector_stages():
    t = "<p><xtl:for-each><a/></xtl:for-each></p>"
    assert run(t, "<r/>") == t


def test_inner_staging_keeps_the_whole_for_each():
    t = '<l><xtl:for-each select="/r/i"><x><xtl:text select="@id"/></x></xtl:for-each></l>'
    assert run(t, '<r><i id="1"/><i/></r>') == t


def test_staged_for_each_carries_its_macros():
    t = ('<l><xtl:macro name="m"><y/></xtl:macro>'
         '<xtl:for-each select="/r/i"><xtl:call-macro name="m"/></xtl:for-each></l>')
    assert run(t, "<r/>") == t
    assert run(t, "<r><i/></r>") == "<l><y/></l>"


def test_recursive_macro_consumes_data():
    # an empty for-each stages, so recursion bottoms out through a choice
    t = ('<tree><xtl:macro name="n"><xtl:choice><xtl:for-each select="i"><node>'
         '<xtl:attribute name="id" select="@id"/><xtl:call-macro name="n"/></node>'
         '</xtl:for-each><leaf/></xtl:choice></xtl:macro><xtl:call-macro name="n"/></tree>')
    repo = '<r><i id="1"><i id="2"/><i id="3"><i id="4"/></i></i></r>'
    assert run(t, repo) == (
        '<tree><node id="1"><node id="2"><leaf/></node>'
        '<node id="3"><node id="4"><leaf/></node></node></node></tree>'
    )


def test_strict_mode_names_query_and_path():
    t = '<p><q><xtl:text select="/r/name"/></q></p>'
    with pytest.raises(UnsatisfiedQueryError) as info:
        run(t, "<r/>", staging_enabled=False)
    assert info.value.query == "/r/name"
    assert info.value.template_path == "/p/q/xtl:text"


def test_recursion_limit():
    entry = ElR("a", (), Then(MacroR("m"), EPSILON))
    macros = {"m": Then(ElR("b", (), Then(MacroR("m"), EPSILON)), EPSILON)}
    with pytest.raises(RecursionLimitError):
        expand(entry, macros, xml_repository(()), ExpansionSettings(max_macro_depth=5))
    with pytest.raises(RecursionLimitError):
        expand(entry, macros, xml_repository(()))
    with pytest.raises(ValueError):
        ExpansionSettings(max_macro_depth=0)


def test_is_fully_expanded():
    assert is_fully_expanded(parse_xml("<p>Ann</p>"))
    assert not is_fully_expanded(parse_xml('<p><xtl:text select="/r/name"/></p>'))
    assert is_fully_expanded(())


def test_sequence_entry_with_staged_macros_is_wrapped():
    entry = Then(Star(Then(MacroR("m"), EPSILON), "/r/i"), EPSILON)
    out = expand(entry, {"m": Then(ElR("y"), EPSILON)}, xml_repository(parse_xml("<r/>")))
    assert serialize_xml(out) == (
        '<xtl:template><xtl:macro name="m"><y/></xtl:macro>'
        '<xtl:for-each select="/r/i"><xtl:call-macro name="m"/></xtl:for-each></xtl:template>'
    )


def _pairs(seed, n):
    rng = random.Random(seed)
    for _ in range(n):
        yield random_template(rng), random_repository(rng)


def test_determinism():
    for (entry, macros), repo in _pairs(11, 200):
        a = expand(entry, macros, xml_repository(repo))
        b = expand(entry, macros, xml_repository(repo))
        assert a == b


def test_idempotency_sample():
    for (entry, macros), repo in _pairs(12, 300):
        out = expand(entry, macros, xml_repository(repo))
        again = expand(*parse_xtl(out), xml_repository(repo))
        assert again == out


def test_unification_sample():
    for (entry, macros), repo in _pairs(13, 300):
        out = expand(entry, macros, xml_repository(repo))
        if is_fully_expanded(out):
            assert validate(entry, macros, out).valid


def _reads_whole_root(entry, macros):
    terms = [entry, *macros.values()]
    while terms:
        r = terms.pop()
        if isinstance(r, (IncludeR, TextR)) and r.query == "/r":
            return True
        terms.extend(getattr(r, f) for f in ("content", "left", "right", "head", "tail", "body")
                     if hasattr(r, f))
    return False


def test_context_locality():
    # grafting a subtree no query addresses changes nothing
    for (entry, macros), repo in _pairs(14, 300):
        if _reads_whole_root(entry, macros):
            continue
        (root,) = repo
        grafted = (Element("r", root.attributes,
                           root.children + (Element("unrelated", [("id", "0")], [Text("z")]),)),)
        assert expand(entry, macros, xml_repository(repo)) == expand(
            entry, macros, xml_repository(grafted)
        )


def test_events_match_staging():
    for (entry, macros), repo in _pairs(15, 300):
        out, events = expand_with_events(entry, macros, xml_repository(repo))
        assert bool(events) == (not is_fully_expanded(out))
