import json

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from strategies import exprs, geo_atoms, theme_atoms
from qgir.errors import CorpusError, QuerySyntaxError, UnknownPredicateError
from qgir.propositions import (
    EQ, GEO, THEME, And, Document, GeoAtom, InformationUnit, Leaf, Nested, Not, Or, Query, ThematicAtom,
    document_from_json, document_to_json, leaves, parse_corpus, parse_expr, parse_geo_atom, parse_query,
    positive_atoms, print_expr, print_query,
)


def T(k):
    return Leaf(ThematicAtom(k))


def G(place, pred=EQ):
    return Leaf(GeoAtom(pred, place))


def test_predicate_query():
    q = parse_query('theme:(precious metals) geo:(IN "Hebei")')
    assert q == Query(T("precious metals"), G("Hebei", "IN"))


def test_precedence_not_and_or():
    e = parse_expr("a OR b AND NOT c", THEME)
    assert e == Or(T("a"), And(T("b"), Not(T("c"))))
    assert parse_expr("(a OR b) AND c", THEME) == And(Or(T("a"), T("b")), T("c"))
    assert parse_expr("a AND b AND c", THEME) == And(And(T("a"), T("b")), T("c"))


def test_predicate_binds_tighter_than_and():
    e = parse_expr('NEAR "Pinggu" AND IN "Beijing"', GEO)
    assert e == And(G("Pinggu", "NEAR"), G("Beijing", "IN"))
    assert parse_expr('NOT NEAR "Pinggu"', GEO) == Not(G("Pinggu", "NEAR"))


def test_nested_spatial_operand():
    e = parse_expr('NEAR ("Miyun" OR "Pinggu")', GEO)
    assert e == Nested("NEAR", Or(G("Miyun"), G("Pinggu")))


def test_bare_words_and_sections_are_case_insensitive():
    q = parse_query("THEME:(gold ore) Geo:(Inner Mongolia)")
    assert q.theme == T("gold ore")
    assert q.geo == G("Inner Mongolia")
    assert parse_query('geo:(NEAR Pinggu)').geo == G("Pinggu", "NEAR")


@pytest.mark.parametrize("text", [
    "", "theme:()", "theme:(a) theme:(b)", "theme:(a", 'geo:("unterminated)', "theme:(NOT a)",
    "theme:(a AND)", "theme:(a) extra", "geo:(IN)",
])
def test_syntax_errors(text):
    with pytest.raises(QuerySyntaxError):
        parse_query(text)


def test_unknown_predicate():
    with pytest.raises(UnknownPredicateError) as info:
        parse_query('geo:(BESIDE "Pinggu")')
    assert info.value.symbol == "BESIDE"
    assert info.value.position == 5


def test_custom_lexicon():
    q = parse_query('geo:(BESIDE "Pinggu")', lexicon={"BESIDE"})
    assert q.geo == G("Pinggu", "BESIDE")


def test_leaves_track_polarity():
    e = parse_expr("a AND NOT (b OR NOT c)", THEME)
    assert [(a.keyword, pos) for a, pos in leaves(e)] == [("a", True), ("b", False), ("c", True)]
    assert [a.keyword for a in positive_atoms(e)] == ["a", "c"]


def test_printer_quotes_what_it_must():
    assert print_expr(T("gold")) == "gold"
    assert print_expr(T("AND")) == '"AND"'
    assert print_expr(T('say "hi"')) == '"say \\"hi\\""'
    assert print_expr(G("Hebei")) == '"Hebei"'
    assert print_expr(G("Hebei", "IN")) == 'IN "Hebei"'
    assert print_expr(Or(T("a"), Or(T("b"), T("c")))) == "a OR (b OR c)"
    assert print_query(Query(T("a"), G("x"))) == 'theme:(a) geo:("x")'


@given(exprs(theme_atoms))
@settings(max_examples=300)
def test_theme_round_trip(e):
    assert parse_expr(print_expr(e), THEME) == e


@given(exprs(geo_atoms, nested=True))
@settings(max_examples=300)
def test_geo_round_trip(e):
    assert parse_expr(print_expr(e), GEO) == e


def test_unit_invariants():
    u = InformationUnit((ThematicAtom("gold"), ThematicAtom("gold")), ())
    assert u.theme == (ThematicAtom("gold"),)
    with pytest.raises(ValueError):
        InformationUnit()
    with pytest.raises(ValueError):
        ThematicAtom("   ")
    with pytest.raises(ValueError):
        Query()


def test_document_json_round_trip(desk_docs):
    for d in desk_docs:
        assert document_from_json(json.loads(json.dumps(document_to_json(d)))) == d
    d04 = next(d for d in desk_docs if d.id == "d04")
    assert d04.units[1].geo == (GeoAtom("NORTH_PART_OF", "Chengde"),)


def test_corpus_errors_carry_line_numbers():
    good = json.dumps({"id": "a", "units": [{"theme": ["gold"], "geo": ['"Hebei"']}]})
    with pytest.raises(CorpusError) as info:
        parse_corpus([good, "", "{not json"])
    assert info.value.line == 3
    with pytest.raises(CorpusError, match="duplicate"):
        parse_corpus([good, good])
    with pytest.raises(CorpusError, match="atomic"):
        parse_corpus([json.dumps({"id": "b", "units": [{"theme": ["gold OR silver"]}]})])
    assert parse_corpus([]) == []


def test_document_without_units_is_allowed():
    assert document_from_json({"id": "empty"}) == Document("empty", ())


@given(st.one_of(st.none(), exprs(theme_atoms, depth=4)), st.one_of(st.none(), exprs(geo_atoms, depth=4)))
@settings(max_examples=200)
def test_query_round_trip(theme, geo):
    assume(theme is not None or geo is not None)
    q = Query(theme, geo)
    if any(e is not None and not any(pos for _, pos in leaves(e)) for e in (theme, geo)):
        with pytest.raises(QuerySyntaxError, match="no positive atom"):
            parse_query(print_query(q))
    else:
        assert parse_query(print_query(q)) == q
