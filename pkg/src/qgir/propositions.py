"""Propositional representation of documents and queries.

A query is a pair of optional boolean expressions, one over thematic
keywords and one over geo atoms (spatial predicate + place name).  A
document is an ordered list of information units, each a flat set of
keywords and a flat set of geo atoms.

Surface syntax::

    theme:(precious metal AND NOT silver) geo:(NEAR "Pinggu" OR IN "Hebei")

Precedence, tightest first: NOT, predicate application, AND, OR.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Collection, Iterator, Union

from .errors import CorpusError, QuerySyntaxError, UnknownPredicateError

EQ = "EQ"
DEFAULT_PREDICATES: frozenset[str] = frozenset(
    {"EQ", "IN", "NEAR", "ADJACENT", "NORTH_OF", "SOUTH_OF", "EAST_OF", "WEST_OF", "NORTH_PART_OF"}
)
RESERVED = frozenset({"AND", "OR", "NOT"})

THEME = "theme"
GEO = "geo"


@dataclass(frozen=True)
class ThematicAtom:
    keyword: str

    def __post_init__(self) -> None:
        kw = self.keyword.strip() if isinstance(self.keyword, str) else ""
        if not kw:
            raise ValueError("thematic keyword must be non-empty")
        object.__setattr__(self, "keyword", kw)


@dataclass(frozen=True)
class GeoAtom:
    predicate: str
    place: str

    def __post_init__(self) -> None:
        place = self.place.strip() if isinstance(self.place, str) else ""
        if not place:
            raise ValueError("geo atom needs a non-empty place name")
        if not self.predicate:
            raise ValueError("geo atom needs a predicate")
        object.__setattr__(self, "place", place)


Atom = Union[ThematicAtom, GeoAtom]


@dataclass(frozen=True)
class Leaf:
    atom: Atom


@dataclass(frozen=True)
class Not:
    operand: "PropExpr"


@dataclass(frozen=True)
class And:
    left: "PropExpr"
    right: "PropExpr"


@dataclass(frozen=True)
class Or:
    left: "PropExpr"
    right: "PropExpr"


@dataclass(frozen=True)
class Nested:
    """A spatial operator applied to a compound geo expression, e.g. ``NEAR ("a" OR "b")``.

    Grammatical, but the scorers reject it: no similarity is defined for it.
    """

    predicate: str
    operand: "PropExpr"


PropExpr = Union[Leaf, Not, And, Or, Nested]


@dataclass(frozen=True)
class InformationUnit:
    theme: tuple[ThematicAtom, ...] = ()
    geo: tuple[GeoAtom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "theme", tuple(dict.fromkeys(self.theme)))
        object.__setattr__(self, "geo", tuple(dict.fromkeys(self.geo)))
        if not self.theme and not self.geo:
            raise ValueError("an information unit needs at least one keyword or place")


@dataclass(frozen=True)
class Document:
    id: str
    units: tuple[InformationUnit, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(self.units))


@dataclass(frozen=True)
class Query:
    theme: PropExpr | None = None
    geo: PropExpr | None = None

    def __post_init__(self) -> None:
        if self.theme is None and self.geo is None:
            raise ValueError("a query needs a theme or a geo part")


# ---------------------------------------------------------------------------
# expression helpers
# ---------------------------------------------------------------------------


def leaves(expr: PropExpr, positive: bool = True) -> Iterator[tuple[Atom, bool]]:
    """Yield ``(atom, polarity)`` for every leaf; polarity flips under each NOT."""
    if isinstance(expr, Leaf):
        yield expr.atom, positive
    elif isinstance(expr, Not):
        yield from leaves(expr.operand, not positive)
    elif isinstance(expr, (And, Or)):
        yield from leaves(expr.left, positive)
        yield from leaves(expr.right, positive)
    elif isinstance(expr, Nested):
        yield from leaves(expr.operand, positive)
    else:
        raise TypeError(f"not a proposition: {expr!r}")


def positive_atoms(expr: PropExpr | None) -> list[Atom]:
    if expr is None:
        return []
    return [a for a, pos in leaves(expr) if pos]


def fold_and(items: list[PropExpr]) -> PropExpr:
    out = items[0]
    for item in items[1:]:
        out = And(out, item)
    return out


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<section>(?i:theme|geo):)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<word>[^\s()"]+)
    """,
    re.VERBOSE,
)
_PRED_SHAPE = re.compile(r"[A-Z][A-Z0-9_]*\Z")
_SAFE_WORD = re.compile(r"[^\s()\"\\]+\Z")
_SECTION_WORD = re.compile(r"(?i:theme|geo):")


@dataclass(frozen=True)
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError("unterminated quoted string", pos)
        kind = m.lastgroup
        if kind == "quoted":
            toks.append(_Tok(kind, re.sub(r"\\(.)", r"\1", m.group()[1:-1]), pos))
        elif kind == "section":
            toks.append(_Tok(kind, m.group()[:-1].lower(), pos))
        elif kind == "word" and m.group() in RESERVED:
            toks.append(_Tok(m.group(), m.group(), pos))
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, lexicon: Collection[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.lexicon = lexicon

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = tok.value or tok.kind
            raise QuerySyntaxError(f"expected {kind}, found {found!r}", tok.pos)
        self.i += 1
        return tok

    def query(self) -> Query:
        if self.tok.kind == "eof":
            raise QuerySyntaxError("empty query", 0)
        parts: dict[str, PropExpr] = {}
        while self.tok.kind != "eof":
            sec = self.take("section")
            if sec.value in parts:
                raise QuerySyntaxError(f"duplicate {sec.value}: section", sec.pos)
            self.take("lparen")
            if self.tok.kind == "rparen":
                raise QuerySyntaxError(f"empty {sec.value}: section", self.tok.pos)
            expr = self.expr(sec.value)
            self.take("rparen")
            if not any(pos for _, pos in leaves(expr)):
                raise QuerySyntaxError(f"{sec.value}: section has no positive atom", sec.pos)
            parts[sec.value] = expr
        return Query(theme=parts.get(THEME), geo=parts.get(GEO))

    def expr(self, kind: str) -> PropExpr:
        left = self.and_expr(kind)
        while self.tok.kind == "OR":
            self.i += 1
            left = Or(left, self.and_expr(kind))
        return left

    def and_expr(self, kind: str) -> PropExpr:
        left = self.unary(kind)
        while self.tok.kind == "AND":
            self.i += 1
            left = And(left, self.unary(kind))
        return left

    def unary(self, kind: str) -> PropExpr:
        tok = self.tok
        if tok.kind == "NOT":
            self.i += 1
            return Not(self.unary(kind))
        if tok.kind == "lparen":
            self.i += 1
            inner = self.expr(kind)
            self.take("rparen")
            return inner
        if kind == THEME:
            return self.theme_atom()
        return self.geo_atom()

    def theme_atom(self) -> PropExpr:
        tok = self.tok
        if tok.kind == "quoted":
            self.i += 1
            return Leaf(self._atom(ThematicAtom, tok, tok.value))
        words = self._words()
        return Leaf(self._atom(ThematicAtom, tok, " ".join(words)))

    def geo_atom(self) -> PropExpr:
        tok = self.tok
        if tok.kind == "quoted":
            self.i += 1
            return Leaf(self._atom(GeoAtom, tok, EQ, tok.value))
        if tok.kind != "word":
            raise QuerySyntaxError(f"expected a place, found {tok.value or tok.kind!r}", tok.pos)
        nxt = self.peek()
        if tok.value in self.lexicon and nxt.kind in ("quoted", "lparen", "word"):
            self.i += 1
            if nxt.kind == "quoted":
                self.i += 1
                return Leaf(self._atom(GeoAtom, nxt, tok.value, nxt.value))
            if nxt.kind == "lparen":
                # operator binds tighter than AND/OR, so only a bracketed operand nests
                self.i += 1
                inner = self.expr(GEO)
                self.take("rparen")
                return Nested(tok.value, inner)
            return Leaf(self._atom(GeoAtom, nxt, tok.value, " ".join(self._words())))
        if tok.value in self.lexicon:
            raise QuerySyntaxError(f"predicate {tok.value} needs a place; quote the name if it is one",
                                   tok.pos)
        if nxt.kind in ("quoted", "lparen") and _PRED_SHAPE.match(tok.value):
            raise UnknownPredicateError(tok.value, tok.pos)
        return Leaf(self._atom(GeoAtom, tok, EQ, " ".join(self._words())))

    def _words(self) -> list[str]:
        words = []
        while self.tok.kind == "word":
            words.append(self.tok.value)
            self.i += 1
        if not words:
            raise QuerySyntaxError(f"expected an atom, found {self.tok.value or self.tok.kind!r}",
                                   self.tok.pos)
        return words

    @staticmethod
    def _atom(cls, tok: _Tok, *args):
        try:
            return cls(*args)
        except ValueError as exc:
            raise QuerySyntaxError(str(exc), tok.pos) from None


def parse_query(text: str, lexicon: Collection[str] = DEFAULT_PREDICATES) -> Query:
    return _Parser(text, lexicon).query()


def parse_expr(text: str, kind: str, lexicon: Collection[str] = DEFAULT_PREDICATES) -> PropExpr:
    """Parse a bare expression (no ``theme:``/``geo:`` wrapper) of the given kind."""
    if kind not in (THEME, GEO):
        raise ValueError(f"kind must be {THEME!r} or {GEO!r}")
    p = _Parser(text, lexicon)
    if p.tok.kind == "eof":
        raise QuerySyntaxError("empty expression", 0)
    expr = p.expr(kind)
    p.take("eof")
    return expr


def parse_geo_atom(text: str, lexicon: Collection[str] = DEFAULT_PREDICATES) -> GeoAtom:
    """Parse ``PLACE``, ``"PLACE"`` or ``PRED "PLACE"``; EQ is the default predicate."""
    expr = parse_expr(text, GEO, lexicon)
    if not isinstance(expr, Leaf):
        raise QuerySyntaxError(f"not an atomic geo proposition: {text!r}")
    return expr.atom


def parse_theme_atom(text: str) -> ThematicAtom:
    expr = parse_expr(text, THEME)
    if not isinstance(expr, Leaf):
        raise QuerySyntaxError(f"not a single keyword: {text!r}")
    return expr.atom


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _print_atom(atom: Atom) -> str:
    if isinstance(atom, ThematicAtom):
        words = atom.keyword.split(" ")
        bare = all(
            _SAFE_WORD.match(w) and w not in RESERVED and not _SECTION_WORD.match(w) for w in words
        )
        return atom.keyword if bare else _quote(atom.keyword)
    if atom.predicate == EQ:
        return _quote(atom.place)
    return f"{atom.predicate} {_quote(atom.place)}"


def print_expr(e: PropExpr) -> str:
    """Canonical text for an expression; parsing it back gives an equal AST."""
    if isinstance(e, Leaf):
        return _print_atom(e.atom)
    if isinstance(e, Not):
        inner = print_expr(e.operand)
        return f"NOT ({inner})" if isinstance(e.operand, (And, Or)) else f"NOT {inner}"
    if isinstance(e, Nested):
        return f"{e.predicate} ({print_expr(e.operand)})"
    if isinstance(e, And):
        left = _wrap(e.left, (Or,))
        right = _wrap(e.right, (Or, And))
        return f"{left} AND {right}"
    if isinstance(e, Or):
        return f"{print_expr(e.left)} OR {_wrap(e.right, (Or,))}"
    raise TypeError(f"not a proposition: {e!r}")


def _wrap(e: PropExpr, kinds: tuple[type, ...]) -> str:
    text = print_expr(e)
    return f"({text})" if isinstance(e, kinds) else text


def print_query(q: Query) -> str:
    parts = []
    if q.theme is not None:
        parts.append(f"theme:({print_expr(q.theme)})")
    if q.geo is not None:
        parts.append(f"geo:({print_expr(q.geo)})")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# corpus (JSON Lines)
# ---------------------------------------------------------------------------


def unit_from_json(obj: Any, lexicon: Collection[str] = DEFAULT_PREDICATES) -> InformationUnit:
    if not isinstance(obj, dict):
        raise ValueError("unit must be an object")
    extra = set(obj) - {"theme", "geo"}
    if extra:
        raise ValueError(f"unit has unknown fields {sorted(extra)}")
    theme_raw = obj.get("theme", [])
    geo_raw = obj.get("geo", [])
    if not isinstance(theme_raw, list) or not isinstance(geo_raw, list):
        raise ValueError("unit 'theme' and 'geo' must be lists of strings")
    theme = tuple(_doc_atom(parse_theme_atom, s) for s in theme_raw)
    geo = tuple(_doc_atom(lambda s: parse_geo_atom(s, lexicon), s) for s in geo_raw)
    return InformationUnit(theme, geo)


def _doc_atom(parse: Callable[[str], Atom], text: Any) -> Atom:
    if not isinstance(text, str):
        raise ValueError(f"expected a string, got {text!r}")
    try:
        return parse(text)
    except QuerySyntaxError as exc:
        raise ValueError(f"document propositions must be atomic: {exc}") from None


def document_from_json(obj: Any, lexicon: Collection[str] = DEFAULT_PREDICATES) -> Document:
    if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
        raise ValueError("document must be an object with a string 'id'")
    extra = set(obj) - {"id", "units"}
    if extra:
        raise ValueError(f"document has unknown fields {sorted(extra)}")
    units = obj.get("units", [])
    if not isinstance(units, list):
        raise ValueError("'units' must be a list")
    return Document(obj["id"], tuple(unit_from_json(u, lexicon) for u in units))


def document_to_json(doc: Document) -> dict[str, Any]:
    return {
        "id": doc.id,
        "units": [
            {"theme": [a.keyword for a in u.theme], "geo": [_print_atom(a) for a in u.geo]}
            for u in doc.units
        ],
    }


def parse_corpus(lines, lexicon: Collection[str] = DEFAULT_PREDICATES) -> list[Document]:
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            doc = document_from_json(json.loads(line), lexicon)
        except (json.JSONDecodeError, ValueError) as exc:
            raise CorpusError(str(exc), lineno) from None
        if doc.id in seen:
            raise CorpusError(f"duplicate document id {doc.id!r}", lineno)
        seen.add(doc.id)
        docs.append(doc)
    return docs


def load_corpus(path: str | Path, lexicon: Collection[str] = DEFAULT_PREDICATES) -> list[Document]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, lexicon)
