"""Hypothesis strategies shared by the property suites."""

import string

from hypothesis import strategies as st

from qgir.kb import Level, OntologyWeights, gazetteer_from_dict, ontology_from_dict
from qgir.propositions import DEFAULT_PREDICATES, EQ, And, GeoAtom, Leaf, Nested, Not, Or, ThematicAtom

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
alphas = st.lists(unit, min_size=1, max_size=8)

weights = st.builds(
    lambda ws, norm: OntologyWeights(*sorted(ws), normalization=norm),
    st.lists(st.floats(0.05, 1.0), min_size=3, max_size=3, unique=True),
    st.sampled_from(["LOG", "LINEAR"]),
)


@st.composite
def raw_ontologies(draw, max_size=8):
    n = draw(st.integers(1, max_size))
    concepts = [{"id": "c0"}]
    for i in range(1, n):
        concepts.append({"id": f"c{i}", "parent": f"c{draw(st.integers(0, i - 1))}"})
    if n > 1:
        links = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4))
        for a, b in links:
            if a != b:
                rel = concepts[a].setdefault("related", [])
                if f"c{b}" not in rel:
                    rel.append(f"c{b}")
    return concepts


ontologies = raw_ontologies().map(lambda cs: (cs, ontology_from_dict({"concepts": cs})))


@st.composite
def gazetteers(draw, max_size=10):
    """A random place tree whose child boxes sit inside their parents."""
    n = draw(st.integers(1, max_size))
    places = [{"id": "p0", "name": "p0", "level": "COUNTRY", "mbr": [0.0, 0.0, 100.0, 100.0]}]
    for i in range(1, n):
        candidates = [p for p in places if Level[p["level"]] < Level.TOWN]
        parent = draw(st.sampled_from(candidates))
        x0, y0, x1, y1 = parent["mbr"]
        fx = sorted(draw(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2)))
        fy = sorted(draw(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2)))
        if fx[1] - fx[0] < 0.05 or fy[1] - fy[0] < 0.05:
            fx, fy = [0.25, 0.75], [0.25, 0.75]
        mbr = [x0 + fx[0] * (x1 - x0), y0 + fy[0] * (y1 - y0), x0 + fx[1] * (x1 - x0), y0 + fy[1] * (y1 - y0)]
        level = Level(draw(st.integers(Level[parent["level"]] + 1, Level.TOWN)))
        places.append({"id": f"p{i}", "name": f"p{i}", "level": level.name, "parent": parent["id"], "mbr": mbr})
    return gazetteer_from_dict({"places": places})


_word = st.one_of(
    st.text(string.ascii_letters + string.digits + "-_.,:'", min_size=1, max_size=6),
    st.sampled_from(["AND", "OR", "NOT", "theme:", "GEO:", "IN", "NEAR", "x(y", 'q"t', "b\\s", "\t"]),
)
keywords = st.lists(_word, min_size=1, max_size=3).map(" ".join).map(str.strip).filter(bool)

theme_atoms = keywords.map(ThematicAtom)
geo_atoms = st.builds(GeoAtom, st.sampled_from(sorted(DEFAULT_PREDICATES)), keywords)
_spatial_ops = sorted(DEFAULT_PREDICATES - {EQ})


def exprs(atoms, depth=6, nested=False):
    """Expression trees of height at most ``depth``."""
    leaf = atoms.map(Leaf)
    if depth <= 1:
        return leaf
    sub = exprs(atoms, depth - 1, nested)
    options = [
        leaf,
        sub.map(Not),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
    ]
    if nested:
        compound = sub.filter(lambda e: not isinstance(e, Leaf))
        options.append(st.builds(Nested, st.sampled_from(_spatial_ops), compound))
    return st.one_of(*options)
