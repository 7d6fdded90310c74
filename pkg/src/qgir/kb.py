"""Knowledge bases: the domain ontology and the gazetteer.

Both are loaded from JSON, validated eagerly and immutable afterwards, so a
single instance can be shared by any number of concurrent scorers.
"""

from __future__ import annotations

import enum
import heapq
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import (
    AmbiguousPlaceError,
    KBError,
    UnknownConceptError,
    UnknownPlaceError,
    UnreachableError,
)

# ---------------------------------------------------------------------------
# Ontology
# ---------------------------------------------------------------------------


class Normalization(str, enum.Enum):
    LINEAR = "LINEAR"  # 1 - TD/MD
    LOG = "LOG"  # 1 / (1 + ln(1 + TD))


@dataclass(frozen=True)
class Concept:
    id: str
    label: str
    parent: str | None
    related: tuple[str, ...]
    depth: int
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class OntologyWeights:
    """Link weights for narrower, broader and related hops.

    ``max_distance`` is the normaliser for LINEAR similarity; ``None`` means
    "use the largest finite distance in the ontology".
    """

    w_nt: float = 0.4
    w_bt: float = 0.6
    w_rt: float = 0.8
    max_distance: float | None = None
    normalization: Normalization = Normalization.LOG

    def __post_init__(self) -> None:
        for name in ("w_nt", "w_bt", "w_rt"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        if not self.w_nt < self.w_bt < self.w_rt:
            raise ValueError(
                f"weights must satisfy w_nt < w_bt < w_rt, got {self.w_nt}, {self.w_bt}, {self.w_rt}"
            )
        if self.max_distance is not None and self.max_distance <= 0:
            raise ValueError(f"max_distance must be positive, got {self.max_distance}")
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def link_key(self) -> tuple[float, float, float]:
        return (self.w_nt, self.w_bt, self.w_rt)


class Ontology:
    """A validated concept tree with optional related-term links."""

    def __init__(self, concepts: Mapping[str, Concept], root: str, warnings: Iterable[str] = ()):
        self._concepts = MappingProxyType(dict(concepts))
        self.root = root
        self.warnings = tuple(warnings)
        children: dict[str, list[str]] = defaultdict(list)
        for c in self._concepts.values():
            if c.parent is not None:
                children[c.parent].append(c.id)
        self._children = {k: tuple(v) for k, v in children.items()}
        self._label_index = _build_name_index(
            ((c.id, c.label) for c in self._concepts.values()), kind="concept label"
        )
        alias_index = _build_name_index(
            ((c.id, a) for c in self._concepts.values() for a in c.aliases), kind="concept alias"
        )
        self._alias_index = {k: v for k, v in alias_index.items() if k not in self._label_index}
        self._sssp_cache: dict[tuple[tuple[float, float, float], str], dict[str, float]] = {}
        self._md_cache: dict[tuple[float, float, float], float] = {}

    def __len__(self) -> int:
        return len(self._concepts)

    def __contains__(self, cid: object) -> bool:
        return cid in self._concepts

    def __iter__(self):
        return iter(self._concepts.values())

    def __getitem__(self, cid: str) -> Concept:
        try:
            return self._concepts[cid]
        except KeyError:
            raise UnknownConceptError(cid) from None

    def children(self, cid: str) -> tuple[str, ...]:
        return self._children.get(cid, ())

    def depth(self, cid: str) -> int:
        return self[cid].depth

    def resolve(self, keyword: str) -> str:
        """Map a keyword to a concept id: label first, then alias, then id."""
        key = _norm(keyword)
        if key in self._label_index:
            return self._label_index[key]
        if key in self._alias_index:
            return self._alias_index[key]
        if keyword in self._concepts:
            return keyword
        raise UnknownConceptError(keyword)

    def edges(self, cid: str, weights: OntologyWeights):
        """Outgoing weighted hops from ``cid``; each cost is already divided by the target depth."""
        c = self[cid]
        if c.parent is not None:
            yield c.parent, weights.w_bt / self._concepts[c.parent].depth
        for child in self.children(cid):
            yield child, weights.w_nt / self._concepts[child].depth
        for r in c.related:
            yield r, weights.w_rt / self._concepts[r].depth

    def distances_from(self, source: str, weights: OntologyWeights) -> Mapping[str, float]:
        """Single-source weighted shortest paths (uniform-cost search)."""
        self[source]
        key = (weights.link_key, source)
        cached = self._sssp_cache.get(key)
        if cached is not None:
            return cached
        dist: dict[str, float] = {source: 0.0}
        done: set[str] = set()
        heap = [(0.0, source)]
        while heap:
            d, node = heapq.heappop(heap)
            if node in done:
                continue
            done.add(node)
            for nxt, cost in self.edges(node, weights):
                nd = d + cost
                if nd < dist.get(nxt, math.inf):
                    dist[nxt] = nd
                    heapq.heappush(heap, (nd, nxt))
        result = MappingProxyType(dist)
        self._sssp_cache[key] = result
        return result

    def max_distance(self, weights: OntologyWeights) -> float:
        """Largest finite distance over all ordered concept pairs (MD)."""
        key = weights.link_key
        if key not in self._md_cache:
            self._md_cache[key] = max(
                (max(self.distances_from(cid, weights).values()) for cid in self._concepts),
                default=0.0,
            )
        return self._md_cache[key]

    def depth_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(c.depth for c in self._concepts.values()).items()))


def weighted_shortest_path(ont: Ontology, w: OntologyWeights, a: str, b: str) -> float:
    """Directed weighted distance TD(a -> b) between two concept ids.

    Raises UnreachableError when no directed path exists.
    """
    ont[b]
    dist = ont.distances_from(a, w)
    if b not in dist:
        raise UnreachableError(a, b)
    return dist[b]


def ontology_from_dict(data: Mapping[str, Any]) -> Ontology:
    if not isinstance(data, Mapping) or not isinstance(data.get("concepts"), list):
        raise KBError("ontology must be an object with a 'concepts' list")
    raw: dict[str, dict[str, Any]] = {}
    for i, entry in enumerate(data["concepts"]):
        if not isinstance(entry, Mapping) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise KBError(f"concept #{i} has no string id")
        cid = entry["id"]
        if cid in raw:
            raise KBError(f"duplicate concept id {cid!r}", cid)
        unknown = set(entry) - {"id", "label", "parent", "related", "aliases"}
        if unknown:
            raise KBError(f"concept {cid!r} has unknown fields {sorted(unknown)}", cid)
        raw[cid] = dict(entry)

    for cid, entry in raw.items():
        parent = entry.get("parent")
        if parent is not None and parent not in raw:
            raise KBError(f"concept {cid!r} has dangling parent {parent!r}", cid)
        if parent == cid:
            raise KBError(f"concept {cid!r} is its own parent", cid, (cid,))
        for r in entry.get("related", []):
            if r not in raw:
                raise KBError(f"concept {cid!r} has dangling related id {r!r}", cid)
            if r == cid:
                raise KBError(f"concept {cid!r} is related to itself", cid)

    depths = _depths({cid: e.get("parent") for cid, e in raw.items()}, what="concept")
    roots = sorted(cid for cid, e in raw.items() if e.get("parent") is None)
    if len(roots) != 1:
        raise KBError(f"ontology must have exactly one root, found {len(roots)}: {roots}",
                      roots[0] if roots else None, tuple(roots))

    concepts = {}
    for cid, e in raw.items():
        concepts[cid] = Concept(
            id=cid,
            label=str(e.get("label", cid)),
            parent=e.get("parent"),
            related=tuple(dict.fromkeys(e.get("related", []))),
            depth=depths[cid],
            aliases=tuple(str(a) for a in e.get("aliases", [])),
        )
    warnings = [
        f"related link {c.id} -> {r} is one-sided"
        for c in concepts.values()
        for r in c.related
        if c.id not in concepts[r].related
    ]
    return Ontology(concepts, roots[0], warnings)


def load_ontology(path: str | Path) -> Ontology:
    return ontology_from_dict(_read_json(path))


# ---------------------------------------------------------------------------
# Gazetteer
# ---------------------------------------------------------------------------


class Level(enum.IntEnum):
    """Administrative levels, coarse to fine."""

    COUNTRY = 1
    PROVINCE = 2
    CITY = 3
    COUNTY = 4
    TOWN = 5


@dataclass(frozen=True)
class PlaceEntry:
    id: str
    name: str
    level: Level
    parent: str | None
    mbr: tuple[float, float, float, float]
    depth: int
    aliases: tuple[str, ...] = ()

    @property
    def centroid(self) -> tuple[float, float]:
        x0, y0, x1, y1 = self.mbr
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)

    @property
    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.mbr
        return math.hypot(x1 - x0, y1 - y0)

    @property
    def area(self) -> float:
        x0, y0, x1, y1 = self.mbr
        return (x1 - x0) * (y1 - y0)


class Gazetteer:
    """A validated forest of places with a case-insensitive name index."""

    def __init__(self, places: Mapping[str, PlaceEntry], warnings: Iterable[str] = ()):
        self._places = MappingProxyType(dict(places))
        self.warnings = tuple(warnings)
        children: dict[str, list[str]] = defaultdict(list)
        for p in self._places.values():
            if p.parent is not None:
                children[p.parent].append(p.id)
        self._children = {k: tuple(v) for k, v in children.items()}
        names: dict[str, list[str]] = defaultdict(list)
        for p in self._places.values():
            for n in dict.fromkeys(_norm(x) for x in (p.name, *p.aliases)):
                names[n].append(p.id)
        self._names = {k: tuple(sorted(v)) for k, v in names.items()}
        self._ancestors: dict[str, tuple[str, ...]] = {}
        for pid in self._places:
            chain, cur = [], self._places[pid].parent
            while cur is not None:
                chain.append(cur)
                cur = self._places[cur].parent
            self._ancestors[pid] = tuple(chain)
        self._descendants = {pid: 0 for pid in self._places}
        for pid, chain in self._ancestors.items():
            for a in chain:
                self._descendants[a] += 1

    def __len__(self) -> int:
        return len(self._places)

    def __contains__(self, pid: object) -> bool:
        return pid in self._places

    def __iter__(self):
        return iter(self._places.values())

    def __getitem__(self, pid: str) -> PlaceEntry:
        try:
            return self._places[pid]
        except KeyError:
            raise UnknownPlaceError(pid) from None

    def lookup(self, name: str) -> PlaceEntry:
        """Find a place by name or alias; ambiguous names raise."""
        ids = self._names.get(_norm(name))
        if not ids:
            raise UnknownPlaceError(name)
        if len(ids) > 1:
            raise AmbiguousPlaceError(name, ids)
        return self._places[ids[0]]

    def resolve(self, text: str) -> PlaceEntry:
        """Exact id match wins over name lookup, so ids disambiguate."""
        if text in self._places:
            return self._places[text]
        return self.lookup(text)

    def children(self, pid: str) -> tuple[str, ...]:
        return self._children.get(pid, ())

    def part_of(self, pid: str) -> tuple[str, ...]:
        """Transitive closure of parents, nearest first; excludes ``pid`` itself."""
        self[pid]
        return self._ancestors[pid]

    def num_descendants(self, pid: str) -> int:
        self[pid]
        return self._descendants[pid]

    def within(self, inner: str, outer: str) -> bool:
        """True when ``inner`` equals ``outer`` or lies in its subtree."""
        return inner == outer or outer in self.part_of(inner)

    def siblings(self, a: str, b: str) -> bool:
        pa, pb = self[a].parent, self[b].parent
        return a != b and pa is not None and pa == pb

    def level_counts(self) -> dict[str, int]:
        counts = Counter(p.level for p in self._places.values())
        return {lvl.name: counts[lvl] for lvl in Level if counts[lvl]}


def _parse_level(value: Any, pid: str) -> Level:
    try:
        return Level[str(value).upper()]
    except KeyError:
        raise KBError(f"place {pid!r} has unknown level {value!r}", pid) from None


def gazetteer_from_dict(data: Mapping[str, Any]) -> Gazetteer:
    if not isinstance(data, Mapping) or not isinstance(data.get("places"), list):
        raise KBError("gazetteer must be an object with a 'places' list")
    raw: dict[str, dict[str, Any]] = {}
    for i, entry in enumerate(data["places"]):
        if not isinstance(entry, Mapping) or not isinstance(entry.get("id"), str) or not entry["id"]:
            raise KBError(f"place #{i} has no string id")
        pid = entry["id"]
        if pid in raw:
            raise KBError(f"duplicate place id {pid!r}", pid)
        unknown = set(entry) - {"id", "name", "aliases", "level", "parent", "mbr"}
        if unknown:
            raise KBError(f"place {pid!r} has unknown fields {sorted(unknown)}", pid)
        raw[pid] = dict(entry)

    levels = {pid: _parse_level(e.get("level"), pid) for pid, e in raw.items()}
    for pid, e in raw.items():
        parent = e.get("parent")
        if parent is None:
            continue
        if parent not in raw:
            raise KBError(f"place {pid!r} has dangling parent {parent!r}", pid)
        if levels[pid] <= levels[parent]:
            raise KBError(
                f"level inversion: {pid!r} ({levels[pid].name}) is not finer than "
                f"its parent {parent!r} ({levels[parent].name})",
                pid,
                (pid, parent),
            )

    mbrs = {}
    for pid, e in raw.items():
        mbr = e.get("mbr")
        if not isinstance(mbr, (list, tuple)) or len(mbr) != 4:
            raise KBError(f"place {pid!r} needs mbr [min_x, min_y, max_x, max_y]", pid)
        try:
            x0, y0, x1, y1 = (float(v) for v in mbr)
        except (TypeError, ValueError):
            raise KBError(f"place {pid!r} has non-numeric mbr", pid) from None
        if not (x1 > x0 and y1 > y0) or not all(map(math.isfinite, (x0, y0, x1, y1))):
            raise KBError(f"place {pid!r} has a degenerate mbr {list(mbr)}", pid)
        mbrs[pid] = (x0, y0, x1, y1)

    # Strictly increasing levels along parent links rule out cycles.
    depths = _depths({pid: e.get("parent") for pid, e in raw.items()}, what="place")
    places = {
        pid: PlaceEntry(
            id=pid,
            name=str(e.get("name", pid)),
            level=levels[pid],
            parent=e.get("parent"),
            mbr=mbrs[pid],
            depth=depths[pid],
            aliases=tuple(str(a) for a in e.get("aliases", [])),
        )
        for pid, e in raw.items()
    }
    gaz = Gazetteer(places)
    warnings = []
    for p in places.values():
        if p.parent is not None and not _box_within(p.mbr, places[p.parent].mbr):
            warnings.append(f"mbr of {p.id} extends beyond its parent {p.parent}")
    for name, ids in sorted(gaz._names.items()):
        if len(ids) > 1:
            warnings.append(f"name {name!r} is ambiguous between {', '.join(ids)}")
    return Gazetteer(places, warnings)


def load_gazetteer(path: str | Path) -> Gazetteer:
    return gazetteer_from_dict(_read_json(path))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _norm(name: str) -> str:
    return " ".join(name.split()).casefold()


def _build_name_index(pairs: Iterable[tuple[str, str]], kind: str) -> dict[str, str]:
    index: dict[str, str] = {}
    for ident, name in pairs:
        key = _norm(name)
        if not key:
            raise KBError(f"empty {kind} on {ident!r}", ident)
        if key in index and index[key] != ident:
            raise KBError(f"{kind} {name!r} is shared by {index[key]!r} and {ident!r}", ident,
                          (index[key], ident))
        index[key] = ident
    return index


def _depths(parents: Mapping[str, str | None], what: str) -> dict[str, int]:
    depths: dict[str, int] = {}
    for start in parents:
        path: list[str] = []
        on_path: set[str] = set()
        cur: str | None = start
        while cur is not None and cur not in depths:
            if cur in on_path:
                cycle = tuple(path[path.index(cur):])
                raise KBError(f"{what} cycle detected: {' -> '.join(cycle + (cur,))}", cur, cycle)
            on_path.add(cur)
            path.append(cur)
            cur = parents[cur]
        base = 0 if cur is None else depths[cur]
        for node in reversed(path):
            base += 1
            depths[node] = base
    return depths


def _box_within(inner, outer) -> bool:
    return inner[0] >= outer[0] and inner[1] >= outer[1] and inner[2] <= outer[2] and inner[3] <= outer[3]


def _read_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise KBError(f"{path}: JSON parse error: {exc}") from exc
