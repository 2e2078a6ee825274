"""Wikidata property groups, the location closure and claim-based evidence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ValidationError
from .ids import id_key, is_property, sorted_ids

GROUPS = (
    "country",
    "location",
    "language_strong",
    "created_by",
    "part_of",
    "language_weak",
    "affiliation",
    "has_part",
)

DEFAULT_GROUPS = {
    "country": ("P17", "P27", "P495", "P1532"),
    "location": (
        "P276", "P131", "P1376", "P669", "P2825", "P609", "P1001", "P3842", "P3018",
        "P115", "P485", "P291", "P840", "P1444", "P1071", "P740", "P159", "P2541",
    ),
    "language_strong": ("P37", "P364", "P103"),
    "created_by": ("P19", "P112", "P170", "P84", "P50", "P178", "P943", "P676", "P86"),
    "part_of": ("P361",),
    "language_weak": ("P407", "P1412", "P2936"),
    "affiliation": (
        "P463", "P102", "P54", "P69", "P108", "P39", "P937", "P1027", "P166", "P118",
        "P611", "P1416", "P551",
    ),
    "has_part": ("P527", "P150"),
}


@dataclass(frozen=True)
class PropertyCatalog:
    groups: Mapping[str, frozenset[str]]

    def __post_init__(self):
        unknown = set(self.groups) - set(GROUPS)
        if unknown:
            raise ValidationError(f"unknown property groups {sorted(unknown)}")
        seen: dict[str, str] = {}
        for name, props in self.groups.items():
            for p in props:
                if not is_property(p):
                    raise ValidationError(f"malformed property id {p!r} in group {name}")
                if p in seen:
                    raise ValidationError(f"{p} appears in both {seen[p]} and {name}")
                seen[p] = name

    def get(self, group: str) -> frozenset[str]:
        return self.groups.get(group, frozenset())

    @classmethod
    def default(cls) -> "PropertyCatalog":
        return cls({g: frozenset(ps) for g, ps in DEFAULT_GROUPS.items()})

    @classmethod
    def load(cls, path) -> "PropertyCatalog":
        """Defaults overridden group-by-group by a JSON ``{group: [property, ...]}`` file."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValidationError(f"{path}: catalog must be a JSON object")
        groups = dict(DEFAULT_GROUPS)
        for name, props in data.items():
            if not isinstance(props, list):
                raise ValidationError(f"{path}: group {name} must be a list")
            groups[name] = tuple(props)
        return cls({g: frozenset(ps) for g, ps in groups.items()})


@dataclass(frozen=True)
class LocationClosure:
    """Entities reachable from seed territories through location claims.

    ``depth`` is the expansion round an entity was added in (0 for seeds);
    ``territory`` is the seed each entity resolves to.
    """

    depth: Mapping[str, int]
    territory: Mapping[str, str] = field(default_factory=dict)

    def __contains__(self, qitem) -> bool:
        return qitem in self.depth


def build_location_closure(
    wikidata, territories, catalog: PropertyCatalog, max_rounds: int = 10, exclude=frozenset()
) -> LocationClosure:
    """Fixed-point expansion over location-group claims.

    Each round adds every entity with a location claim pointing into the
    closure as it stood at the end of the previous round. Entities in
    ``exclude`` are never added.
    """
    location_props = catalog.get("location")
    referrers: dict[str, set[str]] = {}
    for qitem, entity in wikidata.items():
        for prop, values in entity.claims.items():
            if prop in location_props:
                for v in values:
                    referrers.setdefault(v, set()).add(qitem)

    depth = {t: 0 for t in territories}
    terr = {t: t for t in territories}
    frontier = set(depth)
    for rnd in range(1, max_rounds + 1):
        candidates = set()
        for q in frontier:
            candidates |= referrers.get(q, set())
        candidates -= depth.keys()
        candidates -= set(exclude)
        if not candidates:
            break
        for q in candidates:
            reached = {
                terr[v]
                for prop, values in wikidata[q].claims.items()
                if prop in location_props
                for v in values
                if v in depth
            }
            terr[q] = min(reached, key=id_key)
        for q in candidates:
            depth[q] = rnd
        frontier = candidates
    ordered = sorted_ids(depth)
    return LocationClosure({q: depth[q] for q in ordered}, {q: terr[q] for q in ordered})


@dataclass(frozen=True)
class PropertyContext:
    """Everything claim matching needs to know about one language."""

    home_territories: frozenset[str]
    abroad_territories: frozenset[str]
    closure: LocationClosure
    abroad_closure: LocationClosure
    language_qitems: frozenset[str]
    other_language_qitems: frozenset[str]


@dataclass
class PropertyEvidence:
    home: dict[str, tuple[str, ...]] = field(default_factory=dict)
    other: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def merge(self, other: "PropertyEvidence") -> None:
        self.home.update({k: v for k, v in other.home.items() if v})
        self.other.update({k: v for k, v in other.other.items() if v})


def _encode(prop: str, value: str, territory: str | None = None) -> str:
    if territory is None or territory == value:
        return f"{prop}:{value}"
    return f"{prop}:{value}:{territory}"


def _evidence_key(item: str):
    parts = item.split(":")
    return tuple(id_key(p) for p in parts)


def qualify_by_properties(
    claims,
    catalog: PropertyCatalog,
    ctx: PropertyContext,
    reliable=frozenset(),
    other_reliable=frozenset(),
    groups=GROUPS,
    self_qitem: str | None = None,
) -> PropertyEvidence:
    """Match an entity's claims against each requested property group.

    ``reliable`` holds qitems of articles already reliably in this
    language's cultural context; ``other_reliable`` holds qitems of articles
    reliably belonging to another language's context.
    """
    home: dict[str, list[str]] = {g: [] for g in groups}
    other: dict[str, list[str]] = {g: [] for g in groups}
    for group in groups:
        props = catalog.get(group)
        for prop, values in claims.items():
            if prop not in props:
                continue
            for v in values:
                if v == self_qitem:
                    continue
                if group == "country":
                    if v in ctx.home_territories:
                        home[group].append(_encode(prop, v))
                    elif v in ctx.abroad_territories:
                        other[group].append(_encode(prop, v))
                elif group == "location":
                    if v in ctx.closure:
                        home[group].append(_encode(prop, v, ctx.closure.territory[v]))
                    elif v in ctx.abroad_closure:
                        other[group].append(_encode(prop, v, ctx.abroad_closure.territory[v]))
                elif group in ("language_strong", "language_weak"):
                    if v in ctx.language_qitems:
                        home[group].append(_encode(prop, v))
                    elif v in ctx.other_language_qitems:
                        other[group].append(_encode(prop, v))
                else:
                    if v in reliable:
                        home[group].append(_encode(prop, v))
                    elif v in other_reliable:
                        other[group].append(_encode(prop, v))
    return PropertyEvidence(
        home={g: tuple(sorted(set(home[g]), key=_evidence_key)) for g in groups},
        other={g: tuple(sorted(set(other[g]), key=_evidence_key)) for g in groups},
    )


def evidence_territory(item: str) -> str:
    """The qitem an evidence entry points to (territory for location entries)."""
    return item.split(":")[-1]


def evidence_value(item: str) -> str:
    return item.split(":")[1]
