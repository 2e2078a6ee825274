"""Language to territory mapping and polygon reverse geocoding."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import AtlasError
from .ids import id_key, is_qitem, sorted_ids

ISO3166_RE = re.compile(r"[A-Z]{2}")
ISO31662_RE = re.compile(r"([A-Z]{2})-[A-Z0-9]{1,3}")

REQUIRED_COLUMNS = ("language", "qitem", "iso3166", "iso31662", "keywords")
# Optional columns: the language's own qitem, its names (matched as language
# keywords) and dialect qitems. Values must agree across a language's rows.
OPTIONAL_COLUMNS = ("language_qitem", "language_names", "dialects")


@dataclass(frozen=True)
class Territory:
    qitem: str
    iso3166: str
    iso31662: str | None
    level: int
    keywords: tuple[str, ...]

    def __post_init__(self):
        if not is_qitem(self.qitem):
            raise AtlasError(f"bad territory qitem {self.qitem!r}")
        if not ISO3166_RE.fullmatch(self.iso3166 or ""):
            raise AtlasError(f"malformed ISO 3166 code {self.iso3166!r}")
        if self.iso31662 is not None:
            m = ISO31662_RE.fullmatch(self.iso31662)
            if m is None or m.group(1) != self.iso3166:
                raise AtlasError(f"malformed ISO 3166-2 code {self.iso31662!r}")
        if self.level != (2 if self.iso31662 else 1):
            raise AtlasError(f"level {self.level} inconsistent with ISO codes of {self.qitem}")
        if not self.keywords:
            raise AtlasError(f"empty keyword list for {self.qitem}")
        for kw in self.keywords:
            if kw != kw.strip() or kw != kw.lower() or not kw:
                raise AtlasError(f"keyword {kw!r} must be lowercase and stripped")

    @property
    def iso_code(self) -> str:
        return self.iso31662 or self.iso3166


@dataclass(frozen=True)
class LanguageInfo:
    code: str
    qitem: str | None = None
    names: tuple[str, ...] = ()
    dialects: tuple[str, ...] = ()

    @property
    def qitems(self) -> frozenset[str]:
        """The language qitem plus its dialects."""
        items = set(self.dialects)
        if self.qitem:
            items.add(self.qitem)
        return frozenset(items)


@dataclass(frozen=True)
class LanguageAtlas:
    by_language: dict[str, tuple[Territory, ...]]
    by_qitem: dict[str, frozenset[str]]
    languages: dict[str, LanguageInfo] = field(default_factory=dict)

    def territory(self, qitem: str, language: str | None = None) -> Territory | None:
        """Look up a territory row, preferring the one loaded for ``language``."""
        langs = self.by_qitem.get(qitem)
        if not langs:
            return None
        order = sorted(langs)
        if language in langs:
            order.insert(0, language)
        for lang in order:
            for t in self.by_language[lang]:
                if t.qitem == qitem:
                    return t
        return None

    def all_qitems(self) -> frozenset[str]:
        return frozenset(self.by_qitem)

    def language(self, code: str) -> LanguageInfo:
        _require_language(self, code)
        return self.languages.get(code, LanguageInfo(code))


def _split_list(cell: str | None) -> list[str]:
    if not cell:
        return []
    return [part.strip() for part in cell.split(";") if part.strip()]


def load_atlas(path) -> LanguageAtlas:
    """Read an atlas CSV; errors name the offending line."""
    path = Path(path)
    rows: dict[str, dict[str, Territory]] = {}
    langs: dict[str, LanguageInfo] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise AtlasError(f"{path}: no territories loaded")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise AtlasError(f"{path}: missing columns {missing}")
        for row in reader:
            line = reader.line_num
            where = f"{path}:{line}"
            lang = (row["language"] or "").strip()
            if not lang:
                raise AtlasError(f"{where}: empty language code")
            keywords = [k.lower() for k in _split_list(row["keywords"])]
            if not keywords:
                raise AtlasError(f"{where}: empty keyword list")
            iso31662 = (row["iso31662"] or "").strip() or None
            try:
                territory = Territory(
                    qitem=(row["qitem"] or "").strip(),
                    iso3166=(row["iso3166"] or "").strip(),
                    iso31662=iso31662,
                    level=2 if iso31662 else 1,
                    keywords=tuple(keywords),
                )
            except AtlasError as exc:
                raise AtlasError(f"{where}: {exc}") from None
            per_lang = rows.setdefault(lang, {})
            if territory.qitem in per_lang:
                raise AtlasError(f"{where}: duplicate row ({lang}, {territory.qitem})")
            per_lang[territory.qitem] = territory

            lang_qitem = (row.get("language_qitem") or "").strip() or None
            if lang_qitem is not None and not is_qitem(lang_qitem):
                raise AtlasError(f"{where}: bad language qitem {lang_qitem!r}")
            dialects = set(_split_list(row.get("dialects")))
            for d in dialects:
                if not is_qitem(d):
                    raise AtlasError(f"{where}: bad dialect qitem {d!r}")
            prev = langs.get(lang, LanguageInfo(lang))
            if lang_qitem and prev.qitem and lang_qitem != prev.qitem:
                raise AtlasError(f"{where}: language qitem {lang_qitem} disagrees with {prev.qitem}")
            langs[lang] = LanguageInfo(
                code=lang,
                qitem=prev.qitem or lang_qitem,
                names=tuple(sorted(set(prev.names) | {n.lower() for n in _split_list(row.get("language_names"))})),
                dialects=tuple(sorted_ids(set(prev.dialects) | dialects)),
            )
    if not rows:
        raise AtlasError(f"{path}: no territories loaded")

    by_language = {
        lang: tuple(sorted(terrs.values(), key=lambda t: id_key(t.qitem)))
        for lang, terrs in sorted(rows.items())
    }
    inverse: dict[str, set[str]] = {}
    for lang, terrs in by_language.items():
        for t in terrs:
            inverse.setdefault(t.qitem, set()).add(lang)
    by_qitem = {q: frozenset(inverse[q]) for q in sorted_ids(inverse)}
    return LanguageAtlas(by_language=by_language, by_qitem=by_qitem, languages=dict(sorted(langs.items())))


def _require_language(atlas: LanguageAtlas, language: str) -> None:
    if language not in atlas.by_language:
        raise AtlasError(f"unknown language code {language!r}")


def territories_for(atlas: LanguageAtlas, language: str) -> set[Territory]:
    _require_language(atlas, language)
    return set(atlas.by_language[language])


def abroad_territories(atlas: LanguageAtlas, language: str) -> set[str]:
    """Qitems of every atlas territory not mapped to ``language``."""
    _require_language(atlas, language)
    home = {t.qitem for t in atlas.by_language[language]}
    return set(atlas.by_qitem) - home


# --- boundaries -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BoundarySet:
    """Territory polygons as ``(lat, lon)`` vertex arrays, implicitly closed."""

    polygons: dict[str, tuple[np.ndarray, ...]]
    levels: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        for qitem, polys in self.polygons.items():
            for poly in polys:
                _check_polygon(qitem, poly)

    def search_order(self) -> list[str]:
        """Regions before countries, then numerically smallest qitem first."""
        return sorted(self.polygons, key=lambda q: (-self.levels.get(q, 1), id_key(q)))

    def __eq__(self, other):
        if not isinstance(other, BoundarySet):
            return NotImplemented
        if self.polygons.keys() != other.polygons.keys() or self.levels != other.levels:
            return False
        return all(
            len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))
            for a, b in ((self.polygons[q], other.polygons[q]) for q in self.polygons)
        )


def _check_polygon(qitem: str, poly: np.ndarray) -> None:
    if poly.ndim != 2 or poly.shape[1] != 2:
        raise AtlasError(f"{qitem}: polygon vertices must be (lat, lon) pairs")
    if len({(float(a), float(b)) for a, b in poly}) < 3:
        raise AtlasError(f"{qitem}: polygon needs at least 3 distinct vertices")
    if not ((np.abs(poly[:, 0]) <= 90).all() and (np.abs(poly[:, 1]) <= 180).all()):
        raise AtlasError(f"{qitem}: polygon vertex out of range")


def make_boundaries(polygons: dict, levels: dict | None = None) -> BoundarySet:
    """Build a BoundarySet from plain nested lists."""
    arrays = {
        q: tuple(np.ascontiguousarray(np.asarray(p, dtype=np.float64).reshape(-1, 2)) for p in polys)
        for q, polys in polygons.items()
    }
    for q in arrays:
        if not is_qitem(q):
            raise AtlasError(f"bad boundary qitem {q!r}")
    return BoundarySet(arrays, dict(levels or {}))


def load_boundaries(path, atlas: LanguageAtlas | None = None) -> BoundarySet:
    """Read boundary JSON Lines; levels come from the record or the atlas."""
    path = Path(path)
    polygons: dict[str, list] = {}
    levels: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                qitem = rec["qitem"]
                polys = rec["polygons"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise AtlasError(f"{path}:{lineno}: malformed boundary record ({exc})") from None
            if qitem in polygons:
                raise AtlasError(f"{path}:{lineno}: duplicate boundary for {qitem}")
            polygons[qitem] = polys
            if "level" in rec:
                levels[qitem] = int(rec["level"])
            elif atlas is not None:
                t = atlas.territory(qitem)
                if t is not None:
                    levels[qitem] = t.level
    try:
        return make_boundaries(polygons, levels)
    except (AtlasError, ValueError) as exc:
        raise AtlasError(f"{path}: {exc}") from None


def reverse_geocode(point: tuple[float, float], boundaries: BoundarySet) -> str | None:
    lat, lon = point
    return reverse_geocode_many([(lat, lon)], boundaries)[0]


def reverse_geocode_many(points, boundaries: BoundarySet) -> list[str | None]:
    """Resolve many points at once; same semantics as :func:`reverse_geocode`."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    result: list[str | None] = [None] * len(pts)
    pending = np.arange(len(pts))
    for qitem in boundaries.search_order():
        if pending.size == 0:
            break
        hit = np.zeros(pending.size, dtype=bool)
        for poly in boundaries.polygons[qitem]:
            hit |= _kernels.points_in_ring(pts[pending, 0], pts[pending, 1], poly)
        for i in pending[hit]:
            result[int(i)] = qitem
        pending = pending[~hit]
    return result
