"""Loading wiki snapshot fixtures into an immutable in-memory model."""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import SnapshotError
from .ids import is_property, is_qitem

SNAPSHOT_FILES = (
    "pages.jsonl",
    "links.jsonl",
    "categories.jsonl",
    "category_edges.jsonl",
    "geotags.jsonl",
    "wikidata.jsonl",
)

ARTICLE_NS = 0


@dataclass(frozen=True)
class PageMetrics:
    num_bytes: int = 0
    num_references: int = 0
    num_edits: int = 0
    num_editors: int = 0
    num_discussions: int = 0
    num_pageviews: int = 0
    featured_article: int = 0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise SnapshotError(f"{name} must be a non-negative integer, got {value!r}")
        if self.featured_article not in (0, 1):
            raise SnapshotError("featured must be 0 or 1")
        if self.num_editors > self.num_edits:
            raise SnapshotError(f"editors ({self.num_editors}) exceed edits ({self.num_edits})")


@dataclass(frozen=True)
class PageRecord:
    page_id: int
    title: str
    qitem: str | None
    date_created: int
    metrics: PageMetrics


@dataclass(frozen=True)
class LinkGraph:
    forward: Mapping[int, frozenset[int]]
    reverse: Mapping[int, frozenset[int]]


@dataclass(frozen=True)
class CategoryGraph:
    titles: Mapping[int, str]
    subcategories: Mapping[int, frozenset[int]]
    members: Mapping[int, frozenset[int]]


@dataclass(frozen=True)
class Entity:
    claims: Mapping[str, tuple[str, ...]]
    sitelinks: Mapping[str, str]


@dataclass(frozen=True)
class WikiSnapshot:
    language: str
    pages: Mapping[int, PageRecord]
    links: LinkGraph
    categories: CategoryGraph
    geotags: Mapping[int, tuple[float, float]]
    wikidata: Mapping[str, Entity]

    def page_by_qitem(self) -> dict[str, int]:
        return {p.qitem: pid for pid, p in self.pages.items() if p.qitem}


_EMPTY = frozenset()


def _freeze(d: dict) -> MappingProxyType:
    return MappingProxyType(dict(sorted(d.items())))


def _read_jsonl(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SnapshotError(f"{path.name}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise SnapshotError(f"{path.name}:{lineno}: expected a JSON object")
            yield lineno, rec


def _get(rec: dict, key: str, kind, where: str):
    if key not in rec:
        raise SnapshotError(f"{where}: missing field {key!r}")
    value = rec[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise SnapshotError(f"{where}: field {key!r} must be an integer")
    if kind is float and (not isinstance(value, (int, float)) or isinstance(value, bool)):
        raise SnapshotError(f"{where}: field {key!r} must be a number")
    if kind is str and not isinstance(value, str):
        raise SnapshotError(f"{where}: field {key!r} must be a string")
    return value


def _valid_date(value: int) -> bool:
    try:
        datetime.datetime.strptime(str(value), "%Y%m%d")
    except ValueError:
        return False
    return len(str(value)) == 8


def _load_pages(path: Path) -> dict[int, PageRecord]:
    pages: dict[int, PageRecord] = {}
    titles: set[str] = set()
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        page_id = _get(rec, "page_id", int, where)
        if page_id <= 0:
            raise SnapshotError(f"{where}: page_id must be positive")
        ns = rec.get("namespace", ARTICLE_NS)
        if ns != ARTICLE_NS:
            raise SnapshotError(f"{where}: pages must be articles (namespace 0), got {ns!r}")
        title = _get(rec, "title", str, where)
        qitem = rec.get("qitem")
        if qitem is not None and not is_qitem(qitem):
            raise SnapshotError(f"{where}: malformed qitem {qitem!r}")
        date_created = _get(rec, "date_created", int, where)
        if not _valid_date(date_created):
            raise SnapshotError(f"{where}: invalid date_created {date_created}")
        try:
            metrics = PageMetrics(
                num_bytes=rec.get("bytes", 0),
                num_references=rec.get("references", 0),
                num_edits=rec.get("edits", 0),
                num_editors=rec.get("editors", 0),
                num_discussions=rec.get("discussions", 0),
                num_pageviews=rec.get("pageviews", 0),
                featured_article=rec.get("featured", 0),
            )
        except SnapshotError as exc:
            raise SnapshotError(f"{where}: {exc}") from None
        if page_id in pages:
            raise SnapshotError(f"{where}: duplicate page_id {page_id}")
        if title in titles:
            raise SnapshotError(f"{where}: duplicate title {title!r}")
        titles.add(title)
        pages[page_id] = PageRecord(page_id, title, qitem, date_created, metrics)
    return pages


def _load_wikidata(path: Path) -> dict[str, Entity]:
    store: dict[str, Entity] = {}
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        qitem = _get(rec, "qitem", str, where)
        if not is_qitem(qitem):
            raise SnapshotError(f"{where}: malformed qitem {qitem!r}")
        if qitem in store:
            raise SnapshotError(f"{where}: duplicate entity {qitem}")
        raw_claims = rec.get("claims", {})
        raw_links = rec.get("sitelinks", {})
        if not isinstance(raw_claims, dict) or not isinstance(raw_links, dict):
            raise SnapshotError(f"{where}: claims and sitelinks must be objects")
        claims = {}
        for prop, values in raw_claims.items():
            if not is_property(prop):
                raise SnapshotError(f"{where}: malformed property id {prop!r}")
            if not isinstance(values, list) or not values:
                raise SnapshotError(f"{where}: claim {prop} needs a nonempty value list")
            for v in values:
                if not is_qitem(v):
                    raise SnapshotError(f"{where}: claim {prop} has malformed value {v!r}")
            claims[prop] = tuple(values)
        for site, title in raw_links.items():
            if not isinstance(site, str) or not isinstance(title, str):
                raise SnapshotError(f"{where}: sitelinks must map strings to strings")
        store[qitem] = Entity(_freeze(claims), _freeze(raw_links))
    return store


def load_snapshot(directory, language: str) -> WikiSnapshot:
    """Load and validate a snapshot directory of JSON Lines files."""
    directory = Path(directory)
    for name in SNAPSHOT_FILES:
        if not (directory / name).is_file():
            raise SnapshotError(f"missing snapshot file {directory / name}")

    pages = _load_pages(directory / "pages.jsonl")
    problems: list[str] = []

    forward: dict[int, set[int]] = {}
    path = directory / "links.jsonl"
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        src = _get(rec, "from", int, where)
        dst = _get(rec, "to", int, where)
        for end in (src, dst):
            if end not in pages:
                problems.append(f"{where}: link references unknown page_id {end}")
        forward.setdefault(src, set()).add(dst)

    titles: dict[int, str] = {}
    path = directory / "categories.jsonl"
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        cat_id = _get(rec, "cat_id", int, where)
        if cat_id in titles:
            raise SnapshotError(f"{where}: duplicate cat_id {cat_id}")
        titles[cat_id] = _get(rec, "title", str, where)

    subcats: dict[int, set[int]] = {}
    members: dict[int, set[int]] = {}
    path = directory / "category_edges.jsonl"
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        parent = _get(rec, "parent", int, where)
        child = _get(rec, "child", int, where)
        kind = rec.get("child_kind")
        if kind not in ("category", "article"):
            raise SnapshotError(f"{where}: child_kind must be 'category' or 'article'")
        if parent not in titles:
            problems.append(f"{where}: edge references unknown category {parent}")
        if kind == "category":
            if child not in titles:
                problems.append(f"{where}: edge references unknown category {child}")
            subcats.setdefault(parent, set()).add(child)
        else:
            if child not in pages:
                problems.append(f"{where}: edge references unknown page_id {child}")
            members.setdefault(parent, set()).add(child)

    geotags: dict[int, tuple[float, float]] = {}
    path = directory / "geotags.jsonl"
    for lineno, rec in _read_jsonl(path):
        where = f"{path.name}:{lineno}"
        pid = _get(rec, "page_id", int, where)
        lat = float(_get(rec, "lat", float, where))
        lon = float(_get(rec, "lon", float, where))
        if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
            raise SnapshotError(f"{where}: coordinates out of range ({lat}, {lon})")
        if pid in geotags:
            raise SnapshotError(f"{where}: second primary geotag for page_id {pid}")
        if pid not in pages:
            problems.append(f"{where}: geotag references unknown page_id {pid}")
        geotags[pid] = (lat, lon)

    wikidata = _load_wikidata(directory / "wikidata.jsonl")

    if problems:
        raise SnapshotError("dangling references:\n  " + "\n  ".join(problems))

    reverse: dict[int, set[int]] = {}
    for src, dsts in forward.items():
        for dst in dsts:
            reverse.setdefault(dst, set()).add(src)

    return WikiSnapshot(
        language=language,
        pages=_freeze(pages),
        links=LinkGraph(
            forward=_freeze({k: frozenset(v) for k, v in forward.items()}),
            reverse=_freeze({k: frozenset(v) for k, v in reverse.items()}),
        ),
        categories=CategoryGraph(
            titles=_freeze(titles),
            subcategories=_freeze({k: frozenset(v) for k, v in subcats.items()}),
            members=_freeze({k: frozenset(v) for k, v in members.items()}),
        ),
        geotags=_freeze(geotags),
        wikidata=_freeze(wikidata),
    )


def _require_page(snapshot: WikiSnapshot, page_id: int) -> None:
    if page_id not in snapshot.pages:
        raise SnapshotError(f"unknown page_id {page_id}")


def outlinks(snapshot: WikiSnapshot, page_id: int) -> frozenset[int]:
    _require_page(snapshot, page_id)
    return snapshot.links.forward.get(page_id, _EMPTY)


def inlinks(snapshot: WikiSnapshot, page_id: int) -> frozenset[int]:
    _require_page(snapshot, page_id)
    return snapshot.links.reverse.get(page_id, _EMPTY)


def _entity(snapshot: WikiSnapshot, qitem: str) -> Entity:
    try:
        return snapshot.wikidata[qitem]
    except KeyError:
        raise SnapshotError(f"unknown qitem {qitem!r}") from None


def interwiki_count(snapshot: WikiSnapshot, qitem: str) -> int:
    return len(_entity(snapshot, qitem).sitelinks)


def wdproperty_count(snapshot: WikiSnapshot, qitem: str) -> int:
    return len(_entity(snapshot, qitem).claims)
