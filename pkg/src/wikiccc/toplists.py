"""Ranked Top-CCC lists, their availability in other languages and static rendering."""

from __future__ import annotations

import csv
import datetime as dt
import html
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .ids import id_key
from .snapshot import WikiSnapshot

DEFAULT_LIMIT = 500
MISSING = "(missing)"
NO_DATA = "n/a"
GENDER_PROPERTY = "P21"
FEMALE = "Q6581072"
MALE = "Q6581097"

# ranking feature -> record attribute
FEATURES = {
    "editors": "num_editors",
    "pageviews": "num_pageviews",
    "edits": "num_edits",
    "bytes": "num_bytes",
    "references": "num_references",
    "discussions": "num_discussions",
    "inlinks_from_CCC": "num_inlinks_from_ccc",
    "date_created": "date_created",
}


@dataclass(frozen=True)
class RankingSpec:
    weights: tuple[tuple[str, float], ...]
    descending: bool = True

    def __post_init__(self):
        if not self.weights:
            raise ValidationError("ranking needs at least one feature")
        names = [n for n, _ in self.weights]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate feature in ranking")
        for name, w in self.weights:
            if name not in FEATURES:
                raise ValidationError(f"unknown ranking feature {name!r}")
            if not (w >= 0 and math.isfinite(w)):
                raise ValidationError(f"weight for {name!r} must be non-negative")
        if not math.isclose(sum(w for _, w in self.weights), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValidationError("ranking weights must sum to 1")

    @classmethod
    def single(cls, feature: str, descending: bool = True) -> "RankingSpec":
        return cls(((feature, 1.0),), descending)

    @property
    def is_single(self) -> bool:
        return len(self.weights) == 1

    @property
    def features(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.weights)

    @classmethod
    def from_dict(cls, d: dict) -> "RankingSpec":
        direction = d.get("direction", "desc")
        if direction not in ("asc", "desc"):
            raise ValidationError(f"direction must be asc or desc, not {direction!r}")
        if "feature" in d:
            return cls.single(d["feature"], direction == "desc")
        weights = d.get("weights")
        if not isinstance(weights, dict):
            raise ValidationError("ranking spec needs 'feature' or a 'weights' object")
        return cls(tuple((k, float(v)) for k, v in weights.items()), direction == "desc")


@dataclass(frozen=True)
class SegmentFilter:
    gender: str | None = None  # qitem matched against P21
    geolocated_only: bool = False
    keyword_only: bool = False
    featured_only: bool = False
    created_from: int | None = None  # YYYYMMDD, inclusive
    created_to: int | None = None  # YYYYMMDD, inclusive
    origin_territory: str | None = None

    def accepts(self, record, snapshot: WikiSnapshot) -> bool:
        if self.geolocated_only and record.ccc_geolocated != 1:
            return False
        if self.keyword_only and not record.keyword_title:
            return False
        if self.featured_only and record.featured_article != 1:
            return False
        if self.created_from is not None and record.date_created < self.created_from:
            return False
        if self.created_to is not None and record.date_created > self.created_to:
            return False
        if self.origin_territory is not None and record.main_territory != self.origin_territory:
            return False
        if self.gender is not None:
            entity = snapshot.wikidata.get(record.qitem) if record.qitem else None
            if entity is None or self.gender not in entity.claims.get(GENDER_PROPERTY, ()):
                return False
        return True

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentFilter":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValidationError(f"unknown filter fields: {sorted(unknown)}")
        return cls(**d)


def _shift_years(date: int, years: int) -> int:
    d = dt.date(date // 10000, date // 100 % 100, date % 100)
    try:
        shifted = d.replace(year=d.year + years)
    except ValueError:  # 29 February
        shifted = d.replace(year=d.year + years, day=28)
    return shifted.year * 10000 + shifted.month * 100 + shifted.day


def first_years(start: int, years: int = 3) -> SegmentFilter:
    """Articles created within ``years`` of a reference start date."""
    end = dt.date(*_split(_shift_years(start, years))) - dt.timedelta(days=1)
    return SegmentFilter(created_from=start, created_to=end.year * 10000 + end.month * 100 + end.day)


def last_year(reference: int) -> SegmentFilter:
    """Articles created in the year up to and including ``reference``."""
    begin = dt.date(*_split(_shift_years(reference, -1))) + dt.timedelta(days=1)
    return SegmentFilter(created_from=begin.year * 10000 + begin.month * 100 + begin.day, created_to=reference)


def _split(date: int) -> tuple[int, int, int]:
    return date // 10000, date // 100 % 100, date % 100


# Conventional named lists. The composite weights are a configurable default.
PRESETS = {
    "editors": (RankingSpec.single("editors"), SegmentFilter()),
    "pageviews": (RankingSpec.single("pageviews"), SegmentFilter()),
    "edits": (RankingSpec.single("edits"), SegmentFilter()),
    "discussions": (RankingSpec.single("discussions"), SegmentFilter()),
    "most_linked": (RankingSpec.single("inlinks_from_CCC"), SegmentFilter()),
    "first_created": (RankingSpec.single("date_created", descending=False), SegmentFilter()),
    "women": (RankingSpec.single("edits"), SegmentFilter(gender=FEMALE)),
    "men": (RankingSpec.single("edits"), SegmentFilter(gender=MALE)),
    "geolocated": (RankingSpec.single("editors"), SegmentFilter(geolocated_only=True)),
    "keywords": (RankingSpec.single("bytes"), SegmentFilter(keyword_only=True)),
    "featured": (
        RankingSpec((("bytes", 0.6), ("references", 0.3), ("editors", 0.1))),
        SegmentFilter(featured_only=True),
    ),
}


@dataclass(frozen=True)
class TopListRow:
    rank: int
    page_id: int
    qitem: str | None
    page_title: str
    score: float
    features: tuple[tuple[str, int], ...]
    main_territory: str | None
    availability: str  # title in the target language or MISSING


@dataclass(frozen=True)
class TopList:
    origin: str
    target: str
    features: tuple[str, ...]
    rows: tuple[TopListRow, ...] = ()

    def __len__(self):
        return len(self.rows)


def _wiki_key(code: str) -> str:
    return code if code.endswith("wiki") else f"{code}wiki"


def _scores(records, spec: RankingSpec) -> list[float]:
    if spec.is_single:
        attr = FEATURES[spec.weights[0][0]]
        return [getattr(r, attr) for r in records]
    scores = [0.0] * len(records)
    for name, weight in spec.weights:
        values = [getattr(r, FEATURES[name]) for r in records]
        lo, hi = min(values, default=0), max(values, default=0)
        span = hi - lo
        for i, v in enumerate(values):
            scores[i] += weight * ((v - lo) / span if span else 0.0)
    return scores


def _qitem_order(record):
    if record.qitem:
        return (0, id_key(record.qitem), record.page_id)
    return (1, 0, record.page_id)


def generate_top_list(
    records,
    snapshot: WikiSnapshot,
    spec: RankingSpec,
    segment: SegmentFilter | None = None,
    target: str = "en",
    limit: int = DEFAULT_LIMIT,
) -> TopList:
    if limit < 0:
        raise ValidationError("limit must be non-negative")
    segment = segment or SegmentFilter()
    chosen = [r for r in records if r.ccc_binary == 1 and segment.accepts(r, snapshot)]
    scores = _scores(chosen, spec)
    sign = -1 if spec.descending else 1
    order = sorted(range(len(chosen)), key=lambda i: (sign * scores[i], _qitem_order(chosen[i])))
    key = _wiki_key(target)
    rows = []
    for rank, i in enumerate(order[:limit], 1):
        r = chosen[i]
        entity = snapshot.wikidata.get(r.qitem) if r.qitem else None
        title = entity.sitelinks.get(key) if entity is not None else None
        rows.append(
            TopListRow(
                rank=rank,
                page_id=r.page_id,
                qitem=r.qitem,
                page_title=r.title,
                score=scores[i],
                features=tuple((name, getattr(r, FEATURES[name])) for name in spec.features),
                main_territory=r.main_territory,
                availability=title if title else MISSING,
            )
        )
    return TopList(origin=snapshot.language, target=target, features=spec.features, rows=tuple(rows))


@dataclass
class CoverageMatrix:
    origins: list[str] = field(default_factory=list)
    targets: list[str] = field(default_factory=list)
    values: dict[tuple[str, str], float | None] = field(default_factory=dict)  # None: no data

    def get(self, origin: str, target: str) -> float | None:
        return self.values.get((origin, target))


def coverage_overview(lists, target: str | None = None) -> CoverageMatrix:
    """Share of each list's rows available in its target language."""
    m = CoverageMatrix()
    for tl in lists:
        if target is not None and tl.target != target:
            continue
        if tl.origin not in m.origins:
            m.origins.append(tl.origin)
        if tl.target not in m.targets:
            m.targets.append(tl.target)
        if tl.rows:
            m.values[(tl.origin, tl.target)] = sum(1 for r in tl.rows if r.availability != MISSING) / len(tl.rows)
        else:
            m.values[(tl.origin, tl.target)] = None
    m.origins.sort()
    m.targets.sort()
    return m


def _list_table(tl: TopList) -> tuple[list[str], list[list[str]]]:
    header = ["rank", "page_id", "qitem", "page_title", "score", *tl.features, "main_territory", "availability"]
    body = [
        [
            str(r.rank),
            str(r.page_id),
            r.qitem or "",
            r.page_title,
            repr(r.score),
            *(str(v) for _, v in r.features),
            r.main_territory or "",
            r.availability,
        ]
        for r in tl.rows
    ]
    return header, body


def _matrix_table(m: CoverageMatrix, blank: str) -> tuple[list[str], list[list[str]]]:
    header = ["origin", *m.targets]
    body = []
    for o in m.origins:
        cells = []
        for t in m.targets:
            v = m.get(o, t)
            cells.append(blank if v is None else f"{v:.6f}")
        body.append([o, *cells])
    return header, body


def _to_csv(header, body) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(body)
    return buf.getvalue()


def _to_html(header, body, caption: str) -> str:
    esc = html.escape
    lines = [
        "<!DOCTYPE html>",
        '<html><head><meta charset="utf-8"><title>' + esc(caption) + "</title></head><body>",
        "<table>",
        "<caption>" + esc(caption) + "</caption>",
        "<thead><tr>" + "".join(f"<th>{esc(h)}</th>" for h in header) + "</tr></thead>",
        "<tbody>",
    ]
    for row in body:
        lines.append("<tr>" + "".join(f"<td>{esc(c)}</td>" for c in row) + "</tr>")
    lines += ["</tbody>", "</table>", "</body></html>", ""]
    return "\n".join(lines)


def render_tables(obj, fmt: str, path) -> Path:
    if fmt not in ("csv", "html"):
        raise ValidationError(f"unsupported format {fmt!r}")
    if isinstance(obj, TopList):
        header, body = _list_table(obj)
        caption = f"Top CCC {obj.origin} -> {obj.target}"
    elif isinstance(obj, CoverageMatrix):
        header, body = _matrix_table(obj, "" if fmt == "csv" else NO_DATA)
        caption = "Top CCC coverage"
    else:
        raise ValidationError(f"cannot render {type(obj).__name__}")
    text = _to_csv(header, body) if fmt == "csv" else _to_html(header, body, caption)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from None
    return path


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_toplist_csv(path, origin: str, target: str) -> TopList:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        features = tuple(header[5:-2])
        rows = []
        for line in reader:
            rows.append(
                TopListRow(
                    rank=int(line[0]),
                    page_id=int(line[1]),
                    qitem=line[2] or None,
                    page_title=line[3],
                    score=_number(line[4]),
                    features=tuple(zip(features, (int(v) for v in line[5:-2]))),
                    main_territory=line[-2] or None,
                    availability=line[-1],
                )
            )
    return TopList(origin=origin, target=target, features=features, rows=tuple(rows))
