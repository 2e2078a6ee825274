"""Main territory attribution for articles in the cultural context."""

from __future__ import annotations

import dataclasses
from collections import Counter
from dataclasses import dataclass, field

from .atlas import LanguageAtlas
from .ids import id_key
from .properties import evidence_territory, evidence_value
from .records import UNASSIGNED, QualificationRecord

MAX_PROPAGATION_ROUNDS = 10

_REFERENCE_COLUMNS = ("part_of_wd", "has_part_wd", "created_by_wd", "affiliation_wd")


@dataclass
class AttributionResult:
    main_territory: dict[int, str] = field(default_factory=dict)
    rule: dict[int, str] = field(default_factory=dict)  # geo | keyword | majority | propagated | unassigned


def territory_counts(record: QualificationRecord, home: set[str]) -> Counter:
    """Occurrences of home territories across crawl, country and location evidence."""
    counts = Counter(q for q in record.category_crawling_territories if q in home)
    for item in record.country_wd + record.location_wd:
        t = evidence_territory(item)
        if t in home:
            counts[t] += 1
    return counts


def strict_winner(counts: Counter) -> str | None:
    if not counts:
        return None
    ranked = counts.most_common()
    top = ranked[0][1]
    if top <= 0 or sum(1 for _, c in ranked if c == top) > 1:
        return None
    return ranked[0][0]


def _references(record: QualificationRecord) -> list[str]:
    return [evidence_value(item) for col in _REFERENCE_COLUMNS for item in getattr(record, col)]


def attribute_main_territory(records, atlas: LanguageAtlas, language: str) -> AttributionResult:
    home = {t.qitem for t in atlas.by_language[language]}
    ccc = sorted((r for r in records if r.ccc_binary == 1), key=lambda r: r.page_id)
    result = AttributionResult()
    pending: dict[int, tuple[Counter, list[str]]] = {}

    for r in ccc:
        if r.ccc_geolocated == 1 and r.geolocated_territory in home:
            result.main_territory[r.page_id] = r.geolocated_territory
            result.rule[r.page_id] = "geo"
            continue
        if r.keyword_title in home and not r.keyword_is_language:
            result.main_territory[r.page_id] = r.keyword_title
            result.rule[r.page_id] = "keyword"
            continue
        counts = territory_counts(r, home)
        winner = strict_winner(counts)
        if winner is not None:
            result.main_territory[r.page_id] = winner
            result.rule[r.page_id] = "majority"
            continue
        pending[r.page_id] = (counts, _references(r))

    qitem_of = {r.page_id: r.qitem for r in ccc}
    for _ in range(MAX_PROPAGATION_ROUNDS):
        # every article in a round sees the assignments frozen at round start
        frozen = {qitem_of[p]: t for p, t in result.main_territory.items() if qitem_of[p]}
        newly = {}
        for page_id, (counts, refs) in pending.items():
            inherited = Counter(frozen[q] for q in refs if q in frozen and frozen[q] in home)
            if not inherited:
                continue
            winner = strict_winner(counts + inherited)
            if winner is not None:
                newly[page_id] = winner
        if not newly:
            break
        for page_id, territory in newly.items():
            result.main_territory[page_id] = territory
            result.rule[page_id] = "propagated"
            del pending[page_id]

    for page_id in pending:
        result.main_territory[page_id] = UNASSIGNED
        result.rule[page_id] = "unassigned"
    result.main_territory = dict(sorted(result.main_territory.items()))
    result.rule = dict(sorted(result.rule.items()))
    return result


def apply_attribution(records, result: AttributionResult) -> list[QualificationRecord]:
    return [
        dataclasses.replace(
            r,
            main_territory=result.main_territory.get(r.page_id),
            attribution_rule=result.rule.get(r.page_id),
        )
        for r in records
    ]


def territory_distribution(result: AttributionResult) -> dict[str, float]:
    """Share of CCC articles per main territory, Unassigned included."""
    total = len(result.main_territory)
    if total == 0:
        return {}
    counts = Counter(result.main_territory.values())

    def key(item):
        territory, count = item
        return (-count, territory == UNASSIGNED, id_key(territory) if territory != UNASSIGNED else 0)

    return {t: c / total for t, c in sorted(counts.items(), key=key)}
