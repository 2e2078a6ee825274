"""Qualification of every article of a snapshot against a language's context."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from .atlas import BoundarySet, LanguageAtlas, reverse_geocode_many
from .crawl import DEFAULT_MAX_DEPTH, CrawlResult, category_crawl
from .keywords import KeywordMatch, Lexicon, build_lexicon, match_title_keywords
from .properties import (
    GROUPS,
    PropertyCatalog,
    PropertyContext,
    PropertyEvidence,
    build_location_closure,
    qualify_by_properties,
)
from .records import QualificationRecord, QualLabel
from .snapshot import PageRecord, WikiSnapshot, inlinks, outlinks

log = logging.getLogger(__name__)

PHASE1_GROUPS = ("country", "location", "language_strong", "language_weak")
PHASE2_GROUPS = ("created_by", "part_of")
LATE_GROUPS = ("affiliation", "has_part")
RELIABLE_GROUPS = ("country", "location", "language_strong", "created_by", "part_of")
POTENTIAL_GROUPS = ("language_weak", "affiliation", "has_part")


@dataclass(frozen=True)
class FeatureConfig:
    crawl_depth: int = DEFAULT_MAX_DEPTH
    closure_rounds: int = 10
    # passes of the created_by / part_of rules over the growing reliable set
    reliable_passes: int = 1


class GeoVerdict(NamedTuple):
    territory: str
    home: bool


class LinkStats(NamedTuple):
    inlinks_from_ccc: int
    outlinks_to_ccc: int
    percent_inlinks_from_ccc: float
    percent_outlinks_to_ccc: float
    inlinks_from_geolocated_abroad: int
    outlinks_to_geolocated_abroad: int
    percent_inlinks_from_geolocated_abroad: float
    percent_outlinks_to_geolocated_abroad: float


@dataclass(frozen=True)
class LanguageContext:
    language: str
    lexicon: Lexicon
    properties: PropertyContext
    # territories of other languages whose evidence counts against this one
    abroad: frozenset[str]


def exclusive_abroad(atlas: LanguageAtlas, language: str) -> frozenset[str]:
    """Other languages' territories, minus countries that contain a home region.

    A country such as CH holds CH-TI, which belongs to Italian; pointing at CH
    is therefore not evidence against Italian.
    """
    home = {t.qitem for t in atlas.by_language[language]}
    home_countries_of_regions = {t.iso3166 for t in atlas.by_language[language] if t.level == 2}
    out = set()
    for qitem in set(atlas.by_qitem) - home:
        t = atlas.territory(qitem)
        if t.level == 1 and t.iso3166 in home_countries_of_regions:
            continue
        out.add(qitem)
    return frozenset(out)


def build_context(
    snapshot: WikiSnapshot, atlas: LanguageAtlas, catalog: PropertyCatalog, config: FeatureConfig
) -> LanguageContext:
    language = snapshot.language
    home = frozenset(t.qitem for t in atlas.by_language[language])
    abroad = exclusive_abroad(atlas, language)
    closure = build_location_closure(snapshot.wikidata, home, catalog, config.closure_rounds)
    abroad_closure = build_location_closure(
        snapshot.wikidata, abroad, catalog, config.closure_rounds, exclude=frozenset(closure.depth)
    )
    own = atlas.language(language).qitems
    others = set()
    for code in atlas.by_language:
        if code != language:
            others |= atlas.language(code).qitems
    return LanguageContext(
        language=language,
        lexicon=build_lexicon(atlas, language),
        properties=PropertyContext(
            home_territories=home,
            abroad_territories=abroad,
            closure=closure,
            abroad_closure=abroad_closure,
            language_qitems=own,
            other_language_qitems=frozenset(others - own),
        ),
        abroad=abroad,
    )


def _classify_territory(qitem: str | None, ctx: LanguageContext) -> GeoVerdict | None:
    if qitem is None:
        return None
    if qitem in ctx.properties.home_territories:
        return GeoVerdict(qitem, True)
    if qitem in ctx.abroad:
        return GeoVerdict(qitem, False)
    return None


def qualify_geolocated(
    snapshot: WikiSnapshot, atlas: LanguageAtlas, boundaries: BoundarySet, page_id: int
) -> GeoVerdict | None:
    point = snapshot.geotags.get(page_id)
    if point is None:
        return None
    home = {t.qitem for t in atlas.by_language[snapshot.language]}
    abroad = exclusive_abroad(atlas, snapshot.language)
    qitem = reverse_geocode_many([point], boundaries)[0]
    if qitem in home:
        return GeoVerdict(qitem, True)
    if qitem in abroad:
        return GeoVerdict(qitem, False)
    return None


def _ratio(count: int, total: int) -> float:
    return count / total if total > 0 else 0.0


def link_qualification(snapshot: WikiSnapshot, page_id: int, reliable_set, abroad_geo_set) -> LinkStats:
    ins = inlinks(snapshot, page_id)
    outs = outlinks(snapshot, page_id)
    in_ccc = len(ins & reliable_set)
    out_ccc = len(outs & reliable_set)
    in_abroad = len(ins & abroad_geo_set)
    out_abroad = len(outs & abroad_geo_set)
    return LinkStats(
        in_ccc,
        out_ccc,
        _ratio(in_ccc, len(ins)),
        _ratio(out_ccc, len(outs)),
        in_abroad,
        out_abroad,
        _ratio(in_abroad, len(ins)),
        _ratio(out_abroad, len(outs)),
    )


@dataclass
class PageEvidence:
    geo: GeoVerdict | None = None
    keyword: KeywordMatch | None = None
    crawl: CrawlResult | None = None
    props: PropertyEvidence = field(default_factory=PropertyEvidence)
    links: LinkStats = LinkStats(0, 0, 0.0, 0.0, 0, 0, 0.0, 0.0)

    @property
    def reliable_ccc(self) -> bool:
        return bool(
            (self.geo is not None and self.geo.home)
            or self.keyword is not None
            or any(self.props.home.get(g) for g in RELIABLE_GROUPS)
        )

    @property
    def reliable_non(self) -> bool:
        return bool(
            (self.geo is not None and not self.geo.home)
            or self.props.other.get("country")
            or self.props.other.get("location")
        )

    @property
    def potential_ccc(self) -> bool:
        return bool(
            self.crawl is not None
            or any(self.props.home.get(g) for g in POTENTIAL_GROUPS)
            or self.links.inlinks_from_ccc > 0
            or self.links.outlinks_to_ccc > 0
        )

    @property
    def potential_non(self) -> bool:
        return bool(
            any(self.props.other.get(g) for g in GROUPS if g not in ("country", "location"))
            or self.links.inlinks_from_geolocated_abroad > 0
            or self.links.outlinks_to_geolocated_abroad > 0
        )

    def strategy_count(self) -> int:
        families = [
            self.geo is not None and self.geo.home,
            self.keyword is not None,
            self.crawl is not None,
            *(bool(self.props.home.get(g)) for g in GROUPS),
            self.links.inlinks_from_ccc > 0,
            self.links.outlinks_to_ccc > 0,
        ]
        return sum(bool(f) for f in families)

    def label(self) -> QualLabel:
        if self.reliable_ccc and self.reliable_non:
            return QualLabel.RELIABLY_NON_CCC
        if self.reliable_ccc:
            return QualLabel.RELIABLY_CCC
        if self.reliable_non:
            return QualLabel.RELIABLY_NON_CCC
        if self.potential_ccc:
            return QualLabel.POTENTIALLY_CCC
        if self.potential_non:
            return QualLabel.POTENTIALLY_NON_CCC
        return QualLabel.UNQUALIFIED


def assemble(
    evidence: PageEvidence,
    page: PageRecord,
    snapshot: WikiSnapshot,
    atlas: LanguageAtlas | None = None,
) -> QualificationRecord:
    """Fold one page's evidence into its qualification record."""
    geo = evidence.geo
    iso3166 = iso31662 = None
    if geo is not None and atlas is not None:
        t = atlas.territory(geo.territory, snapshot.language)
        if t is not None:
            iso3166, iso31662 = t.iso3166, t.iso31662
    entity = snapshot.wikidata.get(page.qitem) if page.qitem else None
    crawl = evidence.crawl
    m = page.metrics
    kwargs = {f"{g}_wd": evidence.props.home.get(g, ()) for g in GROUPS}
    kwargs.update({f"other_ccc_{g}_wd": evidence.props.other.get(g, ()) for g in GROUPS})
    links = evidence.links
    return QualificationRecord(
        page_id=page.page_id,
        title=page.title,
        qitem=page.qitem,
        date_created=page.date_created,
        geocoordinates=snapshot.geotags.get(page.page_id),
        iso3166=iso3166,
        iso31662=iso31662,
        ccc_geolocated=None if geo is None else (1 if geo.home else -1),
        geolocated_territory=None if geo is None else geo.territory,
        keyword_title=evidence.keyword.qitem if evidence.keyword else None,
        keyword=evidence.keyword.keyword if evidence.keyword else None,
        keyword_is_language=bool(evidence.keyword and evidence.keyword.is_language_name),
        category_crawling_territories=crawl.territories if crawl else (),
        category_crawling_level=crawl.level if crawl else None,
        num_category_paths=crawl.num_paths if crawl else 0,
        num_inlinks_from_ccc=links.inlinks_from_ccc,
        num_outlinks_to_ccc=links.outlinks_to_ccc,
        percent_inlinks_from_ccc=links.percent_inlinks_from_ccc,
        percent_outlinks_to_ccc=links.percent_outlinks_to_ccc,
        num_inlinks_from_geolocated_abroad=links.inlinks_from_geolocated_abroad,
        num_outlinks_to_geolocated_abroad=links.outlinks_to_geolocated_abroad,
        percent_inlinks_from_geolocated_abroad=links.percent_inlinks_from_geolocated_abroad,
        percent_outlinks_to_geolocated_abroad=links.percent_outlinks_to_geolocated_abroad,
        num_inlinks=len(snapshot.links.reverse.get(page.page_id, ())),
        num_outlinks=len(snapshot.links.forward.get(page.page_id, ())),
        num_bytes=m.num_bytes,
        num_references=m.num_references,
        num_edits=m.num_edits,
        num_editors=m.num_editors,
        num_discussions=m.num_discussions,
        num_pageviews=m.num_pageviews,
        num_wdproperty=len(entity.claims) if entity else 0,
        num_interwiki=len(entity.sitelinks) if entity else 0,
        featured_article=m.featured_article,
        num_retrieval_strategies=evidence.strategy_count(),
        class_label=evidence.label(),
        conflict=evidence.reliable_ccc and evidence.reliable_non,
        **kwargs,
    )


def qualify_snapshot(
    snapshot: WikiSnapshot,
    atlas: LanguageAtlas,
    boundaries: BoundarySet,
    catalog: PropertyCatalog | None = None,
    config: FeatureConfig | None = None,
) -> list[QualificationRecord]:
    """Compute every feature for every article and return records sorted by page_id."""
    catalog = catalog or PropertyCatalog.default()
    config = config or FeatureConfig()
    ctx = build_context(snapshot, atlas, catalog, config)
    page_ids = sorted(snapshot.pages)
    evidence = {pid: PageEvidence() for pid in page_ids}

    geotagged = [pid for pid in page_ids if pid in snapshot.geotags]
    resolved = reverse_geocode_many([snapshot.geotags[pid] for pid in geotagged], boundaries)
    for pid, qitem in zip(geotagged, resolved):
        evidence[pid].geo = _classify_territory(qitem, ctx)

    for pid in page_ids:
        evidence[pid].keyword = match_title_keywords(snapshot.pages[pid].title, ctx.lexicon)

    for pid, result in category_crawl(snapshot, ctx.lexicon, config.crawl_depth).items():
        evidence[pid].crawl = result

    def claims_of(pid):
        q = snapshot.pages[pid].qitem
        entity = snapshot.wikidata.get(q) if q else None
        return entity.claims if entity else {}

    for pid in page_ids:
        evidence[pid].props.merge(
            qualify_by_properties(
                claims_of(pid), catalog, ctx.properties, groups=PHASE1_GROUPS, self_qitem=snapshot.pages[pid].qitem
            )
        )

    def qitems(pids):
        return frozenset(snapshot.pages[p].qitem for p in pids if snapshot.pages[p].qitem)

    # Reliable sets never contain vetoed articles.
    other_reliable = qitems(p for p in page_ids if evidence[p].reliable_non)
    reliable_pages = {p for p in page_ids if evidence[p].reliable_ccc and not evidence[p].reliable_non}
    for _ in range(config.reliable_passes):
        sealed = qitems(reliable_pages)
        for pid in page_ids:
            evidence[pid].props.merge(
                qualify_by_properties(
                    claims_of(pid),
                    catalog,
                    ctx.properties,
                    reliable=sealed,
                    other_reliable=other_reliable,
                    groups=PHASE2_GROUPS,
                    self_qitem=snapshot.pages[pid].qitem,
                )
            )
        grown = {p for p in page_ids if evidence[p].reliable_ccc and not evidence[p].reliable_non}
        if grown == reliable_pages:
            break
        reliable_pages = grown

    sealed = qitems(reliable_pages)
    for pid in page_ids:
        evidence[pid].props.merge(
            qualify_by_properties(
                claims_of(pid),
                catalog,
                ctx.properties,
                reliable=sealed,
                other_reliable=other_reliable,
                groups=LATE_GROUPS,
                self_qitem=snapshot.pages[pid].qitem,
            )
        )

    reliable_set = frozenset(reliable_pages)
    abroad_geo = frozenset(p for p in page_ids if evidence[p].geo is not None and not evidence[p].geo.home)
    for pid in page_ids:
        evidence[pid].links = link_qualification(snapshot, pid, reliable_set, abroad_geo)

    records = [assemble(evidence[pid], snapshot.pages[pid], snapshot, atlas) for pid in page_ids]
    log.info(
        "qualified %d articles: %d reliable, %d vetoed",
        len(records),
        len(reliable_set),
        sum(r.conflict for r in records),
    )
    return records
