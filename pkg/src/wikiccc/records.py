"""Per-article qualification records and their JSON Lines persistence."""

from __future__ import annotations

import dataclasses
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


class QualLabel(str, enum.Enum):
    RELIABLY_CCC = "ReliablyCCC"
    POTENTIALLY_CCC = "PotentiallyCCC"
    RELIABLY_NON_CCC = "ReliablyNonCCC"
    POTENTIALLY_NON_CCC = "PotentiallyNonCCC"
    UNQUALIFIED = "Unqualified"


UNASSIGNED = "Unassigned"

HOME_GROUPS = (
    "country_wd",
    "location_wd",
    "language_strong_wd",
    "created_by_wd",
    "part_of_wd",
    "language_weak_wd",
    "affiliation_wd",
    "has_part_wd",
)
OTHER_GROUPS = tuple(f"other_ccc_{g}" for g in HOME_GROUPS)


@dataclass(frozen=True)
class QualificationRecord:
    page_id: int
    title: str
    qitem: str | None = None
    date_created: int = 0
    geocoordinates: tuple[float, float] | None = None
    iso3166: str | None = None
    iso31662: str | None = None

    # 1 home, -1 abroad, None not geolocated in any mapped territory
    ccc_geolocated: int | None = None
    geolocated_territory: str | None = None
    keyword_title: str | None = None
    keyword: str | None = None
    keyword_is_language: bool = False
    category_crawling_territories: tuple[str, ...] = ()
    category_crawling_level: int | None = None
    num_category_paths: int = 0

    country_wd: tuple[str, ...] = ()
    location_wd: tuple[str, ...] = ()
    language_strong_wd: tuple[str, ...] = ()
    created_by_wd: tuple[str, ...] = ()
    part_of_wd: tuple[str, ...] = ()
    language_weak_wd: tuple[str, ...] = ()
    affiliation_wd: tuple[str, ...] = ()
    has_part_wd: tuple[str, ...] = ()
    other_ccc_country_wd: tuple[str, ...] = ()
    other_ccc_location_wd: tuple[str, ...] = ()
    other_ccc_language_strong_wd: tuple[str, ...] = ()
    other_ccc_created_by_wd: tuple[str, ...] = ()
    other_ccc_part_of_wd: tuple[str, ...] = ()
    other_ccc_language_weak_wd: tuple[str, ...] = ()
    other_ccc_affiliation_wd: tuple[str, ...] = ()
    other_ccc_has_part_wd: tuple[str, ...] = ()

    num_inlinks_from_ccc: int = 0
    num_outlinks_to_ccc: int = 0
    percent_inlinks_from_ccc: float = 0.0
    percent_outlinks_to_ccc: float = 0.0
    num_inlinks_from_geolocated_abroad: int = 0
    num_outlinks_to_geolocated_abroad: int = 0
    percent_inlinks_from_geolocated_abroad: float = 0.0
    percent_outlinks_to_geolocated_abroad: float = 0.0

    num_inlinks: int = 0
    num_outlinks: int = 0
    num_bytes: int = 0
    num_references: int = 0
    num_edits: int = 0
    num_editors: int = 0
    num_discussions: int = 0
    num_pageviews: int = 0
    num_wdproperty: int = 0
    num_interwiki: int = 0
    featured_article: int = 0

    num_retrieval_strategies: int = 0
    class_label: QualLabel = QualLabel.UNQUALIFIED
    # reliable evidence for both this and another language's context
    conflict: bool = False

    ccc_binary: int | None = None
    ccc_probability: float | None = None
    main_territory: str | None = None
    attribution_rule: str | None = None

    @property
    def has_reliable_non(self) -> bool:
        return bool(self.ccc_geolocated == -1 or self.other_ccc_country_wd or self.other_ccc_location_wd)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["class_label"] = self.class_label.value
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "QualificationRecord":
        kwargs = dict(data)
        for f in dataclasses.fields(cls):
            if f.name not in kwargs:
                continue
            value = kwargs[f.name]
            if isinstance(value, list):
                kwargs[f.name] = tuple(value)
        kwargs["class_label"] = QualLabel(kwargs.get("class_label", QualLabel.UNQUALIFIED.value))
        return cls(**kwargs)


def write_records(records: Iterable[QualificationRecord], path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_records(path) -> list[QualificationRecord]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(QualificationRecord.from_dict(json.loads(line)))
    return out
