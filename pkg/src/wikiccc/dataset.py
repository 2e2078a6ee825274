"""Per-language CSV / SQLite output and summary statistics."""

from __future__ import annotations

import bz2
import csv
import io
import json
import os
import sqlite3
import statistics
import tempfile
from dataclasses import astuple, dataclass, fields
from pathlib import Path

from .errors import ValidationError
from .records import QualificationRecord

PERCENT_DECIMALS = 6


@dataclass(frozen=True)
class DatasetRow:
    qitem: str | None
    page_id: int
    page_title: str
    date_created: int
    geocoordinates: str | None
    iso3166: str | None
    iso31662: str | None
    ccc_binary: int
    main_territory: str | None
    num_retrieval_strategies: int
    ccc_geolocated: int | None
    country_wd: str | None
    location_wd: str | None
    language_strong_wd: str | None
    created_by_wd: str | None
    part_of_wd: str | None
    keyword_title: str | None
    category_crawling_territories: str | None
    category_crawling_level: int | None
    language_weak_wd: str | None
    affiliation_wd: str | None
    has_part_wd: str | None
    num_inlinks_from_CCC: int
    num_outlinks_to_CCC: int
    percent_inlinks_from_CCC: float
    percent_outlinks_to_CCC: float
    other_ccc_country_wd: str | None
    other_ccc_location_wd: str | None
    other_ccc_language_strong_wd: str | None
    other_ccc_created_by_wd: str | None
    other_ccc_part_of_wd: str | None
    other_ccc_language_weak_wd: str | None
    other_ccc_affiliation_wd: str | None
    other_ccc_has_part_wd: str | None
    num_inlinks_from_geolocated_abroad: int
    num_outlinks_to_geolocated_abroad: int
    percent_inlinks_from_geolocated_abroad: float
    percent_outlinks_to_geolocated_abroad: float
    num_inlinks: int
    num_outlinks: int
    num_bytes: int
    num_references: int
    num_edits: int
    num_editors: int
    num_discussions: int
    num_pageviews: int
    num_wdproperty: int
    num_interwiki: int
    featured_article: int


COLUMNS = tuple(f.name for f in fields(DatasetRow))
_KIND = {}
for _f in fields(DatasetRow):
    _t = str(_f.type)
    _KIND[_f.name] = "float" if _t.startswith("float") else "int" if _t.startswith("int") else "str"
_OPTIONAL = {f.name for f in fields(DatasetRow) if "None" in str(f.type)}
PERCENT_COLUMNS = tuple(c for c in COLUMNS if c.startswith("percent_"))


def _cell(values) -> str | None:
    return ";".join(values) if values else None


def to_row(record: QualificationRecord) -> DatasetRow:
    r = record
    if r.ccc_binary not in (0, 1):
        raise ValidationError(f"page {r.page_id} ({r.title}): ccc_binary not finalized")
    geo = None
    if r.geocoordinates is not None:
        geo = f"{r.geocoordinates[0]!r},{r.geocoordinates[1]!r}"
    return DatasetRow(
        qitem=r.qitem,
        page_id=r.page_id,
        page_title=r.title,
        date_created=r.date_created,
        geocoordinates=geo,
        iso3166=r.iso3166,
        iso31662=r.iso31662,
        ccc_binary=r.ccc_binary,
        main_territory=r.main_territory if r.ccc_binary == 1 else None,
        num_retrieval_strategies=r.num_retrieval_strategies,
        ccc_geolocated=r.ccc_geolocated,
        country_wd=_cell(r.country_wd),
        location_wd=_cell(r.location_wd),
        language_strong_wd=_cell(r.language_strong_wd),
        created_by_wd=_cell(r.created_by_wd),
        part_of_wd=_cell(r.part_of_wd),
        keyword_title=r.keyword_title,
        category_crawling_territories=_cell(r.category_crawling_territories),
        category_crawling_level=r.category_crawling_level,
        language_weak_wd=_cell(r.language_weak_wd),
        affiliation_wd=_cell(r.affiliation_wd),
        has_part_wd=_cell(r.has_part_wd),
        num_inlinks_from_CCC=r.num_inlinks_from_ccc,
        num_outlinks_to_CCC=r.num_outlinks_to_ccc,
        percent_inlinks_from_CCC=round(r.percent_inlinks_from_ccc, PERCENT_DECIMALS),
        percent_outlinks_to_CCC=round(r.percent_outlinks_to_ccc, PERCENT_DECIMALS),
        other_ccc_country_wd=_cell(r.other_ccc_country_wd),
        other_ccc_location_wd=_cell(r.other_ccc_location_wd),
        other_ccc_language_strong_wd=_cell(r.other_ccc_language_strong_wd),
        other_ccc_created_by_wd=_cell(r.other_ccc_created_by_wd),
        other_ccc_part_of_wd=_cell(r.other_ccc_part_of_wd),
        other_ccc_language_weak_wd=_cell(r.other_ccc_language_weak_wd),
        other_ccc_affiliation_wd=_cell(r.other_ccc_affiliation_wd),
        other_ccc_has_part_wd=_cell(r.other_ccc_has_part_wd),
        num_inlinks_from_geolocated_abroad=r.num_inlinks_from_geolocated_abroad,
        num_outlinks_to_geolocated_abroad=r.num_outlinks_to_geolocated_abroad,
        percent_inlinks_from_geolocated_abroad=round(r.percent_inlinks_from_geolocated_abroad, PERCENT_DECIMALS),
        percent_outlinks_to_geolocated_abroad=round(r.percent_outlinks_to_geolocated_abroad, PERCENT_DECIMALS),
        num_inlinks=r.num_inlinks,
        num_outlinks=r.num_outlinks,
        num_bytes=r.num_bytes,
        num_references=r.num_references,
        num_edits=r.num_edits,
        num_editors=r.num_editors,
        num_discussions=r.num_discussions,
        num_pageviews=r.num_pageviews,
        num_wdproperty=r.num_wdproperty,
        num_interwiki=r.num_interwiki,
        featured_article=r.featured_article,
    )


def check_row(row: DatasetRow) -> None:
    where = f"page {row.page_id} ({row.page_title})"
    if row.ccc_binary not in (0, 1):
        raise ValidationError(f"{where}: ccc_binary must be 0 or 1")
    if row.ccc_geolocated not in (1, -1, None):
        raise ValidationError(f"{where}: ccc_geolocated must be 1, -1 or empty")
    for col in PERCENT_COLUMNS:
        value = getattr(row, col)
        if not 0.0 <= value <= 1.0:
            raise ValidationError(f"{where}: {col}={value} outside [0, 1]")


def _format(name: str, value) -> str:
    if value is None:
        return ""
    if _KIND[name] == "float":
        return f"{value:.{PERCENT_DECIMALS}f}"
    return str(value)


def _parse(name: str, text: str):
    if text == "":
        if name in _OPTIONAL:
            return None
        if _KIND[name] == "str":
            return ""
        raise ValidationError(f"empty value in required column {name}")
    kind = _KIND[name]
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def _as_rows(records) -> list[DatasetRow]:
    rows = [r if isinstance(r, DatasetRow) else to_row(r) for r in records]
    for row in rows:
        check_row(row)
    return sorted(rows, key=lambda row: row.page_id)


def render_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in _as_rows(records):
        writer.writerow([_format(c, v) for c, v in zip(COLUMNS, astuple(row))])
    return buf.getvalue()


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_csv(records, path, compress: bool = False) -> int:
    """Write the dataset CSV (bzip2 when ``compress``); returns the row count."""
    path = Path(path)
    if compress and path.suffix != ".bz2":
        path = path.with_name(path.name + ".bz2")
    text = render_csv(records)
    data = text.encode("utf-8")
    if compress:
        data = bz2.compress(data, compresslevel=9)
    try:
        _atomic_write(path, data)
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from None
    return text.count("\n") - 1


def read_csv(path) -> list[DatasetRow]:
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix == ".bz2":
        raw = bz2.decompress(raw)
    reader = csv.reader(io.StringIO(raw.decode("utf-8"), newline=""))
    header = next(reader, None)
    if header is None or tuple(header) != COLUMNS:
        raise ValidationError(f"{path}: header does not match the dataset schema")
    return [DatasetRow(**{c: _parse(c, v) for c, v in zip(COLUMNS, line)}) for line in reader]


_SQL_TYPES = {"int": "INTEGER", "float": "REAL", "str": "TEXT"}


def emit_sqlite(records_by_language: dict, path) -> int:
    """One table per language, replacing any existing database atomically."""
    if not records_by_language:
        raise ValidationError("no languages to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    try:
        con = sqlite3.connect(tmp)
        try:
            for lang in sorted(records_by_language):
                cols = ", ".join(
                    f'"{c}" {_SQL_TYPES[_KIND[c]]}' + (" PRIMARY KEY" if c == "page_id" else "") for c in COLUMNS
                )
                con.execute(f'CREATE TABLE "{lang}" ({cols})')
                marks = ", ".join("?" for _ in COLUMNS)
                con.executemany(
                    f'INSERT INTO "{lang}" VALUES ({marks})',
                    [astuple(row) for row in _as_rows(records_by_language[lang])],
                )
            con.commit()
        finally:
            con.close()
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(records_by_language)


def summarize(records_by_language: dict) -> dict:
    """CCC share per language plus mean and median across non-empty languages."""
    per_language = {}
    for lang in sorted(records_by_language):
        rows = list(records_by_language[lang])
        n = len(rows)
        ccc = sum(1 for r in rows if r.ccc_binary == 1)
        per_language[lang] = {
            "articles": n,
            "ccc_articles": ccc,
            "ccc_share": ccc / n if n else 0.0,
            "zero_articles": n == 0,
        }
    shares = [v["ccc_share"] for v in per_language.values() if not v["zero_articles"]]
    return {
        "languages": per_language,
        "mean_share": statistics.fmean(shares) if shares else None,
        "median_share": statistics.median(shares) if shares else None,
    }


def write_summary(summary: dict, path) -> None:
    _atomic_write(Path(path), (json.dumps(summary, indent=2, sort_keys=True) + "\n").encode("utf-8"))
