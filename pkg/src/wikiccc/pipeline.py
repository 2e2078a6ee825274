"""Pipeline stages with JSON Lines artifacts between them.

Each stage reads what earlier stages left in the output directory, so any
stage can be rerun on its own.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import attribution, classifier, dataset, evaluation, toplists
from .atlas import load_atlas, load_boundaries
from .errors import PipelineError, ValidationError
from .features import FeatureConfig, qualify_snapshot
from .forest import ForestConfig
from .properties import PropertyCatalog
from .records import read_records, write_records
from .snapshot import SNAPSHOT_FILES, load_snapshot

log = logging.getLogger(__name__)

STAGES = ("ingest", "qualify", "train", "classify", "attribute", "emit", "evaluate", "toplists")

INGEST_FILE = "ingest.json"
QUALIFIED_FILE = "qualified.jsonl"
TRAINING_FILE = "training_set.jsonl"
MODEL_FILE = "model.json"
CLASSIFIED_FILE = "classified.jsonl"
ATTRIBUTED_FILE = "attributed.jsonl"
SUMMARY_FILE = "summary.json"
SQLITE_FILE = "ccc.sqlite"
SAMPLE_FILE = "assessment_sample.csv"
EVALUATION_FILE = "evaluation.json"
TOPLIST_DIR = "toplists"

# which paths each stage needs, as config field names
_NEEDS = {
    "ingest": ("snapshot",),
    "qualify": ("snapshot", "atlas", "boundaries"),
    "train": (),
    "classify": (),
    "attribute": ("atlas",),
    "emit": (),
    "evaluate": (),
    "toplists": ("snapshot",),
}


class StageError(Exception):
    """Wraps a failure with the stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    snapshot: str | None = None
    atlas: str | None = None
    boundaries: str | None = None
    language: str | None = None
    output: str | None = None
    seed: int | None = None
    neg_ratio: int = 5
    estimators: int = 100
    crawl_depth: int = 15
    closure_rounds: int = 10
    workers: int = 1
    compress: bool = False
    properties: str | None = None
    labels: list[str] = field(default_factory=list)
    sample_seed: int = 0
    toplist_spec: str | None = None
    targets: list[str] = field(default_factory=lambda: ["en"])
    limit: int = toplists.DEFAULT_LIMIT
    reference_date: int | None = None

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        return cls().update(data)

    def update(self, values: dict) -> "PipelineConfig":
        known = {f.name for f in fields(self)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
        for key, value in values.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def validate(self, stages) -> None:
        for name in ("neg_ratio", "estimators", "crawl_depth", "closure_rounds", "workers", "limit"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValidationError(f"--{name.replace('_', '-')} must be a positive integer")
        if self.seed is not None and (not isinstance(self.seed, int) or self.seed < 0):
            raise ValidationError("--seed must be a non-negative integer")
        if not self.output:
            raise ValidationError("--output is required")
        if not self.language:
            raise ValidationError("--language is required")
        needed = set()
        for stage in stages:
            needed.update(_NEEDS[stage])
        for name in sorted(needed):
            value = getattr(self, name)
            flag = f"--{name}"
            if not value:
                raise ValidationError(f"{flag} is required")
            path = Path(value)
            if name == "snapshot":
                if not path.is_dir():
                    raise ValidationError(f"{flag}: no such directory {value}")
            elif not path.is_file():
                raise ValidationError(f"{flag}: no such file {value}")
        if self.properties and not Path(self.properties).is_file():
            raise ValidationError(f"--properties: no such file {self.properties}")
        if "evaluate" in stages:
            for p in self.labels:
                if not Path(p).is_file():
                    raise ValidationError(f"--labels: no such file {p}")
        if "toplists" in stages and self.toplist_spec and not Path(self.toplist_spec).is_file():
            raise ValidationError(f"--toplist-spec: no such file {self.toplist_spec}")
        if "train" in stages and self.seed is None:
            raise ValidationError("--seed is required for train (flag or config file)")


class Pipeline:
    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = Path(config.output)

    def _path(self, name: str) -> Path:
        return self.out / name

    def _require(self, name: str, what: str) -> Path:
        path = self._path(name)
        if not path.is_file():
            raise ValidationError(f"missing {what} output ({path}); run the earlier stage first")
        return path

    def _atlas(self):
        return load_atlas(self.config.atlas)

    def _snapshot(self):
        return load_snapshot(self.config.snapshot, self.config.language)

    def _write_json(self, name: str, data) -> None:
        self._path(name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    # stages

    def ingest(self) -> None:
        snap = self._snapshot()
        digest = hashlib.sha256()
        for name in SNAPSHOT_FILES:
            digest.update((Path(self.config.snapshot) / name).read_bytes())
        self._write_json(
            INGEST_FILE,
            {
                "language": snap.language,
                "pages": len(snap.pages),
                "links": sum(len(v) for v in snap.links.forward.values()),
                "categories": len(snap.categories.titles),
                "geotags": len(snap.geotags),
                "entities": len(snap.wikidata),
                "sha256": digest.hexdigest(),
            },
        )
        log.info("ingested %d pages", len(snap.pages))

    def qualify(self) -> None:
        atlas = self._atlas()
        if self.config.language not in atlas.by_language:
            raise ValidationError(f"language {self.config.language!r} not in atlas")
        boundaries = load_boundaries(self.config.boundaries, atlas)
        catalog = PropertyCatalog.load(self.config.properties) if self.config.properties else None
        fc = FeatureConfig(crawl_depth=self.config.crawl_depth, closure_rounds=self.config.closure_rounds)
        records = qualify_snapshot(self._snapshot(), atlas, boundaries, catalog, fc)
        write_records(records, self._path(QUALIFIED_FILE))

    def train(self) -> None:
        records = read_records(self._require(QUALIFIED_FILE, "qualification"))
        ts = classifier.build_training_set(records, seed=self.config.seed, neg_ratio=self.config.neg_ratio)
        with self._path(TRAINING_FILE).open("w", encoding="utf-8", newline="\n") as fh:
            for pid, label, prov, row in zip(ts.page_ids, ts.y.tolist(), ts.provenance, ts.X.tolist()):
                fh.write(json.dumps({"page_id": pid, "label": label, "provenance": prov, "vector": row}) + "\n")
        fcfg = ForestConfig(n_estimators=self.config.estimators, workers=self.config.workers)
        model = classifier.train(ts, seed=self.config.seed, config=fcfg)
        classifier.save_model(model, self._path(MODEL_FILE))
        log.info("trained %d trees, oob accuracy %s", len(model.trees), model.oob_accuracy)

    def classify(self) -> None:
        records = read_records(self._require(QUALIFIED_FILE, "qualification"))
        model = classifier.load_model(self._require(MODEL_FILE, "model"))
        write_records(classifier.finalize_ccc(records, model), self._path(CLASSIFIED_FILE))

    def attribute(self) -> None:
        records = read_records(self._require(CLASSIFIED_FILE, "classification"))
        atlas = self._atlas()
        result = attribution.attribute_main_territory(records, atlas, self.config.language)
        write_records(attribution.apply_attribution(records, result), self._path(ATTRIBUTED_FILE))

    def _final_records(self):
        return read_records(self._require(ATTRIBUTED_FILE, "attribution"))

    def emit(self) -> None:
        records = self._final_records()
        lang = self.config.language
        dataset.emit_csv(records, self._path(f"{lang}_ccc.csv"), compress=self.config.compress)
        dataset.emit_sqlite({lang: records}, self._path(SQLITE_FILE))
        dataset.write_summary(dataset.summarize({lang: records}), self._path(SUMMARY_FILE))

    def evaluate(self) -> None:
        records = self._final_records()
        if not self.config.labels:
            ids = evaluation.sample_for_assessment(records, seed=self.config.sample_seed)
            by_id = {r.page_id: r for r in records}
            with self._path(SAMPLE_FILE).open("w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["page_id", "title", "predicted"])
                w.writerows([p, by_id[p].title, by_id[p].ccc_binary] for p in ids)
            log.info("wrote %d articles for manual assessment", len(ids))
            return
        raters = [evaluation.read_labels(p) for p in self.config.labels]
        ids = list(raters[0].page_ids)
        predicted = evaluation.predicted_labels(records, ids)
        evaluation.write_report(evaluation.evaluation_report(predicted, raters), self._path(EVALUATION_FILE))

    def toplists(self) -> None:
        records = self._final_records()
        snap = self._snapshot()
        if self.config.toplist_spec:
            spec_data = json.loads(Path(self.config.toplist_spec).read_text(encoding="utf-8"))
            named = {}
            for name, entry in sorted(spec_data.items()):
                named[name] = (
                    toplists.RankingSpec.from_dict(entry.get("ranking", {})),
                    toplists.SegmentFilter.from_dict(entry.get("filter", {})),
                )
        else:
            named = dict(toplists.PRESETS)
            if records:
                start = min(r.date_created for r in records)
                named["first_three_years"] = (toplists.RankingSpec.single("edits"), toplists.first_years(start, 3))
            if self.config.reference_date is not None:
                ref = self.config.reference_date
                named["last_year"] = (toplists.RankingSpec.single("edits"), toplists.last_year(ref))
        out = self._path(TOPLIST_DIR)
        out.mkdir(parents=True, exist_ok=True)
        lists = []
        for target in self.config.targets:
            for name, (spec, seg) in sorted(named.items()):
                tl = toplists.generate_top_list(records, snap, spec, seg, target=target, limit=self.config.limit)
                lists.append(tl)
                stem = f"{name}_{snap.language}_{target}"
                toplists.render_tables(tl, "csv", out / f"{stem}.csv")
                toplists.render_tables(tl, "html", out / f"{stem}.html")
        matrix = toplists.coverage_overview([tl for tl in lists])
        toplists.render_tables(matrix, "csv", out / "coverage.csv")
        toplists.render_tables(matrix, "html", out / "coverage.html")

    def run(self, stage: str) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        try:
            getattr(self, stage)()
        except (ValidationError, PipelineError) as exc:
            raise StageError(stage, exc) from exc
        except (OSError, ValueError, KeyError, RuntimeError) as exc:
            raise StageError(stage, PipelineError(str(exc))) from exc

    def run_all(self) -> None:
        for stage in STAGES:
            if stage == "evaluate" and not self.config.labels:
                log.info("skipping evaluate: no rater labels configured")
                continue
            self.run(stage)

