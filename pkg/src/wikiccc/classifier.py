"""Training-set construction, forest training and final CCC decisions."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .forest import ForestConfig, RandomForest, fit_forest
from .records import QualificationRecord, QualLabel

FEATURE_NAMES = (
    "has_keyword_title",
    "category_level",
    "num_category_paths",
    "num_category_territories",
    "has_language_weak",
    "num_affiliation_matches",
    "num_has_part_matches",
    "inlinks_from_CCC",
    "percent_inlinks_from_CCC",
    "outlinks_to_CCC",
    "percent_outlinks_to_CCC",
    "num_other_ccc_potential_matches",
    "percent_inlinks_from_geolocated_abroad",
    "percent_outlinks_to_geolocated_abroad",
)
N_FEATURES = len(FEATURE_NAMES)

_OTHER_POTENTIAL = (
    "other_ccc_language_strong_wd",
    "other_ccc_created_by_wd",
    "other_ccc_part_of_wd",
    "other_ccc_language_weak_wd",
    "other_ccc_affiliation_wd",
    "other_ccc_has_part_wd",
)


def vectorize(record: QualificationRecord) -> np.ndarray:
    r = record
    return np.array(
        [
            1.0 if r.keyword_title else 0.0,
            float(r.category_crawling_level) if r.category_crawling_level is not None else -1.0,
            float(r.num_category_paths),
            float(len(r.category_crawling_territories)),
            1.0 if r.language_weak_wd else 0.0,
            float(len(r.affiliation_wd)),
            float(len(r.has_part_wd)),
            float(r.num_inlinks_from_ccc),
            r.percent_inlinks_from_ccc,
            float(r.num_outlinks_to_ccc),
            r.percent_outlinks_to_ccc,
            float(sum(len(getattr(r, name)) for name in _OTHER_POTENTIAL)),
            r.percent_inlinks_from_geolocated_abroad,
            r.percent_outlinks_to_geolocated_abroad,
        ],
        dtype=np.float64,
    )


def vectorize_all(records) -> np.ndarray:
    if not records:
        return np.zeros((0, N_FEATURES))
    return np.vstack([vectorize(r) for r in records])


@dataclass
class TrainingSet:
    X: np.ndarray
    y: np.ndarray
    page_ids: list[int]
    provenance: list[str]  # "reliable-positive" | "sampled-negative"

    def __len__(self):
        return len(self.page_ids)


def build_training_set(records, seed: int, neg_ratio: int = 5) -> TrainingSet:
    """All reliably-CCC records as positives plus ``neg_ratio`` times as many sampled negatives.

    Negatives are drawn uniformly from every other record, without
    replacement until the pool is used up and with replacement after that.
    """
    if neg_ratio < 1:
        raise ValidationError("neg_ratio must be positive")
    ordered = sorted(records, key=lambda r: r.page_id)
    positives = [r for r in ordered if r.class_label is QualLabel.RELIABLY_CCC]
    pool = [r for r in ordered if r.class_label is not QualLabel.RELIABLY_CCC]
    if not positives:
        raise ValidationError("empty positive class")
    if not pool:
        raise ValidationError("no records available for negative sampling")
    rng = np.random.default_rng(seed)
    want = neg_ratio * len(positives)
    if want <= len(pool):
        picks = rng.choice(len(pool), size=want, replace=False)
    else:
        picks = np.concatenate(
            [rng.permutation(len(pool)), rng.integers(0, len(pool), size=want - len(pool))]
        )
    negatives = [pool[int(i)] for i in picks]
    chosen = positives + negatives
    return TrainingSet(
        X=vectorize_all(chosen),
        y=np.array([1] * len(positives) + [0] * len(negatives), dtype=np.int64),
        page_ids=[r.page_id for r in chosen],
        provenance=["reliable-positive"] * len(positives) + ["sampled-negative"] * len(negatives),
    )


def train(ts: TrainingSet, seed: int, config: ForestConfig | None = None) -> RandomForest:
    return fit_forest(ts.X, ts.y, seed=seed, config=config, feature_names=FEATURE_NAMES)


def predict_proba(model: RandomForest, v) -> float:
    return float(model.predict_proba(np.asarray(v).reshape(1, -1))[0])


def classify(model: RandomForest, v) -> int:
    return 1 if predict_proba(model, v) >= 0.5 else 0


def finalize_ccc(records, model: RandomForest) -> list[QualificationRecord]:
    """Set ``ccc_binary``: reliable positives are in, potentials go to the model, the rest are out."""
    records = list(records)
    potentials = [i for i, r in enumerate(records) if r.class_label is QualLabel.POTENTIALLY_CCC]
    probs = model.predict_proba(vectorize_all([records[i] for i in potentials])) if potentials else []
    prob_of = dict(zip(potentials, (float(p) for p in probs)))
    out = []
    for i, r in enumerate(records):
        if r.class_label is QualLabel.RELIABLY_CCC:
            binary, prob = 1, None
        elif i in prob_of:
            prob = prob_of[i]
            binary = 1 if prob >= 0.5 else 0
        else:
            binary, prob = 0, None
        if r.has_reliable_non:
            binary = 0
        out.append(dataclasses.replace(r, ccc_binary=binary, ccc_probability=prob))
    return out


def save_model(model: RandomForest, path) -> None:
    Path(path).write_text(model.to_json() + "\n", encoding="utf-8")


def load_model(path) -> RandomForest:
    return RandomForest.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
