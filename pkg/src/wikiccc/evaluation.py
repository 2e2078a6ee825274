"""Assessment sampling, inter-rater agreement and confusion metrics."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class LabelVector:
    items: tuple[tuple[int, int], ...]  # (page_id, label)
    rater: str = ""

    def __post_init__(self):
        ids = [p for p, _ in self.items]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"rater {self.rater!r}: duplicate page_id")
        for p, label in self.items:
            if label not in (0, 1):
                raise ValidationError(f"rater {self.rater!r}: label for page {p} must be 0 or 1")

    @classmethod
    def from_labels(cls, page_ids, labels, rater: str = "") -> "LabelVector":
        page_ids, labels = list(page_ids), list(labels)
        if len(page_ids) != len(labels):
            raise ValidationError("page_ids and labels differ in length")
        return cls(tuple((int(p), int(l)) for p, l in zip(page_ids, labels)), rater)

    @property
    def page_ids(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.items)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(l for _, l in self.items)

    def __len__(self):
        return len(self.items)


def read_labels(path, rater: str | None = None) -> LabelVector:
    """Human labels from a ``page_id,label`` CSV (header optional)."""
    path = Path(path)
    items = []
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or (lineno == 1 and row[0].strip() == "page_id"):
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected page_id,label")
            try:
                items.append((int(row[0]), int(row[1])))
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-integer value") from None
    return LabelVector(tuple(items), rater if rater is not None else path.stem)


def _check_comparable(a: LabelVector, b: LabelVector) -> None:
    if a.page_ids != b.page_ids:
        raise ValidationError(f"label vectors {a.rater!r} and {b.rater!r} cover different page_id sequences")


@dataclass(frozen=True)
class AgreementReport:
    p_o: float
    p_e: float
    kappa: float


def cohens_kappa(a: LabelVector, b: LabelVector) -> AgreementReport:
    _check_comparable(a, b)
    n = len(a)
    if n == 0:
        raise ValidationError("cannot compute agreement on empty label vectors")
    la, lb = np.array(a.labels), np.array(b.labels)
    p_o = float(np.count_nonzero(la == lb)) / n
    a1, b1 = int(la.sum()), int(lb.sum())
    # marginal products computed on integers to keep symmetry exact
    p_e = (a1 * b1 + (n - a1) * (n - b1)) / (n * n)
    if p_e == 1.0:
        kappa = 1.0 if p_o == 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementReport(p_o=p_o, p_e=p_e, kappa=kappa)


@dataclass(frozen=True)
class ConfusionReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    fp_pct: float
    fn_pct: float
    table2_score: float

    def to_dict(self) -> dict:
        return asdict(self)


def confusion_metrics(predicted: LabelVector, truth: LabelVector) -> ConfusionReport:
    """2x2 counts and derived rates.

    ``fp_pct`` is over the predicted-positive pool and ``fn_pct`` over the
    predicted-negative pool, matching a balanced assessment sample.
    ``table2_score`` is precision.
    """
    _check_comparable(predicted, truth)
    tp = fp = fn = tn = 0
    for p, t in zip(predicted.labels, truth.labels):
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
        else:
            tn += 1
    pos, neg = tp + fp, fn + tn
    precision = tp / pos if pos else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 1.0
    return ConfusionReport(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=f1,
        fp_pct=fp / pos if pos else 0.0,
        fn_pct=fn / neg if neg else 0.0,
        table2_score=precision,
    )


def sample_for_assessment(records, n_pos: int = 100, n_neg: int = 100, seed: int = 0) -> list[int]:
    """Seeded sample of classified-positive then classified-negative page ids."""
    ordered = sorted(records, key=lambda r: r.page_id)
    pos = [r.page_id for r in ordered if r.ccc_binary == 1]
    neg = [r.page_id for r in ordered if r.ccc_binary == 0]
    if len(pos) < n_pos or len(neg) < n_neg:
        raise ValidationError(
            f"insufficient pool: need {n_pos} positive / {n_neg} negative, "
            f"have {len(pos)} / {len(neg)}"
        )
    rng = np.random.default_rng(seed)
    pick_pos = rng.choice(len(pos), size=n_pos, replace=False)
    pick_neg = rng.choice(len(neg), size=n_neg, replace=False)
    return [pos[int(i)] for i in pick_pos] + [neg[int(i)] for i in pick_neg]


def predicted_labels(records, page_ids, rater: str = "algorithm") -> LabelVector:
    by_id = {r.page_id: r for r in records}
    missing = [p for p in page_ids if p not in by_id]
    if missing:
        raise ValidationError(f"pages not in the classified set: {missing[:5]}")
    return LabelVector.from_labels(page_ids, [by_id[p].ccc_binary for p in page_ids], rater)


def evaluation_report(predicted: LabelVector, raters: list[LabelVector]) -> dict:
    """Confusion metrics against every rater and pairwise kappa among all vectors."""
    vectors = [predicted] + list(raters)
    report = {
        "confusion": {r.rater: confusion_metrics(predicted, r).to_dict() for r in raters},
        "agreement": {},
    }
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            a, b = vectors[i], vectors[j]
            report["agreement"][f"{a.rater}-{b.rater}"] = asdict(cohens_kappa(a, b))
    return report


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
