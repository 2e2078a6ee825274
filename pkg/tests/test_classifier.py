import dataclasses

import numpy as np
import pytest

from wikiccc.classifier import (
    FEATURE_NAMES,
    build_training_set,
    classify,
    finalize_ccc,
    load_model,
    predict_proba,
    save_model,
    train,
    vectorize,
)
from wikiccc.errors import ValidationError
from wikiccc.forest import ForestConfig
from wikiccc.records import QualificationRecord, QualLabel


def rec(pid, label=QualLabel.UNQUALIFIED, **kw):
    return QualificationRecord(page_id=pid, title=f"P{pid}", class_label=label, **kw)


def test_fourteen_components_in_order():
    assert len(FEATURE_NAMES) == 14
    assert FEATURE_NAMES[1] == "category_level" and FEATURE_NAMES[10] == "percent_outlinks_to_CCC"


def test_empty_record_vector():
    v = vectorize(rec(1))
    assert v[1] == -1.0
    assert np.count_nonzero(v) == 1


def test_language_weak_only_record():
    v = vectorize(rec(1, language_weak_wd=("P407:Q652",)))
    assert v[4] == 1.0
    assert np.count_nonzero(v) == 2  # plus the -1 sentinel


def test_link_components():
    r = rec(1, num_inlinks_from_ccc=122, percent_inlinks_from_ccc=0.865, num_outlinks_to_ccc=206,
            percent_outlinks_to_ccc=0.278)
    assert vectorize(r)[7:11].tolist() == [122, 0.865, 206, 0.278]


def test_training_set_five_to_one():
    records = [rec(i, QualLabel.RELIABLY_CCC) for i in range(100)] + [rec(1000 + i) for i in range(10000)]
    ts = build_training_set(records, seed=0)
    assert int(ts.y.sum()) == 100 and len(ts) == 600
    neg_ids = [p for p, lab in zip(ts.page_ids, ts.y) if lab == 0]
    assert len(set(neg_ids)) == 500  # without replacement while supply lasts


def test_training_set_exhausted_pool():
    records = [rec(i, QualLabel.RELIABLY_CCC) for i in range(10)] + [rec(100 + i) for i in range(20)]
    ts = build_training_set(records, seed=0)
    neg_ids = [p for p, lab in zip(ts.page_ids, ts.y) if lab == 0]
    assert len(neg_ids) == 50
    assert set(neg_ids) == {100 + i for i in range(20)}
    assert ts.provenance.count("reliable-positive") == 10


def test_training_negatives_include_every_other_label():
    labels = [QualLabel.POTENTIALLY_CCC, QualLabel.RELIABLY_NON_CCC, QualLabel.POTENTIALLY_NON_CCC]
    records = [rec(1, QualLabel.RELIABLY_CCC)] + [rec(10 + i, labels[i % 3]) for i in range(3)]
    ts = build_training_set(records, seed=0)
    assert {p for p, lab in zip(ts.page_ids, ts.y) if lab == 0} == {10, 11, 12}


def test_zero_positives():
    with pytest.raises(ValidationError, match="empty positive class"):
        build_training_set([rec(1), rec(2)], seed=0)


def _model(seed=0):
    rng = np.random.default_rng(seed)
    pos = [rec(i, QualLabel.RELIABLY_CCC, percent_outlinks_to_ccc=float(rng.uniform(0.7, 1.0)),
               num_outlinks_to_ccc=5) for i in range(40)]
    neg = [rec(100 + i, percent_outlinks_to_ccc=float(rng.uniform(0.0, 0.2))) for i in range(300)]
    ts = build_training_set(pos + neg, seed=seed)
    return train(ts, seed=seed, config=ForestConfig(n_estimators=30))


def test_finalize_rules():
    model = _model()
    looks_ccc = dict(percent_outlinks_to_ccc=0.95, num_outlinks_to_ccc=5)
    records = [
        rec(1, QualLabel.RELIABLY_CCC),
        rec(2, QualLabel.POTENTIALLY_CCC, **looks_ccc),
        rec(3, QualLabel.POTENTIALLY_CCC, percent_outlinks_to_ccc=0.05),
        rec(4, QualLabel.RELIABLY_NON_CCC, ccc_geolocated=-1, **looks_ccc),
        rec(5, QualLabel.RELIABLY_NON_CCC, conflict=True, other_ccc_country_wd=("P17:Q213",), **looks_ccc),
    ]
    out = finalize_ccc(records, model)
    assert [r.ccc_binary for r in out] == [1, 1, 0, 0, 0]
    assert out[1].ccc_probability >= 0.5


def test_finalize_never_admits_reliable_non_even_if_potential():
    model = _model()
    r = rec(9, QualLabel.POTENTIALLY_CCC, other_ccc_location_wd=("P131:Q1:Q213",),
            percent_outlinks_to_ccc=0.95, num_outlinks_to_ccc=5)
    assert finalize_ccc([r], model)[0].ccc_binary == 0


def test_save_and_load(tmp_path):
    model = _model(1)
    save_model(model, tmp_path / "m.json")
    again = load_model(tmp_path / "m.json")
    v = vectorize(rec(1, percent_outlinks_to_ccc=0.9, num_outlinks_to_ccc=5))
    assert predict_proba(model, v) == predict_proba(again, v)
    assert classify(model, v) in (0, 1)
