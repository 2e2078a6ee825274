from collections import Counter

import pytest

from wikiccc.attribution import (
    apply_attribution,
    attribute_main_territory,
    strict_winner,
    territory_distribution,
)
from wikiccc.records import UNASSIGNED, QualificationRecord


def _r(pid, **kw):
    kw.setdefault("ccc_binary", 1)
    return QualificationRecord(page_id=pid, title=f"T{pid}", qitem=f"Q{900 + pid}", **kw)


def test_strict_winner():
    assert strict_winner(Counter({"Q38": 2, "Q12724": 1})) == "Q38"
    assert strict_winner(Counter({"Q38": 1, "Q12724": 1})) is None
    assert strict_winner(Counter()) is None


def test_rule_order(atlas):
    recs = [
        _r(1, ccc_geolocated=1, geolocated_territory="Q12724", keyword_title="Q38"),
        _r(2, keyword_title="Q12724", country_wd=("P17:Q38",)),
        _r(3, keyword_title="Q652", keyword_is_language=True, country_wd=("P17:Q38",)),
        _r(4, category_crawling_territories=("Q38", "Q12724"), location_wd=("P131:Q5:Q12724",)),
        _r(5, category_crawling_territories=("Q38", "Q12724")),
        _r(6, ccc_binary=0, country_wd=("P17:Q38",)),
    ]
    res = attribute_main_territory(recs, atlas, "it")
    assert res.main_territory == {1: "Q12724", 2: "Q12724", 3: "Q38", 4: "Q12724", 5: UNASSIGNED}
    assert res.rule == {1: "geo", 2: "keyword", 3: "majority", 4: "majority", 5: "unassigned"}


def test_propagation_over_rounds(atlas):
    recs = [
        _r(1, country_wd=("P17:Q238",)),
        _r(2, part_of_wd=("P361:Q901",)),  # part of page 1
        _r(3, has_part_wd=("P527:Q902",)),  # has part page 2, resolved one round later
        _r(4, part_of_wd=("P361:Q99999",)),
    ]
    res = attribute_main_territory(recs, atlas, "it")
    assert [res.main_territory[p] for p in (1, 2, 3, 4)] == ["Q238", "Q238", "Q238", UNASSIGNED]
    assert res.rule[3] == "propagated"


def test_apply_and_distribution(atlas):
    recs = [_r(1, country_wd=("P17:Q38",)), _r(2, country_wd=("P17:Q38",)), _r(3), _r(4, ccc_binary=0)]
    res = attribute_main_territory(recs, atlas, "it")
    out = apply_attribution(recs, res)
    assert [r.main_territory for r in out] == ["Q38", "Q38", UNASSIGNED, None]
    dist = territory_distribution(res)
    assert list(dist) == ["Q38", UNASSIGNED]
    assert sum(dist.values()) == pytest.approx(1.0)


def test_order_independent(atlas):
    recs = [_r(i, country_wd=(f"P17:{'Q38' if i % 2 else 'Q237'}",)) for i in range(1, 9)]
    assert attribute_main_territory(recs, atlas, "it") == attribute_main_territory(recs[::-1], atlas, "it")
