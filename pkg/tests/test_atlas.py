import math

import numpy as np
import pytest

from conftest import write_atlas
from oracles import winding_number
from wikiccc.atlas import (
    abroad_territories,
    load_atlas,
    load_boundaries,
    make_boundaries,
    reverse_geocode,
    reverse_geocode_many,
    territories_for,
)
from wikiccc.errors import AtlasError


def test_italian_territories(atlas):
    codes = {t.iso_code for t in territories_for(atlas, "it")}
    assert codes == {"IT", "VA", "SM", "CH-TI", "HR-18", "SI-090", "SI-040"}


def test_czech_single_territory(atlas):
    ts = territories_for(atlas, "cs")
    assert [t.iso3166 for t in ts] == ["CZ"]


def test_ninety_english_territories(tmp_path):
    rows = [f"en,Q{1000 + i},{chr(65 + i // 26)}{chr(65 + i % 26)},,place{i}" for i in range(90)]
    atlas = load_atlas(write_atlas(tmp_path / "a.csv", rows))
    assert len(territories_for(atlas, "en")) == 90


def test_unknown_language(atlas):
    with pytest.raises(AtlasError):
        territories_for(atlas, "xx")


@pytest.mark.parametrize(
    "rows, message",
    [
        ([], "no territories loaded"),
        (["it,Q38,IT,,italia", "it,Q38,IT,,italia"], ":3"),
        (["it,Q38,It,,italia"], ":2"),
        (["it,Q38,IT,,"], "empty keyword list"),
        (["it,Q38,IT,FR-X,italia"], ":2"),
    ],
)
def test_load_errors(tmp_path, rows, message):
    with pytest.raises(AtlasError, match=message):
        load_atlas(write_atlas(tmp_path / "a.csv", rows))


def test_levels_follow_region_code(atlas):
    for ts in atlas.by_language.values():
        for t in ts:
            assert t.level == (2 if t.iso31662 else 1)


def test_by_qitem_inverts_by_language(atlas):
    inverse = {}
    for lang, ts in atlas.by_language.items():
        for t in ts:
            inverse.setdefault(t.qitem, set()).add(lang)
    assert {q: set(v) for q, v in atlas.by_qitem.items()} == inverse


def test_row_order_and_idempotence(tmp_path):
    rows = ["it,Q38,IT,,italia", "cs,Q213,CZ,,česko", "it,Q238,SM,,san marino"]
    a = load_atlas(write_atlas(tmp_path / "a.csv", rows))
    b = load_atlas(write_atlas(tmp_path / "b.csv", rows[::-1]))
    assert a == b == load_atlas(tmp_path / "a.csv")


def test_abroad_is_complement(atlas):
    for lang in atlas.by_language:
        home = {t.qitem for t in territories_for(atlas, lang)}
        away = abroad_territories(atlas, lang)
        assert not home & away
        assert home | away == set(atlas.by_qitem)


def test_abroad_simple_and_shared(tmp_path):
    a = load_atlas(write_atlas(tmp_path / "a.csv", ["it,Q38,IT,,italia", "cs,Q213,CZ,,česko"]))
    assert abroad_territories(a, "it") == {"Q213"}
    shared = load_atlas(write_atlas(tmp_path / "b.csv", [
        "it,Q38,IT,,italia", "it,Q12724,CH,CH-TI,ticino", "de,Q12724,CH,CH-TI,tessin", "de,Q183,DE,,deutschland",
    ]))
    assert abroad_territories(shared, "it") == {"Q183"}
    single = load_atlas(write_atlas(tmp_path / "c.csv", ["it,Q38,IT,,italia"]))
    assert abroad_territories(single, "it") == set()


UNIT = {"Q1": [[(0, 0), (0, 1), (1, 1), (1, 0)]]}


def test_unit_square():
    b = make_boundaries(UNIT)
    assert reverse_geocode((0.5, 0.5), b) == "Q1"
    assert reverse_geocode((2, 2), b) is None


def test_concave_notch():
    # L shape: the square (0..2, 0..2) minus its upper-right quarter
    ell = [(0, 0), (0, 2), (1, 2), (1, 1), (2, 1), (2, 0)]
    b = make_boundaries({"Q5": [ell]})
    assert reverse_geocode((1.5, 1.5), b) is None
    assert reverse_geocode((0.5, 1.5), b) == "Q5"
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.5, 2.5, size=(1000, 2))
    got = reverse_geocode_many(pts, b)
    for p, g in zip(pts, got):
        wn = winding_number(p, ell)
        if wn is not None:
            assert (g == "Q5") == (wn != 0)


def test_region_shadows_country_and_smallest_qitem_wins_overlap():
    square = [(0, 0), (0, 10), (10, 10), (10, 0)]
    inner = [(4, 4), (4, 6), (6, 6), (6, 4)]
    b = make_boundaries({"Q100": [square], "Q7": [square], "Q900": [inner]}, {"Q900": 2})
    assert reverse_geocode((5, 5), b) == "Q900"
    assert reverse_geocode((1, 1), b) == "Q7"


def test_boundary_validation():
    with pytest.raises(AtlasError):
        make_boundaries({"Q1": [[(0, 0), (0, 0), (1, 1)]]})
    with pytest.raises(AtlasError):
        make_boundaries({"Q1": [[(0, 0), (95, 0), (1, 1)]]})


def test_bundled_boundaries_geocode(boundaries):
    assert reverse_geocode((44.8, 10.33), boundaries) == "Q38"  # Parma
    assert reverse_geocode((46.0, 8.95), boundaries) == "Q12724"  # Lugano
    assert reverse_geocode((50.08, 14.43), boundaries) == "Q213"  # Prague
    assert reverse_geocode((0.0, 0.0), boundaries) is None


def test_load_boundaries_levels_from_atlas(tmp_path, atlas):
    p = tmp_path / "b.jsonl"
    p.write_text('{"qitem": "Q12724", "polygons": [[[0,0],[0,1],[1,1]]]}\n', encoding="utf-8")
    assert load_boundaries(p, atlas).levels == {"Q12724": 2}
    p.write_text('{"qitem": "Q1"}\n', encoding="utf-8")
    with pytest.raises(AtlasError, match=":1"):
        load_boundaries(p)


def test_language_info(atlas):
    info = atlas.language("it")
    assert info.qitem == "Q652" and "italiano" in info.names
    assert not math.isnan(len(info.qitems))
