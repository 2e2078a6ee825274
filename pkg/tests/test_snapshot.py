import json

import pytest

from wikiccc.errors import SnapshotError
from wikiccc.snapshot import inlinks, interwiki_count, load_snapshot, outlinks, wdproperty_count
from wikiccc.synth import write_snapshot


def _pages(*ids):
    return [{"page_id": i, "title": f"T{i}", "qitem": f"Q{i}", "date_created": 20100101} for i in ids]


def _write(tmp_path, pages=None, links=(), cats=(), edges=(), geotags=(), entities=()):
    return write_snapshot(tmp_path / "s", pages or _pages(1, 2, 3), list(links), list(cats),
                          list(edges), list(geotags), list(entities))


def test_links_and_reverse(tmp_path):
    snap = load_snapshot(_write(tmp_path, links=[(1, 2), (1, 3), (3, 2)]), "it")
    assert outlinks(snap, 1) == {2, 3}
    assert inlinks(snap, 2) == {1, 3}
    assert inlinks(snap, 1) == frozenset()
    with pytest.raises(SnapshotError):
        outlinks(snap, 99)


def test_entity_counts(tmp_path):
    ent = [{"qitem": "Q1", "claims": {"P17": ["Q38"], "P31": ["Q5"]}, "sitelinks": {"itwiki": "a", "enwiki": "b"}}]
    snap = load_snapshot(_write(tmp_path, entities=ent), "it")
    assert wdproperty_count(snap, "Q1") == 2
    assert interwiki_count(snap, "Q1") == 2
    with pytest.raises(SnapshotError):
        interwiki_count(snap, "Q2")


def test_immutable(tmp_path):
    snap = load_snapshot(_write(tmp_path), "it")
    with pytest.raises(TypeError):
        snap.pages[9] = None


def test_all_dangling_references_reported(tmp_path):
    d = _write(tmp_path, links=[(1, 7)], cats=[(1, "C")],
               edges=[{"parent": 1, "child": 8, "child_kind": "article"},
                      {"parent": 5, "child": 1, "child_kind": "category"}],
               geotags=[(9, (1.0, 1.0))])
    with pytest.raises(SnapshotError) as info:
        load_snapshot(d, "it")
    msg = str(info.value)
    for needle in ("unknown page_id 7", "unknown page_id 8", "unknown category 5", "unknown page_id 9"):
        assert needle in msg


@pytest.mark.parametrize(
    "page, message",
    [
        ({"page_id": 1, "title": "A", "date_created": 20100101, "namespace": 14}, "namespace"),
        ({"page_id": 1, "title": "A", "date_created": 20100231}, "date_created"),
        ({"page_id": 1, "title": "A", "date_created": 20100101, "qitem": "X1"}, "qitem"),
        ({"page_id": 1, "title": "A", "date_created": 20100101, "edits": 1, "editors": 2}, "editors"),
        ({"page_id": 1, "date_created": 20100101}, "title"),
    ],
)
def test_page_validation(tmp_path, page, message):
    with pytest.raises(SnapshotError, match=message):
        load_snapshot(_write(tmp_path, pages=[page]), "it")


def test_duplicates_and_second_geotag(tmp_path):
    with pytest.raises(SnapshotError, match="duplicate page_id"):
        load_snapshot(_write(tmp_path, pages=_pages(1) + [{"page_id": 1, "title": "X", "date_created": 20100101}]), "it")
    with pytest.raises(SnapshotError, match="second primary geotag"):
        load_snapshot(_write(tmp_path, geotags=[(1, (1.0, 1.0)), (1, (2.0, 2.0))]), "it")
    with pytest.raises(SnapshotError, match="out of range"):
        load_snapshot(_write(tmp_path, geotags=[(1, (91.0, 1.0))]), "it")


def test_malformed_json_line_number(tmp_path):
    d = _write(tmp_path)
    with (d / "links.jsonl").open("a") as fh:
        fh.write(json.dumps({"from": 1, "to": 2}) + "\n{oops\n")
    with pytest.raises(SnapshotError, match="links.jsonl:2"):
        load_snapshot(d, "it")


def test_missing_file(tmp_path):
    d = _write(tmp_path)
    (d / "geotags.jsonl").unlink()
    with pytest.raises(SnapshotError, match="geotags.jsonl"):
        load_snapshot(d, "it")


def test_bad_claims(tmp_path):
    with pytest.raises(SnapshotError, match="property"):
        load_snapshot(_write(tmp_path, entities=[{"qitem": "Q1", "claims": {"X17": ["Q1"]}}]), "it")
    with pytest.raises(SnapshotError, match="nonempty"):
        load_snapshot(_write(tmp_path, entities=[{"qitem": "Q1", "claims": {"P17": []}}]), "it")
