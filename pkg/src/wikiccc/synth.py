"""Fixture builders: the Parmigiano Reggiano snapshot and a planted mini-wiki.

Both write ordinary snapshot directories that ``load_snapshot`` reads, and
are deterministic for a given seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

PARMIGIANO_PAGE_ID = 1
PARMIGIANO_QITEM = "Q155922"

# 58 language editions besides Italian carrying the article
_SITELINK_CODES = (
    "af ar ast az be bg ca ceb cs cy da de el en eo es et eu fa fi fr fy ga gl he hr hu "
    "hy id is ja ka ko la lb lt lv mk ms nl nn no oc pl pms pt ro ru sh simple sk sl sr sv "
    "th tr uk zh"
).split()


def data_path(name: str) -> Path:
    """Path of a file bundled with the package (``atlas.csv``, ``boundaries.jsonl``, ...)."""
    return Path(str(resources.files("wikiccc") / "data" / name))


def _dump(path: Path, rows) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")


def write_snapshot(directory, pages, links, categories, edges, geotags, entities) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _dump(directory / "pages.jsonl", pages)
    _dump(directory / "links.jsonl", ({"from": a, "to": b} for a, b in links))
    _dump(directory / "categories.jsonl", ({"cat_id": c, "title": t} for c, t in categories))
    _dump(directory / "category_edges.jsonl", edges)
    _dump(directory / "geotags.jsonl", ({"page_id": p, "lat": la, "lon": lo} for p, (la, lo) in geotags))
    _dump(directory / "wikidata.jsonl", entities)
    return directory


def _page(page_id, title, qitem, date, **metrics):
    rec = {"page_id": page_id, "title": title, "qitem": qitem, "date_created": date}
    rec.update(metrics)
    return rec


def write_parmigiano_fixture(directory) -> Path:
    """Italian snapshot around the article Parmigiano_Reggiano.

    Link neighbourhood: 141 inlinks (122 from reliable CCC pages, 3 from pages
    geolocated abroad) and 739 outlinks (206 to reliable CCC, 9 abroad).
    """
    groups = [
        ("rel_in", 122),
        ("abroad_in", 3),
        ("plain_in", 16),
        ("rel_out", 206),
        ("abroad_out", 9),
        ("plain_out", 524),
    ]
    pages = [
        _page(
            PARMIGIANO_PAGE_ID,
            "Parmigiano_Reggiano",
            PARMIGIANO_QITEM,
            20040913,
            bytes=13815,
            references=16,
            edits=471,
            editors=268,
            discussions=16,
            pageviews=639,
            featured=0,
        )
    ]
    entities = [
        {
            "qitem": PARMIGIANO_QITEM,
            "claims": {
                "P495": ["Q38"],
                "P1071": ["Q1263", "Q16228"],
                **{p: [f"Q{90000001 + i}"] for i, p in enumerate(
                    ["P31", "P279", "P186", "P2012", "P910", "P1343", "P1889",
                     "P5008", "P1535", "P366", "P2670", "P1552", "P3094", "P1419"]
                )},
            },
            "sitelinks": {"itwiki": "Parmigiano Reggiano", **{f"{c}wiki": "Parmigiano Reggiano" for c in _SITELINK_CODES}},
        },
        # Emilia-Romagna -> Italy, Province of Parma -> Emilia-Romagna
        {"qitem": "Q1263", "claims": {"P131": ["Q38"]}, "sitelinks": {}},
        {"qitem": "Q16228", "claims": {"P131": ["Q1263"]}, "sitelinks": {}},
    ]
    geotags = []
    links = []
    next_id = 2
    for group, count in groups:
        for k in range(count):
            pid = next_id
            next_id += 1
            qitem = f"Q{1000000 + pid}"
            title = f"Voce_{pid}"
            claims = {}
            if group.startswith("rel"):
                kind = k % 4
                if kind == 0:
                    geotags.append((pid, (43.0 + (k % 50) * 0.02, 11.5 + (k % 30) * 0.02)))
                elif kind == 1:
                    title = f"Italia_{pid}"
                elif kind == 2:
                    claims = {"P17": ["Q38"]}
                else:
                    claims = {"P131": ["Q16228"]}
            elif group.startswith("abroad"):
                title = f"Luogo_{pid}"
                geotags.append((pid, (49.5 + (k % 10) * 0.1, 14.0 + (k % 10) * 0.2)))
            pages.append(
                _page(pid, title, qitem, 20050101 + (pid % 28), bytes=1000 + pid, references=pid % 7,
                      edits=10 + pid % 40, editors=5 + pid % 20, discussions=pid % 3, pageviews=pid % 90)
            )
            entities.append({"qitem": qitem, "claims": claims, "sitelinks": {"itwiki": title.replace("_", " ")}})
            if group.endswith("_in"):
                links.append((pid, PARMIGIANO_PAGE_ID))
            else:
                links.append((PARMIGIANO_PAGE_ID, pid))

    categories = [(1, "Cucina_italiana")]
    edges = [{"parent": 1, "child": PARMIGIANO_PAGE_ID, "child_kind": "article"}]
    return write_snapshot(directory, pages, links, categories, edges, geotags, entities)


@dataclass(frozen=True)
class PlantedWiki:
    directory: Path
    planted: frozenset  # page ids that truly belong to the Italian context
    reliable: frozenset  # planted pages carrying direct evidence
    reliable_non: frozenset  # non-context pages carrying evidence for another context


# category id, title, parent (None: top level), belongs to the Italian context
_MINI_CATEGORIES = (
    (1, "Cultura_italiana", None, True),
    (2, "Geografia_d'Italia", None, True),
    (3, "Storia_d'Italia", None, True),
    (4, "Arte_rinascimentale", 1, True),
    (5, "Musei_fiorentini", 4, True),
    (6, "Borghi_storici", 2, True),
    (7, "Dinastie_medievali", 3, True),
    (8, "Cultura_ceca", None, False),
    (9, "Fisica", None, False),
    (10, "Matematica", None, False),
    (11, "Letteratura_tedesca", None, False),
    (12, "Poeti_romantici", 11, False),
)


def write_planted_wiki(directory, seed: int = 0, n_pages: int = 500, ccc_share: float = 0.3,
                       reliable_share: float = 0.75, link_degree: tuple[int, int] = (4, 10),
                       ccc_link_bias: float = 0.8, non_link_bias: float = 0.1) -> PlantedWiki:
    """Italian mini-wiki with a planted context set.

    Planted pages either carry direct evidence (geotag, title keyword,
    country or location claims) or only indirect signals: Italian
    categories, links from other planted pages and sometimes a
    language-of-work claim. Other pages link mostly among themselves; a
    share of them carry evidence for Czech or German territories.
    """
    rng = np.random.default_rng(seed)
    ids = np.arange(1, n_pages + 1)
    order = rng.permutation(ids)
    n_ccc = int(round(ccc_share * n_pages))
    ccc = sorted(int(i) for i in order[:n_ccc])
    non = sorted(int(i) for i in order[n_ccc:])
    n_rel = int(round(reliable_share * n_ccc))
    reliable = set(int(i) for i in rng.choice(ccc, size=n_rel, replace=False))
    reliable_non = set(int(i) for i in rng.choice(non, size=int(round(0.15 * len(non))), replace=False))
    ccc_set = set(ccc)

    pages, entities, geotags, edges = [], [], [], []
    ccc_cats = [c for c, _, _, home in _MINI_CATEGORIES if home]
    non_cats = [c for c, _, _, home in _MINI_CATEGORIES if not home]
    for pid in range(1, n_pages + 1):
        qitem = f"Q{2000000 + pid}"
        title = f"Voce_{pid}"
        claims: dict[str, list[str]] = {}
        if pid in reliable:
            kind = int(rng.integers(0, 5))
            if kind == 0:
                geotags.append((pid, (float(rng.uniform(42.6, 44.3)), float(rng.uniform(11.4, 12.4)))))
            elif kind == 1:
                title = f"Storia_italiana_{pid}"
            elif kind == 2:
                claims["P17"] = ["Q38"]
            elif kind == 3:
                claims["P131"] = ["Q1263"]
            else:
                claims["P495"] = ["Q38"]
        elif pid in ccc_set:
            if rng.random() < 0.3:
                claims["P407"] = ["Q652"]
        elif pid in reliable_non:
            kind = int(rng.integers(0, 3))
            if kind == 0:
                geotags.append((pid, (float(rng.uniform(49.0, 50.5)), float(rng.uniform(13.0, 18.0)))))
            elif kind == 1:
                claims["P17"] = ["Q213"]
            else:
                claims["P27"] = ["Q183"]
        if pid in ccc_set:
            for c in rng.choice(ccc_cats, size=int(rng.integers(1, 3)), replace=False):
                edges.append({"parent": int(c), "child": pid, "child_kind": "article"})
        else:
            cats = list(rng.choice(non_cats, size=1))
            if rng.random() < 0.05:
                cats.append(rng.choice(ccc_cats))
            for c in cats:
                edges.append({"parent": int(c), "child": pid, "child_kind": "article"})
        pages.append(
            _page(pid, title, qitem, int(20030101 + 10000 * int(rng.integers(0, 15)) + int(rng.integers(0, 28))),
                  bytes=int(rng.integers(500, 50000)), references=int(rng.integers(0, 40)),
                  edits=(edits := int(rng.integers(1, 500))), editors=int(rng.integers(1, edits + 1)),
                  discussions=int(rng.integers(0, 20)), pageviews=int(rng.integers(0, 5000)))
        )
        entities.append({"qitem": qitem, "claims": claims, "sitelinks": {"itwiki": title.replace("_", " ")}})
    entities.append({"qitem": "Q1263", "claims": {"P131": ["Q38"]}, "sitelinks": {}})

    links = set()
    for pid in range(1, n_pages + 1):
        home_bias = ccc_link_bias if pid in ccc_set else non_link_bias
        for _ in range(int(rng.integers(link_degree[0], link_degree[1] + 1))):
            pool = ccc if rng.random() < home_bias else non
            dst = int(rng.choice(pool))
            if dst != pid:
                links.add((pid, dst))

    categories = [(c, t) for c, t, _, _ in _MINI_CATEGORIES]
    edges += [
        {"parent": parent, "child": c, "child_kind": "category"}
        for c, _, parent, _ in _MINI_CATEGORIES
        if parent is not None
    ]
    directory = write_snapshot(directory, pages, sorted(links), categories, edges, geotags, entities)
    return PlantedWiki(
        directory=directory,
        planted=frozenset(ccc_set),
        reliable=frozenset(reliable),
        reliable_non=frozenset(reliable_non),
    )
