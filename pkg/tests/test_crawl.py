import random

from hypothesis import given, settings, strategies as st

from oracles import shortest_paths_brute
from wikiccc.crawl import crawl_from_seeds
from wikiccc.keywords import Lexicon
from wikiccc.crawl import seed_categories
from wikiccc.snapshot import CategoryGraph


def _graph(subcats, members, titles=None):
    titles = titles or {c: f"C{c}" for c in set(subcats) | set(members) | {x for v in subcats.values() for x in v}}
    return CategoryGraph(titles=titles, subcategories={k: frozenset(v) for k, v in subcats.items()},
                         members={k: frozenset(v) for k, v in members.items()})


def test_diamond_counts_two_paths():
    g = _graph({1: {2, 3}, 2: {4}, 3: {4}}, {4: {100}, 1: {101}})
    res = crawl_from_seeds(g, {1: ("Q38",)})
    assert res[100].level == 3 and res[100].num_paths == 2
    assert res[101].level == 1 and res[101].num_paths == 1


def test_cycle_terminates():
    g = _graph({1: {2}, 2: {1}}, {2: {5}})
    assert crawl_from_seeds(g, {1: ("Q1",)})[5].level == 2


def test_depth_limit():
    chain = {i: {i + 1} for i in range(1, 20)}
    g = _graph(chain, {20: {7}, 3: {8}})
    assert 7 not in crawl_from_seeds(g, {1: ("Q1",)}, max_depth=15)
    assert crawl_from_seeds(g, {1: ("Q1",)}, max_depth=20)[7].level == 20


def test_owners_union_at_shortest_level():
    g = _graph({1: {3}, 2: {3}, 4: {5}, 5: {3}}, {3: {9}})
    res = crawl_from_seeds(g, {1: ("Q38",), 2: ("Q12724",), 4: ("Q39",)})
    assert res[9].territories == ("Q38", "Q12724") and res[9].num_paths == 2


def test_seed_categories_match_titles():
    g = _graph({}, {}, titles={1: "Cucina_italiana", 2: "Fisica"})
    assert seed_categories(g, Lexicon.from_keywords(["italiana"], "Q38")) == {1: ("Q38",)}


def _random_case(rng):
    n = rng.randint(3, 9)
    subcats = {c: {d for d in range(n) if d != c and rng.random() < 0.25} for c in range(n)}
    members = {c: {100 + rng.randrange(8) for _ in range(rng.randint(0, 3))} for c in range(n)}
    seeds = {c: (f"Q{rng.randint(1, 4)}",) for c in rng.sample(range(n), rng.randint(1, 3))}
    return subcats, members, seeds, rng.randint(1, 6)


def test_matches_path_enumeration_on_random_graphs():
    rng = random.Random(7)
    for _ in range(200):
        subcats, members, seeds, depth = _random_case(rng)
        got = crawl_from_seeds(_graph(subcats, members, {c: str(c) for c in subcats}), seeds, depth)
        want = shortest_paths_brute(subcats, members, seeds, depth)
        assert set(got) == set(want)
        for page, (level, count, owners) in want.items():
            assert (got[page].level, got[page].num_paths) == (level, count)
            assert set(got[page].territories) == owners


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_levels_bounded(seed):
    subcats, members, seeds, depth = _random_case(random.Random(seed))
    res = crawl_from_seeds(_graph(subcats, members, {c: str(c) for c in subcats}), seeds, depth)
    assert all(1 <= r.level <= depth and r.num_paths >= 1 for r in res.values())
