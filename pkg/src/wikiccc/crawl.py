"""Breadth-first descent of the category graph from keyword seed categories."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .ids import sorted_ids
from .keywords import Lexicon, match_title_keywords
from .snapshot import CategoryGraph, WikiSnapshot

DEFAULT_MAX_DEPTH = 15


@dataclass(frozen=True)
class CrawlResult:
    territories: tuple[str, ...]
    level: int
    num_paths: int


def seed_categories(categories: CategoryGraph, lexicon: Lexicon) -> dict[int, tuple[str, ...]]:
    """Categories whose title matches the lexicon, with the matched keyword's owners."""
    seeds = {}
    for cat_id, title in categories.titles.items():
        match = match_title_keywords(title, lexicon)
        if match is not None:
            seeds[cat_id] = match.owners
    return seeds


def crawl_from_seeds(
    categories: CategoryGraph, seeds: dict[int, tuple[str, ...]], max_depth: int = DEFAULT_MAX_DEPTH
) -> dict[int, CrawlResult]:
    """Shortest seed-to-article level and shortest path count for every reached article.

    An article directly in a seed category is at level 1. Levels never
    exceed ``max_depth``. Path counts accumulate over the BFS layers, so each
    category's count is final before its children are expanded.
    """
    dist: dict[int, int] = {}
    paths: dict[int, int] = {}
    owners: dict[int, set[str]] = {}
    queue = deque()
    for cat in sorted(seeds):
        dist[cat] = 0
        paths[cat] = 1
        owners[cat] = set(seeds[cat])
        queue.append(cat)

    while queue:
        cat = queue.popleft()
        d = dist[cat]
        if d + 1 >= max_depth:
            continue
        for child in sorted(categories.subcategories.get(cat, ())):
            seen = dist.get(child)
            if seen is None:
                dist[child] = d + 1
                paths[child] = paths[cat]
                owners[child] = set(owners[cat])
                queue.append(child)
            elif seen == d + 1:
                paths[child] += paths[cat]
                owners[child] |= owners[cat]

    level: dict[int, int] = {}
    count: dict[int, int] = {}
    found: dict[int, set[str]] = {}
    for cat in sorted(dist):
        article_level = dist[cat] + 1
        for page in categories.members.get(cat, ()):
            best = level.get(page)
            if best is None or article_level < best:
                level[page] = article_level
                count[page] = paths[cat]
                found[page] = set(owners[cat])
            elif article_level == best:
                count[page] += paths[cat]
                found[page] |= owners[cat]
    return {
        page: CrawlResult(tuple(sorted_ids(found[page])), level[page], count[page]) for page in sorted(level)
    }


def category_crawl(
    snapshot: WikiSnapshot, lexicon: Lexicon, max_depth: int = DEFAULT_MAX_DEPTH
) -> dict[int, CrawlResult]:
    return crawl_from_seeds(snapshot.categories, seed_categories(snapshot.categories, lexicon), max_depth)
