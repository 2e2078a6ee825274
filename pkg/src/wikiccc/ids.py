"""Wikidata identifier helpers."""

import re

QITEM_RE = re.compile(r"Q[0-9]+")
PROPERTY_RE = re.compile(r"P[0-9]+")
WIKI_CODE_RE = re.compile(r"[a-z][a-z0-9_-]*")


def is_qitem(value) -> bool:
    return isinstance(value, str) and QITEM_RE.fullmatch(value) is not None


def is_property(value) -> bool:
    return isinstance(value, str) and PROPERTY_RE.fullmatch(value) is not None


def id_key(value: str) -> int:
    """Numeric sort key for ``Q123`` / ``P45`` identifiers."""
    return int(value[1:])


def sorted_ids(values):
    return sorted(values, key=id_key)
