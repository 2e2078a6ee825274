from __future__ import annotations

import pytest

from wikiccc.atlas import load_atlas, load_boundaries
from wikiccc.synth import data_path, write_parmigiano_fixture


@pytest.fixture(scope="session")
def atlas():
    return load_atlas(data_path("atlas.csv"))


@pytest.fixture(scope="session")
def boundaries(atlas):
    return load_boundaries(data_path("boundaries.jsonl"), atlas)


@pytest.fixture(scope="session")
def parmigiano_dir(tmp_path_factory):
    return write_parmigiano_fixture(tmp_path_factory.mktemp("parmigiano"))


def write_atlas(path, rows, header="language,qitem,iso3166,iso31662,keywords"):
    path.write_text(header + "\n" + "".join(r + "\n" for r in rows), encoding="utf-8")
    return path


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
