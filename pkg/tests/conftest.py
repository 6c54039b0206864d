from __future__ import annotations

import importlib.resources
import json
from pathlib import Path

import pytest

from mathfind import corpus


def acceptance_corpus_path() -> Path:
    return Path(
        importlib.resources.files("mathfind").joinpath("data/acceptance_corpus.jsonl")
    )


def acceptance_manifest() -> dict:
    path = importlib.resources.files("mathfind").joinpath(
        "data/acceptance_manifest.json"
    )
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return acceptance_corpus_path()


@pytest.fixture(scope="session")
def manifest() -> dict:
    return acceptance_manifest()


@pytest.fixture(scope="session")
def snapshot(corpus_path):
    docs, warnings, corpus_hash = corpus.ingest_path(corpus_path)
    assert not warnings
    return corpus.build_snapshot(docs, corpus_hash, timestamp=0.0)
