from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from espace.bundle import build_bundle, save_bundle
from espace.config import load_config

FIXTURES = Path(__file__).parent.parent / "fixtures"


def _build(profile: str, theme: str):
    config = load_config(FIXTURES / theme / "config.json")
    return build_bundle(
        FIXTURES / theme / "manifest.json",
        FIXTURES / "lexicon.tsv",
        FIXTURES / "frequency.tsv",
        profile=profile,
        config=config,
    )


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def credit_bundle():
    return _build("yai4hu", "credit")


@pytest.fixture(scope="session")
def credit_bundle_hwn():
    return _build("hwn", "credit")


@pytest.fixture(scope="session")
def credit_bundle_ose():
    return _build("ose", "credit")


@pytest.fixture(scope="session")
def heart_bundle():
    return _build("yai4hu", "heart")


@pytest.fixture(scope="session")
def credit_bundle_file(credit_bundle, tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("bundles") / "credit_yai4hu.json"
    save_bundle(credit_bundle, path)
    return path


@pytest.fixture(scope="session")
def credit_corpus():
    from espace.corpus import load_corpus

    return load_corpus(FIXTURES / "credit" / "manifest.json")


@pytest.fixture(scope="session")
def heart_corpus():
    from espace.corpus import load_corpus

    return load_corpus(FIXTURES / "heart" / "manifest.json")
