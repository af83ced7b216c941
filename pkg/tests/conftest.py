"""Shared fixtures: the bundled mini-libraries extracted once per session."""

from pathlib import Path

import pytest

from apislim.extractor import SourceTree, extract_api

FIXTURES = Path(__file__).parent / "fixtures"


def extract_fixture(name: str, version: str):
    model, report = extract_api(SourceTree.at(FIXTURES / name), version)
    assert not report.warnings, f"fixture {name} should extract cleanly"
    return model


@pytest.fixture(scope="session")
def minilearn_model():
    return extract_fixture("minilearn", "0.1")


@pytest.fixture(scope="session")
def minilearn_v2_model():
    return extract_fixture("minilearn_v2", "0.2")


@pytest.fixture(scope="session")
def minitrees_model():
    return extract_fixture("minitrees", "1.0")


@pytest.fixture(scope="session")
def relib_model():
    return extract_fixture("relib", "1.0")


@pytest.fixture(scope="session")
def deplib_model():
    return extract_fixture("deplib", "3.5")
