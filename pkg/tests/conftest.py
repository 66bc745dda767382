import json

import numpy as np
import pytest

from radclass.corpus import synthesize_corpus, to_binary


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
    return path


@pytest.fixture
def jsonl(tmp_path):
    def make(records, name="manifest.jsonl"):
        return write_jsonl(tmp_path / name, records)
    return make


@pytest.fixture(scope="session")
def multiclass_corpus():
    return synthesize_corpus(21, 50, 40, 0.3, 11)


@pytest.fixture(scope="session")
def binary_corpus():
    """1,000 separable documents, 10% positive."""
    c = synthesize_corpus(2, [100, 900], 40, 0.3, 5, class_names=["CXR", "other"])
    return to_binary(c, "CXR")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance lines are collected by test_acceptance.record and printed once at the end
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
