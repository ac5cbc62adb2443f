import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from proxsearch.index.build import IndexConfig, build_index  # noqa: E402
from proxsearch.index.reader import Index  # noqa: E402
from proxsearch.lexicon import Dictionary, FLList  # noqa: E402

# FL-numbers quoted for the "who are you" example, plus values chosen so the
# longer example normalizes as expected: and < do < why, you < what < do,
# what < say.
FL_FIXTURE = {"who": 293, "are": 268, "be": 21, "you": 47,
              "and": 5, "what": 100, "do": 150, "say": 300, "why": 400}

TO_BE = "to be or not to be or"


@pytest.fixture
def fl_fixture():
    return FLList.from_ranks(FL_FIXTURE)


@pytest.fixture
def are_dict():
    return Dictionary({"are": ["are", "be"]})


@pytest.fixture
def to_be_index(tmp_path):
    build_index([TO_BE], tmp_path / "tobe", IndexConfig(max_distance=6),
                fl_order=["to", "be", "or", "not"])
    with Index.open(tmp_path / "tobe") as ix:
        yield ix


@pytest.fixture
def small_corpus():
    return [
        "Who are you? Who, who are you",
        "to be or not to be or",
        "you are who you are and why do you say what you do",
        "",
        "nobody here at all",
        "be you who be you who are",
    ]


@pytest.fixture
def small_index(tmp_path, small_corpus, are_dict):
    build_index(small_corpus, tmp_path / "small", IndexConfig(max_distance=3, sw_count=12), are_dict)
    with Index.open(tmp_path / "small") as ix:
        yield ix


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
