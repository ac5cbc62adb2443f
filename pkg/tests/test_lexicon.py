import pytest
from hypothesis import given, strategies as st

from proxsearch.lexicon import (RARE, Dictionary, FLList, LemmaClass, LexiconConfig, analyze,
                                build_fl_list, classify, lemmatize, tokenize)


def test_tokenize_examples():
    assert tokenize("to be or not to be or") == [
        ("to", 0), ("be", 1), ("or", 2), ("not", 3), ("to", 4), ("be", 5), ("or", 6)]
    assert tokenize("") == []
    assert tokenize("Who, are you?") == [("who", 0), ("are", 1), ("you", 2)]


def test_tokenize_digits_and_separators():
    assert tokenize("R2-D2 won't_stop 42") == [
        ("r2", 0), ("d2", 1), ("won", 2), ("t", 3), ("stop", 4), ("42", 5)]
    assert tokenize("Émile ÉCOLE") == [("émile", 0), ("école", 1)]


@given(st.text())
def test_tokenize_positions_have_no_gaps(text):
    toks = tokenize(text)
    assert [p for _, p in toks] == list(range(len(toks)))
    assert all(w and w == w.lower() for w, _ in toks)


def test_lemmatize():
    d = Dictionary({"are": ["are", "be"], "mine": ["mine", "my"]})
    assert lemmatize("are", d) == ["are", "be"]
    assert lemmatize("mine", d) == ["mine", "my"]
    assert lemmatize("xqzzy", d) == ["xqzzy"]
    assert lemmatize("xqzzy") == ["xqzzy"]


def test_dictionary_file_round_trip(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("# comment\nare\tare,be\nmine\tmine, my\n\n", encoding="utf-8")
    d = Dictionary.load(path)
    assert d.lookup("mine") == ["mine", "my"]
    d.dump(tmp_path / "e.tsv")
    assert Dictionary.load(tmp_path / "e.tsv").entries == d.entries


@pytest.mark.parametrize("line", ["are\n", "are\t\n", "\tbe\n"])
def test_dictionary_rejects_bad_lines(tmp_path, line):
    path = tmp_path / "d.tsv"
    path.write_text(line, encoding="utf-8")
    with pytest.raises(ValueError, match=":1:"):
        Dictionary.load(path)


def test_analyze_keeps_every_lemma_once():
    d = Dictionary({"are": ["are", "be", "are"]})
    assert analyze("you are", d) == [("you", 0), ("are", 1), ("be", 1)]


def test_build_fl_list_examples():
    fl = build_fl_list({"a": 100, "b": 50, "c": 50})
    assert {fl.text_of(i): fl.rank(i) for i in range(3)} == {"a": 0, "b": 1, "c": 2}
    assert build_fl_list({}).ranks == {}


def test_build_fl_list_min_count_and_sentinel():
    fl = build_fl_list({"a": 5, "b": 1, "c": 3}, min_count=3)
    assert fl.rank_of("a") == 0 and fl.rank_of("c") == 1
    assert fl.rank_of("b") == RARE == 2**32 - 1
    assert fl.rank_of("missing") == RARE


def test_build_fl_list_pinned_order():
    fl = build_fl_list({"x": 9, "to": 2, "be": 2}, order=["to", "be"])
    assert [fl.text_of(i) for i in fl.by_rank()] == ["to", "be", "x"]


@given(st.dictionaries(st.text("abc", min_size=1, max_size=3), st.integers(0, 20)))
def test_fl_list_properties(counts):
    fl = build_fl_list(counts)
    ordered = fl.by_rank()
    assert sorted(fl.ranks.values()) == list(range(len(ordered)))
    for a, b in zip(ordered, ordered[1:]):
        ca, cb = counts[fl.text_of(a)], counts[fl.text_of(b)]
        assert ca > cb or (ca == cb and fl.text_of(a) < fl.text_of(b))
    assert all(r < fl.rare_sentinel for r in fl.ranks.values())


def test_fl_list_save_load(tmp_path):
    fl = build_fl_list({"a": 4, "b": 2, "c": 1}, min_count=2)
    fl.save(tmp_path / "lex")
    back = FLList.load(tmp_path / "lex")
    assert back.lemmas == fl.lemmas and back.ranks == fl.ranks and back.counts == fl.counts


def test_fixture_lemmas_are_stop(fl_fixture):
    cfg = LexiconConfig(700, 2100)
    for word in ("be", "you", "are", "who"):
        assert classify(fl_fixture.rank_of(word), cfg) is LemmaClass.STOP


def test_classify_boundaries():
    cfg = LexiconConfig(700, 2100)
    assert classify(293, cfg) is LemmaClass.STOP
    assert classify(699, cfg) is LemmaClass.STOP
    assert classify(700, cfg) is LemmaClass.FREQUENTLY_USED
    assert classify(2799, cfg) is LemmaClass.FREQUENTLY_USED
    assert classify(2800, cfg) is LemmaClass.ORDINARY
    assert classify(0, LexiconConfig(0, 5)) is LemmaClass.FREQUENTLY_USED
    assert classify(RARE, cfg) is LemmaClass.ORDINARY


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 200), st.integers(0, 200))
def test_classify_is_monotone(sw, fu, a, b):
    order = [LemmaClass.STOP, LemmaClass.FREQUENTLY_USED, LemmaClass.ORDINARY]
    cfg = LexiconConfig(sw, fu)
    lo, hi = sorted((a, b))
    assert order.index(classify(lo, cfg)) <= order.index(classify(hi, cfg))


def test_lexicon_config_validates():
    with pytest.raises(ValueError):
        LexiconConfig(-1, 0)
