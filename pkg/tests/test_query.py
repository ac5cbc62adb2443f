import numpy as np
import pytest

from proxsearch.index.build import IndexConfig, build_index
from proxsearch.index.reader import Index
from proxsearch.lexicon import Dictionary
from proxsearch.metrics import Metrics
from proxsearch.query.engine import (Fragment, QueryConfig, ResultSet, canonical_windows, choose_path,
                                     equalize, evaluate_ordinary, evaluate_pair_path, evaluate_query,
                                     evaluate_subquery, fill_intermediate_lists, search_in_document)
from proxsearch.query.keys import NotApplicable, QueryError, Subquery, expand_query, lemma_ids, select_keys
from proxsearch.query.oracle import OracleCorpus, brute_force_search, key_postings

from conftest import TO_BE


def named(fl, selected):
    return [tuple(fl.text_of(c) + ("*" if s else "") for c, s in zip(sk.key, sk.starred)) for sk in selected]


def sub_of(fl, words):
    return Subquery(lemma_ids(words, fl), tuple(words))


# key selection

def test_select_keys_short_example(fl_fixture):
    q = lemma_ids(["who", "are", "you", "who"], fl_fixture)
    assert named(fl_fixture, select_keys(q, fl_fixture)) == [("you", "are", "who"), ("you*", "are*", "who")]


def test_select_keys_long_example(fl_fixture):
    words = "who are you and why do you say what you do".split()
    got = named(fl_fixture, select_keys(lemma_ids(words, fl_fixture), fl_fixture))
    assert got == [("you", "are", "who"), ("and", "do", "why"), ("you", "what", "say"), ("you", "what*", "do")]


def test_select_keys_bindings_follow_normalization(fl_fixture):
    q = lemma_ids(["who", "are", "you", "who"], fl_fixture)
    first, last = select_keys(q, fl_fixture)
    assert first.bindings == (2, 1, 0) and first.starred == (False, False, False)
    assert last.bindings == (2, 1, 3) and last.starred == (True, True, False)


def test_select_keys_lengths(fl_fixture):
    q = lemma_ids(["who", "are", "you", "and", "why"], fl_fixture)
    keys = select_keys(q, fl_fixture)
    assert [sorted(k.bindings) for k in keys] == [[0, 1, 2], [2, 3, 4]]
    assert [o for o, s in zip(keys[1].bindings, keys[1].starred) if s] == [2]
    assert len(select_keys(q[:3], fl_fixture)) == 1 and not any(select_keys(q[:3], fl_fixture)[0].starred)
    with pytest.raises(NotApplicable):
        select_keys(q[:2], fl_fixture)


def test_select_pair_keys(fl_fixture):
    q = lemma_ids(["who", "are", "you"], fl_fixture)
    keys = select_keys(q, fl_fixture, k=2)
    assert [sorted(k.bindings) for k in keys] == [[0, 1], [1, 2]]
    assert [o for o, s in zip(keys[1].bindings, keys[1].starred) if s] == [1]
    assert len(select_keys(q[:2], fl_fixture, k=2)) == 1
    with pytest.raises(NotApplicable):
        select_keys(q[:1], fl_fixture, k=2)


def test_every_ordinal_gets_exactly_one_unstarred_slot(fl_fixture):
    words = list(fl_fixture.lemmas)
    for m in range(3, 12):
        q = lemma_ids((words * 3)[:m], fl_fixture)
        for k in (2, 3):
            owners = [o for sk in select_keys(q, fl_fixture, k) for o, s in zip(sk.bindings, sk.starred) if not s]
            assert sorted(owners) == list(range(m))


# expansion

def test_expand_query(fl_fixture):
    d = Dictionary({"are": ["are", "be"], "mine": ["mine", "my"]})
    subs = expand_query("who are you who", d, fl_fixture)
    assert [s.texts for s in subs] == [("who", "are", "you", "who"), ("who", "be", "you", "who")]
    assert len(expand_query("who", d, fl_fixture)) == 1
    assert len(expand_query("are mine", d, fl_fixture)) == 4
    assert expand_query(["Who", "are"], None, fl_fixture)[0].texts == ("who", "are")


def test_expand_query_errors(fl_fixture):
    d = Dictionary({"are": ["are", "be"]})
    with pytest.raises(QueryError, match="empty"):
        expand_query(" ,. ", d, fl_fixture)
    with pytest.raises(QueryError, match="limit"):
        expand_query(" ".join(["are"] * 7), d, fl_fixture)


def test_unknown_lemmas_get_distinct_negative_ids(fl_fixture):
    got = lemma_ids(["zzz", "who", "yyy", "zzz"], fl_fixture)
    assert got[0] == got[3] < 0 and got[2] < 0 and got[0] != got[2]
    assert got[1] == fl_fixture.id_of("who")


# building blocks

def test_equalize(tmp_path):
    texts = ["x", "a", "c", "x", "x", "a b c"]
    build_index(texts, tmp_path, IndexConfig())
    with Index.open(tmp_path) as ix:
        cur = lambda w: ix.cursor("ordinary", (ix.fl.id_of(w),))
        assert equalize([cur("a"), cur("b"), cur("c")]) == 5
        same = [cur("a"), cur("a")]
        assert equalize(same) == 1 and equalize(same) == 1
        assert same[0].metrics.postings_read == 1
        assert equalize([cur("a"), ix.cursor("ordinary", (999,))]) is None


def test_fill_intermediate_lists_worked_example(to_be_index):
    ix = to_be_index
    key = tuple(ix.fl.id_of(w) for w in ("to", "be", "or"))
    cur = ix.cursor("triple", key)
    assert equalize([cur]) == 0
    raw = [cur.value]
    while cur.next():
        raw.append(cur.value)
    assert [p for _, p, _ in raw] == [0, 0, 4, 4]
    assert [p + d[0] for _, p, d in raw] == [1, 5, 1, 5]
    assert [p + d[1] for _, p, d in raw] == [2, 6, 2, 6]

    m = Metrics()
    cur = ix.cursor("triple", key, m)
    equalize([cur])
    lists = fill_intermediate_lists(cur, 0, (False, False, False), ix.max_distance, m)
    assert [x.tolist() for x in lists] == [[0, 0, 4, 4], [1, 1, 5, 5], [2, 2, 6, 6]]
    assert m.max_heap_len <= 2 * ix.max_distance and m.heap_ops <= 4 * m.postings_read

    cur = ix.cursor("triple", key)
    equalize([cur])
    lists = fill_intermediate_lists(cur, 0, (True, False, True), ix.max_distance)
    assert lists[0] is None and lists[2] is None and lists[1].tolist() == [1, 1, 5, 5]


def test_fill_requires_alignment(to_be_index):
    cur = to_be_index.cursor("ordinary", (0,))
    cur.next()
    with pytest.raises(AssertionError):
        fill_intermediate_lists(cur, 3, (False,), 6)


def test_search_in_document_examples():
    lists = [np.array([0, 0, 4, 4]), np.array([1, 1, 5, 5]), np.array([2, 2, 6, 6])]
    assert search_in_document(lists) == [(0, 2), (1, 4), (2, 5), (4, 6)]
    assert search_in_document([np.array([9])]) == [(9, 9)]
    assert search_in_document([np.array([0]), np.array([100])]) == [(0, 100)]
    assert search_in_document([np.array([0]), np.array([], dtype=np.int64)]) == []


def test_canonical_windows():
    s = np.array([0, 0, 1, 3, 2, 10])
    e = np.array([4, 2, 2, 9, 2, 12])
    cs, ce = canonical_windows(s, e, 5)
    # (3, 9) is too wide; (0, 4), (0, 2) and (1, 2) contain (2, 2)
    assert list(zip(cs.tolist(), ce.tolist())) == [(2, 2), (10, 12)]
    cs, ce = canonical_windows(np.array([1, 1]), np.array([3, 3]), 5)
    assert list(zip(cs.tolist(), ce.tolist())) == [(1, 3)]


def test_result_set_sorts_and_dedupes():
    rs = ResultSet([(2, 1, 3), (0, 5, 6), (2, 1, 3)])
    assert list(rs) == [Fragment(0, 5, 6), Fragment(2, 1, 3)]
    assert rs.union(ResultSet([(0, 5, 6), (1, 0, 0)])) == ResultSet([(0, 5, 6), (1, 0, 0), (2, 1, 3)])


# evaluation

def test_worked_example_search(to_be_index):
    sub = sub_of(to_be_index.fl, ["to", "be", "or"])
    expected = ResultSet([(0, 0, 2), (0, 1, 4), (0, 2, 5), (0, 4, 6)])
    assert evaluate_subquery(sub, to_be_index) == expected
    assert evaluate_pair_path(sub, to_be_index) == expected
    assert evaluate_ordinary(sub, to_be_index) == expected
    assert brute_force_search(sub, [TO_BE], to_be_index.fl, 6) == expected


def test_empty_index(tmp_path):
    build_index([], tmp_path, IndexConfig())
    with Index.open(tmp_path) as ix:
        sub = Subquery((-1, -2, -3), ("a", "b", "c"))
        assert len(evaluate_subquery(sub, ix)) == 0
        assert len(evaluate_query("a b c", ix).results) == 0
    assert len(brute_force_search(sub, [], ix.fl, 5)) == 0


def test_query_matches_oracle_on_fixture(small_index, small_corpus, are_dict):
    ix = small_index
    corpus = OracleCorpus(small_corpus, ix.fl, are_dict)
    res = evaluate_query("who are you who", ix)
    assert [p for _, p in res.paths] == ["triple", "triple"]
    expected = ResultSet().union(*(brute_force_search(s, corpus, ix.fl, ix.max_distance)
                                   for s in expand_query("who are you who", are_dict, ix.fl)))
    assert res.results == expected and len(expected) > 0
    for did, s, e in expected:
        assert e - s <= ix.max_distance


def test_single_key_postings_read_is_list_length(small_index):
    ix = small_index
    sub = sub_of(ix.fl, ["who", "are", "you"])
    m = Metrics()
    evaluate_subquery(sub, ix, metrics=m)
    key = select_keys(sub.lemmas, ix.fl)[0].key
    assert m.postings_read == len(ix.cursor("triple", key))
    assert m.subquery_length == 3


def test_dispatch(small_index):
    ix = small_index
    sq = lambda *w: sub_of(ix.fl, list(w))
    assert choose_path(sq("who", "are", "you"), ix, "auto") == ("triple", None)
    assert choose_path(sq("who", "you"), ix, "auto") == ("pair", None)
    assert choose_path(sq("who"), ix, "auto") == ("ordinary", None)
    assert choose_path(sq("who", "you"), ix, "triple")[0] == "pair"
    path, notice = choose_path(sq("who", "zzz", "you"), ix, "triple")
    assert path == "ordinary" and "non-stop" in notice
    assert choose_path(sq("who", "are", "you"), ix, "ordinary") == ("ordinary", None)


def test_one_lemma_query_uses_ordinary(small_index):
    res = evaluate_query("who", small_index)
    assert [p for _, p in res.paths] == ["ordinary"]
    assert [(f.s, f.e) for f in res.results if f.did == 0] == [(0, 0), (3, 3), (4, 4)]


def test_non_stop_query_falls_back_with_notice(tmp_path):
    build_index(["alpha beta gamma delta", "gamma beta alpha"], tmp_path, IndexConfig(sw_count=1))
    with Index.open(tmp_path) as ix:
        res = evaluate_query("alpha beta gamma", ix, QueryConfig(engine="triple"))
        assert res.notices and [p for _, p in res.paths] == ["ordinary"]
        assert list(res.results) == [Fragment(0, 0, 2), Fragment(1, 0, 2)]


def test_missing_family(tmp_path):
    build_index(["a b c"], tmp_path, IndexConfig(families=("ordinary",)))
    with Index.open(tmp_path) as ix:
        assert [p for _, p in evaluate_query("a b c", ix).paths] == ["ordinary"]
        with pytest.raises(QueryError, match="no triple family"):
            evaluate_query("a b c", ix, QueryConfig(engine="triple"))


def test_duplicate_fragments_across_subqueries_appear_once(tmp_path):
    d = Dictionary({"are": ["are", "be"], "is": ["is", "be"]})
    build_index(["you are here", "you is here"], tmp_path, IndexConfig(), d)
    with Index.open(tmp_path) as ix:
        res = evaluate_query("you are", ix)
        assert len(res.paths) == 2
        assert list(res.results) == [Fragment(0, 0, 1), Fragment(1, 0, 1)]


def test_query_is_deterministic(small_index):
    a = evaluate_query("you are who", small_index)
    b = evaluate_query("you are who", small_index)
    assert a.results == b.results and a.metrics.postings_read == b.metrics.postings_read


def test_emit_final_fragment_switch(to_be_index):
    sub = sub_of(to_be_index.fl, ["to", "be", "or"])
    off = evaluate_subquery(sub, to_be_index, QueryConfig(emit_final_fragment=False))
    assert (0, 4, 6) not in [tuple(f) for f in off]


def test_oracle_key_postings_match_worked_example():
    occ = {0: [0, 4], 1: [1, 5], 2: [2, 6], 3: [3]}
    assert key_postings(occ, (0, 1, 2), 6) == [(0, 1, 2), (0, 5, 6), (4, -3, -2), (4, 1, 2)]
    assert key_postings(occ, (0, 1, 9), 6) == []
