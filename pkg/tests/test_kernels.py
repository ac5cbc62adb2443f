import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from proxsearch import kernels
from proxsearch.kernels import pure

BACKENDS = [pure] + ([kernels.compiled] if kernels.compiled is not None else [])
needs_compiled = pytest.mark.skipif(kernels.compiled is None, reason="compiled kernels not built")


def _occurrences(draw_pos, draw_rank):
    pairs = sorted(set(zip(draw_pos, draw_rank)))
    pos = np.array([p for p, _ in pairs], dtype=np.int64)
    rank = np.array([r for _, r in pairs], dtype=np.int64)
    return pos, rank


occurrences = st.lists(st.tuples(st.integers(0, 60), st.integers(0, 5)), max_size=60).map(
    lambda xs: _occurrences([p for p, _ in xs], [r for _, r in xs]))


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.active is (kernels.compiled or pure)


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
def test_worked_example_triples(k):
    pos = np.arange(7)
    rank = np.array([0, 1, 2, 3, 0, 1, 2])
    f, s, t, p, d1, d2 = k.triple_postings(pos, rank, 6)
    rows = {}
    for a, b, c, x, y, z in zip(f, s, t, p, d1, d2):
        rows.setdefault((int(a), int(b), int(c)), []).append((int(x), int(y), int(z)))
    assert rows[(0, 1, 2)] == [(0, 1, 2), (0, 5, 6), (4, -3, -2), (4, 1, 2)]


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
def test_empty_inputs(k):
    empty = np.zeros(0, dtype=np.int64)
    assert all(len(a) == 0 for a in k.triple_postings(empty, empty, 3))
    assert all(len(a) == 0 for a in k.pair_postings(empty, empty, 3))
    s, e = k.search_document([empty, np.array([1])])
    assert len(s) == len(e) == 0
    assert k.encode_postings(empty, empty, np.zeros((0, 2), dtype=np.int64)) == b""


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
def test_search_document_examples(k):
    lists = [np.array([0, 0, 4, 4]), np.array([1, 1, 5, 5]), np.array([2, 2, 6, 6])]
    s, e = k.search_document(lists)
    assert list(zip(s.tolist(), e.tolist())) == [(0, 2), (1, 4), (2, 5), (4, 6)]
    s, e = k.search_document(lists, False)
    assert list(zip(s.tolist(), e.tolist())) == [(0, 2), (1, 4), (2, 5)]
    s, e = k.search_document([np.array([7])])
    assert list(zip(s.tolist(), e.tolist())) == [(7, 7)]
    s, e = k.search_document([np.array([0]), np.array([100])])
    assert list(zip(s.tolist(), e.tolist())) == [(0, 100)]


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
def test_decode_errors_report_offset(k):
    with pytest.raises(ValueError, match="truncated varint at offset 2"):
        k.decode_postings(bytes([1, 2, 0x80]), 2, 0)
    with pytest.raises(ValueError, match="varint too long at offset 0"):
        k.decode_postings(bytes([0xFF] * 12), 1, 0)


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
def test_splice_rewrites_heads(k):
    blob = bytes([5, 1, 2, 7, 3])
    out, offs = k.splice_segments(blob, np.array([0, 3]), np.array([3, 5]), np.array([1, 1]),
                                  np.array([-1, 200]))
    assert out == bytes([5, 1, 2, 0xC8, 0x01, 3])
    assert offs.tolist() == [0, 3, 6]


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(occurrences, st.integers(1, 6))
def test_parity_postings(occ, md):
    pos, rank = occ
    for a, b in zip(pure.triple_postings(pos, rank, md), kernels.compiled.triple_postings(pos, rank, md)):
        assert np.array_equal(a, b)
    for a, b in zip(pure.pair_postings(pos, rank, md), kernels.compiled.pair_postings(pos, rank, md)):
        assert np.array_equal(a, b)


posting_lists = st.lists(
    st.tuples(st.integers(0, 2**33), st.integers(0, 2**32), st.integers(-300, 300), st.integers(-300, 300)),
    max_size=50).map(sorted)


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(posting_lists)
def test_parity_codec(rows):
    ids = np.array([r[0] for r in rows], dtype=np.int64)
    ps = np.array([r[1] for r in rows], dtype=np.int64)
    d = np.array([r[2:] for r in rows], dtype=np.int64).reshape(len(rows), 2)
    blob = pure.encode_postings(ids, ps, d)
    assert kernels.compiled.encode_postings(ids, ps, d) == blob
    for a, b in zip(pure.decode_postings(blob, len(rows), 2), kernels.compiled.decode_postings(blob, len(rows), 2)):
        assert np.array_equal(a, b)


@needs_compiled
@settings(max_examples=200, deadline=None)
@given(occurrences, st.integers(1, 6), st.lists(st.booleans(), min_size=3, max_size=3), st.booleans())
def test_parity_fill_and_search(occ, md, starred, emit_final):
    pos, rank = occ
    _, _, _, p, d1, d2 = pure.triple_postings(pos, rank, md)
    order = np.lexsort((d2, d1, p))
    p, d = p[order], np.stack([d1[order], d2[order]], axis=1)
    a = pure.fill_lists(p, d, 2 * md, starred)
    b = kernels.compiled.fill_lists(p, d, 2 * md, starred)
    assert a[1:] == b[1:]
    for x, y in zip(a[0], b[0]):
        assert (x is None and y is None) or np.array_equal(x, y)
    lists = [x for x in a[0] if x is not None]
    for x, y in zip(pure.search_document(lists, emit_final), kernels.compiled.search_document(lists, emit_final)):
        assert np.array_equal(x, y)


@pytest.mark.parametrize("k", BACKENDS, ids=lambda m: m.BACKEND)
@settings(max_examples=100, deadline=None)
@given(occurrences, st.integers(1, 6))
def test_fill_lists_sorted_and_bounded(k, occ, md):
    pos, rank = occ
    _, _, _, p, d1, d2 = k.triple_postings(pos, rank, md)
    order = np.lexsort((d2, d1, p))
    p, d = p[order], np.stack([d1[order], d2[order]], axis=1)
    lists, ops, max_len = k.fill_lists(p, d, 2 * md, (False, False, False))
    for j, lst in enumerate(lists):
        proj = p if j == 0 else p + d[:, j - 1]
        assert lst.tolist() == sorted(proj.tolist())
    assert max_len <= 2 * md
    assert ops <= 4 * len(p)
