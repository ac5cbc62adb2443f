"""Pure-Python implementations of the hot loops.

Every function here has a twin with the same signature in ``_ckernels.pyx``;
the two must agree exactly, including the heap statistics.
"""

from __future__ import annotations

import numpy as np

from ..heap import BoundedMinHeap

BACKEND = "python"
KEY_BITS = 21


def _zigzag(value: int) -> int:
    return (value << 1) if value >= 0 else ((-value << 1) - 1)


def _unzigzag(value: int) -> int:
    return (value >> 1) if not value & 1 else -((value + 1) >> 1)


def _put_varint(out: bytearray, value: int) -> None:
    while value >= 0x80:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)


def encode_groups(ids, ps, dists, starts):
    """Encode consecutive posting lists in one pass.

    ``starts`` holds the first row of every list plus a final ``n``; each list
    starts with an absolute ID. Returns ``(blob, offsets)`` with ``offsets[g]``
    the byte offset of list ``g`` (and ``offsets[-1] == len(blob)``).

    IDs are delta coded, P is delta coded inside a document and absolute on a
    document change, and signed offsets are zigzag coded; every field is an
    unsigned LEB128 varint.
    """
    out = bytearray()
    k = dists.shape[1]
    offsets = np.empty(len(starts), dtype=np.int64)
    for g in range(len(starts) - 1):
        offsets[g] = len(out)
        prev_id = 0
        prev_p = 0
        for i in range(int(starts[g]), int(starts[g + 1])):
            doc = int(ids[i])
            p = int(ps[i])
            if i == starts[g] or doc != prev_id:
                _put_varint(out, doc - prev_id)
                _put_varint(out, p)
            else:
                _put_varint(out, 0)
                _put_varint(out, p - prev_p)
            for j in range(k):
                _put_varint(out, _zigzag(int(dists[i, j])))
            prev_id, prev_p = doc, p
    offsets[-1] = len(out)
    return bytes(out), offsets


def encode_postings(ids, ps, dists) -> bytes:
    """Encode one sorted posting list (see :func:`encode_groups`)."""
    return encode_groups(ids, ps, dists, np.array([0, len(ids)], dtype=np.int64))[0]


def splice_segments(blob, src_start, src_end, head_len, new_head):
    """Concatenate byte ranges of ``blob``, optionally rewriting each head varint.

    Segment ``i`` is copied whole when ``new_head[i] < 0``; otherwise its first
    ``head_len[i]`` bytes are replaced by ``varint(new_head[i])``. Returns the
    spliced bytes and the output offset of every segment (plus the end).
    """
    data = memoryview(blob)
    out = bytearray()
    offsets = np.empty(len(src_start) + 1, dtype=np.int64)
    for i in range(len(src_start)):
        offsets[i] = len(out)
        a = int(src_start[i])
        if new_head[i] >= 0:
            _put_varint(out, int(new_head[i]))
            a += int(head_len[i])
        out += data[a:int(src_end[i])]
    offsets[-1] = len(out)
    return bytes(out), offsets


def decode_postings(buf, count: int, ndist: int):
    """Decode ``count`` postings; returns ``(ids, ps, dists, ends)``.

    ``ends[i]`` is the byte offset just past posting ``i``. Raises ``ValueError``
    carrying the offending offset on truncated or oversized varints.
    """
    data = memoryview(buf)
    size = len(data)
    ids = np.empty(count, dtype=np.int64)
    ps = np.empty(count, dtype=np.int64)
    dists = np.empty((count, ndist), dtype=np.int64)
    ends = np.empty(count, dtype=np.int64)
    pos = 0

    def varint() -> int:
        nonlocal pos
        value = 0
        shift = 0
        start = pos
        while True:
            if pos >= size:
                raise ValueError(f"truncated varint at offset {start}")
            byte = data[pos]
            pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise ValueError(f"varint too long at offset {start}")

    doc = 0
    p = 0
    for i in range(count):
        delta = varint()
        if i == 0 or delta:
            doc += delta
            p = varint()
        else:
            p += varint()
        ids[i] = doc
        ps[i] = p
        for j in range(ndist):
            dists[i, j] = _unzigzag(varint())
        ends[i] = pos
    return ids, ps, dists, ends


def _windows(pos, rank, md: int):
    """Yield ``(anchor index, {rank: [positions]})`` for every occurrence.

    Companions are occurrences within ``md`` words of the anchor (the anchor
    itself included) whose rank is not below the anchor's.
    """
    n = len(pos)
    lo = 0
    hi = 0
    for i in range(n):
        pf = int(pos[i])
        rf = int(rank[i])
        while pos[lo] < pf - md:
            lo += 1
        while hi < n and pos[hi] <= pf + md:
            hi += 1
        groups: dict[int, list[int]] = {}
        for j in range(lo, hi):
            r = int(rank[j])
            if r >= rf:
                groups.setdefault(r, []).append(int(pos[j]))
        yield i, groups


def triple_postings(pos, rank, md: int):
    """Three-component postings for one document.

    ``pos``/``rank`` list the document's indexed occurrences sorted by
    (position, rank). For an anchor occurrence of ``f`` and companion lemmas
    ``s <= t`` (ranks) with position lists ``Ss``/``St`` near the anchor, the
    lists are paired index-wise and the shorter one repeats its last element.
    Returns ``(f, s, t, p, d1, d2)`` arrays in generation order.
    """
    f_out: list[int] = []
    s_out: list[int] = []
    t_out: list[int] = []
    p_out: list[int] = []
    d1_out: list[int] = []
    d2_out: list[int] = []
    for i, groups in _windows(pos, rank, md):
        pf = int(pos[i])
        rf = int(rank[i])
        ranks = sorted(groups)
        for a, rs in enumerate(ranks):
            ss = groups[rs]
            for rt in ranks[a:]:
                st = groups[rt]
                ls = len(ss)
                lt = len(st)
                for k in range(max(ls, lt)):
                    f_out.append(rf)
                    s_out.append(rs)
                    t_out.append(rt)
                    p_out.append(pf)
                    d1_out.append(ss[min(k, ls - 1)] - pf)
                    d2_out.append(st[min(k, lt - 1)] - pf)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return tuple(map(as_arr, (f_out, s_out, t_out, p_out, d1_out, d2_out)))


def pair_postings(pos, rank, md: int):
    """Two-component postings for one document: every (w, v) pair in range."""
    w_out: list[int] = []
    v_out: list[int] = []
    p_out: list[int] = []
    d_out: list[int] = []
    for i, groups in _windows(pos, rank, md):
        pw = int(pos[i])
        rw = int(rank[i])
        for rv in sorted(groups):
            for pv in groups[rv]:
                w_out.append(rw)
                v_out.append(rv)
                p_out.append(pw)
                d_out.append(pv - pw)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return tuple(map(as_arr, (w_out, v_out, p_out, d_out)))


def fill_lists(ps, dists, capacity: int, starred):
    """Project one document's postings onto per-slot position lists.

    Slot 0 takes P directly; slot ``j > 0`` takes ``P + dists[:, j-1]`` through
    a :class:`BoundedMinHeap`. Starred slots produce ``None``.
    Returns ``(lists, heap_ops, max_heap_len)``.
    """
    k = dists.shape[1]
    lists: list = [None] * (k + 1)
    heap_ops = 0
    max_len = 0
    if not starred[0]:
        lists[0] = np.asarray(ps, dtype=np.int64).copy()
    for j in range(1, k + 1):
        if starred[j]:
            continue
        heap = BoundedMinHeap(capacity)
        out: list[int] = []
        col = dists[:, j - 1]
        for i in range(len(ps)):
            out.extend(heap.push(int(ps[i]) + int(col[i])))
        out.extend(heap.drain())
        lists[j] = np.asarray(out, dtype=np.int64)
        heap_ops += heap.ops
        max_len = max(max_len, heap.max_len)
    return lists, heap_ops, max_len


def search_document(lists, emit_final: bool = True):
    """Sweep sorted position lists and report (S, E) windows.

    Each round takes S from the list with the smallest current value and E from
    the largest (ties to the lowest ordinal), then advances the minimum list and
    reports (S, E) if its new value overtakes E. When the minimum list runs out
    the loop stops, reporting the last window if ``emit_final``.
    """
    m = len(lists)
    starts: list[int] = []
    ends: list[int] = []
    if m == 0 or any(len(x) == 0 for x in lists):
        return np.asarray(starts, dtype=np.int64), np.asarray(ends, dtype=np.int64)
    idx = [0] * m
    vals = [int(x[0]) for x in lists]
    while True:
        lo = 0
        hi = 0
        for j in range(1, m):
            if vals[j] < vals[lo]:
                lo = j
            if vals[j] > vals[hi]:
                hi = j
        s = vals[lo]
        e = vals[hi]
        if idx[lo] + 1 >= len(lists[lo]):
            if emit_final:
                starts.append(s)
                ends.append(e)
            break
        idx[lo] += 1
        vals[lo] = int(lists[lo][idx[lo]])
        if vals[lo] > e:
            starts.append(s)
            ends.append(e)
    return np.asarray(starts, dtype=np.int64), np.asarray(ends, dtype=np.int64)
