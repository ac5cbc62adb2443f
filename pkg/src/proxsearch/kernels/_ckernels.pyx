# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_pykernels``; signatures and results match exactly."""

import numpy as np

from libc.stdint cimport int64_t, uint64_t, uint8_t
from libc.stdlib cimport malloc, free

BACKEND = "cython"
KEY_BITS = 21


cdef inline uint64_t _zigzag(int64_t v) noexcept nogil:
    return (<uint64_t>v << 1) ^ <uint64_t>(v >> 63)


cdef inline int64_t _unzigzag(uint64_t v) noexcept nogil:
    return <int64_t>(v >> 1) ^ -<int64_t>(v & 1)


cdef inline Py_ssize_t _put(uint8_t* out, Py_ssize_t at, uint64_t v) noexcept nogil:
    while v >= 0x80:
        out[at] = <uint8_t>((v & 0x7F) | 0x80)
        at += 1
        v >>= 7
    out[at] = <uint8_t>v
    return at + 1


def encode_groups(ids, ps, dists, starts):
    cdef const int64_t[::1] vid = np.ascontiguousarray(ids, dtype=np.int64)
    cdef const int64_t[::1] vp = np.ascontiguousarray(ps, dtype=np.int64)
    cdef const int64_t[:, ::1] vd = np.ascontiguousarray(dists, dtype=np.int64)
    cdef const int64_t[::1] vs = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t n = vid.shape[0]
    cdef Py_ssize_t k = vd.shape[1]
    cdef Py_ssize_t ng = vs.shape[0] - 1
    cdef Py_ssize_t g, i, j, at = 0
    cdef int64_t prev_id, prev_p, doc, p
    offsets = np.empty(ng + 1, dtype=np.int64)
    cdef int64_t[::1] vo = offsets
    cdef uint8_t* out = <uint8_t*>malloc(n * (2 + k) * 10 + 1)
    if out == NULL:
        raise MemoryError()
    try:
        with nogil:
            for g in range(ng):
                vo[g] = at
                prev_id = 0
                prev_p = 0
                for i in range(vs[g], vs[g + 1]):
                    doc = vid[i]
                    p = vp[i]
                    if i == vs[g] or doc != prev_id:
                        at = _put(out, at, <uint64_t>(doc - prev_id))
                        at = _put(out, at, <uint64_t>p)
                    else:
                        at = _put(out, at, 0)
                        at = _put(out, at, <uint64_t>(p - prev_p))
                    for j in range(k):
                        at = _put(out, at, _zigzag(vd[i, j]))
                    prev_id = doc
                    prev_p = p
            vo[ng] = at
        return bytes(out[:at]), offsets
    finally:
        free(out)


def encode_postings(ids, ps, dists):
    return encode_groups(ids, ps, dists, np.array([0, len(ids)], dtype=np.int64))[0]


def splice_segments(blob, src_start, src_end, head_len, new_head):
    cdef const uint8_t[::1] data = memoryview(blob).cast("B")
    cdef const int64_t[::1] vs = np.ascontiguousarray(src_start, dtype=np.int64)
    cdef const int64_t[::1] ve = np.ascontiguousarray(src_end, dtype=np.int64)
    cdef const int64_t[::1] vh = np.ascontiguousarray(head_len, dtype=np.int64)
    cdef const int64_t[::1] vn = np.ascontiguousarray(new_head, dtype=np.int64)
    cdef Py_ssize_t n = vs.shape[0], i, a, c, at = 0, total = 0
    for i in range(n):
        total += ve[i] - vs[i] + 10
    offsets = np.empty(n + 1, dtype=np.int64)
    cdef int64_t[::1] vo = offsets
    cdef uint8_t* out = <uint8_t*>malloc(total + 1)
    if out == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                vo[i] = at
                a = vs[i]
                if vn[i] >= 0:
                    at = _put(out, at, <uint64_t>vn[i])
                    a += vh[i]
                for c in range(a, ve[i]):
                    out[at] = data[c]
                    at += 1
            vo[n] = at
        return bytes(out[:at]), offsets
    finally:
        free(out)


def decode_postings(buf, Py_ssize_t count, Py_ssize_t ndist):
    cdef const uint8_t[::1] data = memoryview(buf).cast("B")
    cdef Py_ssize_t size = data.shape[0]
    ids = np.empty(count, dtype=np.int64)
    ps = np.empty(count, dtype=np.int64)
    dists = np.empty((count, ndist), dtype=np.int64)
    ends = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] vid = ids, vp = ps, ve = ends
    cdef int64_t[:, ::1] vd = dists
    cdef Py_ssize_t i, j, pos = 0, start = 0, nf
    cdef uint64_t value, delta
    cdef int shift
    cdef uint8_t byte
    cdef int64_t doc = 0, p = 0
    cdef Py_ssize_t fail = -1
    cdef int too_long = 0
    cdef uint64_t fields[4]
    with nogil:
        for i in range(count):
            nf = 0
            while nf < 2 + ndist:
                value = 0
                shift = 0
                start = pos
                while True:
                    if pos >= size:
                        fail = start
                        break
                    byte = data[pos]
                    pos += 1
                    value |= (<uint64_t>(byte & 0x7F)) << shift
                    if not byte & 0x80:
                        break
                    shift += 7
                    if shift > 63:
                        fail = start
                        too_long = 1
                        break
                if fail >= 0:
                    break
                fields[nf] = value
                nf += 1
            if fail >= 0:
                break
            delta = fields[0]
            if i == 0 or delta:
                doc += <int64_t>delta
                p = <int64_t>fields[1]
            else:
                p += <int64_t>fields[1]
            vid[i] = doc
            vp[i] = p
            for j in range(ndist):
                vd[i, j] = _unzigzag(fields[2 + j])
            ve[i] = pos
    if fail >= 0:
        if too_long:
            raise ValueError(f"varint too long at offset {fail}")
        raise ValueError(f"truncated varint at offset {fail}")
    return ids, ps, dists, ends


cdef Py_ssize_t _gather(const int64_t[::1] pos, const int64_t[::1] rank,
                        Py_ssize_t lo, Py_ssize_t hi, int64_t rf,
                        int64_t* grank, int64_t* gpos) noexcept nogil:
    """Copy eligible window entries sorted by (rank, position)."""
    cdef Py_ssize_t j, a, cnt = 0
    cdef int64_t r, q
    for j in range(lo, hi):
        r = rank[j]
        if r < rf:
            continue
        q = pos[j]
        a = cnt
        while a > 0 and (grank[a - 1] > r or (grank[a - 1] == r and gpos[a - 1] > q)):
            grank[a] = grank[a - 1]
            gpos[a] = gpos[a - 1]
            a -= 1
        grank[a] = r
        gpos[a] = q
        cnt += 1
    return cnt


cdef Py_ssize_t _triples(const int64_t[::1] pos, const int64_t[::1] rank, int64_t md,
                         int64_t* grank, int64_t* gpos, Py_ssize_t* gstart,
                         int64_t[:, ::1] out, bint write) noexcept nogil:
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j, lo = 0, hi = 0, cnt, ng, a, b, k, ls, lt, sa, sb, total = 0
    cdef int64_t pf, rf
    for i in range(n):
        pf = pos[i]
        rf = rank[i]
        while pos[lo] < pf - md:
            lo += 1
        while hi < n and pos[hi] <= pf + md:
            hi += 1
        cnt = _gather(pos, rank, lo, hi, rf, grank, gpos)
        ng = 0
        for a in range(cnt):
            if a == 0 or grank[a] != grank[a - 1]:
                gstart[ng] = a
                ng += 1
        gstart[ng] = cnt
        for a in range(ng):
            sa = gstart[a]
            ls = gstart[a + 1] - sa
            for b in range(a, ng):
                sb = gstart[b]
                lt = gstart[b + 1] - sb
                k = ls if ls > lt else lt
                if write:
                    for j in range(k):
                        out[total + j, 0] = rf
                        out[total + j, 1] = grank[sa]
                        out[total + j, 2] = grank[sb]
                        out[total + j, 3] = pf
                        out[total + j, 4] = gpos[sa + (j if j < ls else ls - 1)] - pf
                        out[total + j, 5] = gpos[sb + (j if j < lt else lt - 1)] - pf
                total += k
    return total


cdef Py_ssize_t _pairs(const int64_t[::1] pos, const int64_t[::1] rank, int64_t md,
                       int64_t* grank, int64_t* gpos,
                       int64_t[:, ::1] out, bint write) noexcept nogil:
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t i, j, lo = 0, hi = 0, cnt, total = 0
    cdef int64_t pf, rf
    for i in range(n):
        pf = pos[i]
        rf = rank[i]
        while pos[lo] < pf - md:
            lo += 1
        while hi < n and pos[hi] <= pf + md:
            hi += 1
        cnt = _gather(pos, rank, lo, hi, rf, grank, gpos)
        if write:
            for j in range(cnt):
                out[total + j, 0] = rf
                out[total + j, 1] = grank[j]
                out[total + j, 2] = pf
                out[total + j, 3] = gpos[j] - pf
        total += cnt
    return total


def triple_postings(pos, rank, int64_t md):
    cdef const int64_t[::1] vpos = np.ascontiguousarray(pos, dtype=np.int64)
    cdef const int64_t[::1] vrank = np.ascontiguousarray(rank, dtype=np.int64)
    cdef Py_ssize_t n = vpos.shape[0]
    cdef int64_t* grank = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* gpos = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef Py_ssize_t* gstart = <Py_ssize_t*>malloc((n + 2) * sizeof(Py_ssize_t))
    cdef Py_ssize_t total
    cdef int64_t[:, ::1] vout
    if grank == NULL or gpos == NULL or gstart == NULL:
        free(grank); free(gpos); free(gstart)
        raise MemoryError()
    try:
        out = np.empty((0, 6), dtype=np.int64)
        vout = out
        with nogil:
            total = _triples(vpos, vrank, md, grank, gpos, gstart, vout, False)
        out = np.empty((total, 6), dtype=np.int64)
        vout = out
        with nogil:
            _triples(vpos, vrank, md, grank, gpos, gstart, vout, True)
    finally:
        free(grank); free(gpos); free(gstart)
    return tuple(np.ascontiguousarray(out[:, c]) for c in range(6))


def pair_postings(pos, rank, int64_t md):
    cdef const int64_t[::1] vpos = np.ascontiguousarray(pos, dtype=np.int64)
    cdef const int64_t[::1] vrank = np.ascontiguousarray(rank, dtype=np.int64)
    cdef Py_ssize_t n = vpos.shape[0]
    cdef int64_t* grank = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef int64_t* gpos = <int64_t*>malloc((n + 1) * sizeof(int64_t))
    cdef Py_ssize_t total
    cdef int64_t[:, ::1] vout
    if grank == NULL or gpos == NULL:
        free(grank); free(gpos)
        raise MemoryError()
    try:
        out = np.empty((0, 4), dtype=np.int64)
        vout = out
        with nogil:
            total = _pairs(vpos, vrank, md, grank, gpos, vout, False)
        out = np.empty((total, 4), dtype=np.int64)
        vout = out
        with nogil:
            _pairs(vpos, vrank, md, grank, gpos, vout, True)
    finally:
        free(grank); free(gpos)
    return tuple(np.ascontiguousarray(out[:, c]) for c in range(4))


cdef struct Heap:
    int64_t* val
    int64_t* cnt
    Py_ssize_t size
    Py_ssize_t cap
    Py_ssize_t ops
    Py_ssize_t max_len


cdef inline void _swap(Heap* h, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef int64_t tv = h.val[a], tc = h.cnt[a]
    h.val[a] = h.val[b]
    h.cnt[a] = h.cnt[b]
    h.val[b] = tv
    h.cnt[b] = tc


cdef Py_ssize_t _pop(Heap* h, int64_t* out, Py_ssize_t at) noexcept nogil:
    cdef int64_t v = h.val[0], c = h.cnt[0]
    cdef Py_ssize_t i = 0, l, r, m
    h.ops += 1
    h.size -= 1
    h.val[0] = h.val[h.size]
    h.cnt[0] = h.cnt[h.size]
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < h.size and h.val[l] < h.val[m]:
            m = l
        if r < h.size and h.val[r] < h.val[m]:
            m = r
        if m == i:
            break
        _swap(h, i, m)
        i = m
    while c > 0:
        out[at] = v
        at += 1
        c -= 1
    return at


cdef Py_ssize_t _push(Heap* h, int64_t v, int64_t* out, Py_ssize_t at) noexcept nogil:
    cdef Py_ssize_t i, parent
    h.ops += 1
    for i in range(h.size):
        if h.val[i] == v:
            h.cnt[i] += 1
            return at
    i = h.size
    h.val[i] = v
    h.cnt[i] = 1
    h.size += 1
    while i > 0:
        parent = (i - 1) // 2
        if h.val[parent] <= h.val[i]:
            break
        _swap(h, i, parent)
        i = parent
    if h.size > h.cap:
        return _pop(h, out, at)
    if h.size > h.max_len:
        h.max_len = h.size
    return at


def fill_lists(ps, dists, Py_ssize_t capacity, starred):
    cdef const int64_t[::1] vp = np.ascontiguousarray(ps, dtype=np.int64)
    cdef const int64_t[:, ::1] vd = np.ascontiguousarray(dists, dtype=np.int64)
    cdef Py_ssize_t n = vp.shape[0], k = vd.shape[1], i, j, at
    cdef Py_ssize_t heap_ops = 0, max_len = 0
    cdef Heap h
    cdef int64_t[::1] vo
    if capacity < 1:
        raise ValueError("capacity must be positive")
    lists = [None] * (k + 1)
    if not starred[0]:
        lists[0] = np.array(vp, dtype=np.int64)
    h.val = <int64_t*>malloc((capacity + 1) * sizeof(int64_t))
    h.cnt = <int64_t*>malloc((capacity + 1) * sizeof(int64_t))
    if h.val == NULL or h.cnt == NULL:
        free(h.val); free(h.cnt)
        raise MemoryError()
    try:
        for j in range(1, k + 1):
            if starred[j]:
                continue
            out = np.empty(n, dtype=np.int64)
            vo = out
            h.size = 0
            h.cap = capacity
            h.ops = 0
            h.max_len = 0
            at = 0
            with nogil:
                for i in range(n):
                    at = _push(&h, vp[i] + vd[i, j - 1], &vo[0], at)
                while h.size > 0:
                    at = _pop(&h, &vo[0], at)
            lists[j] = out
            heap_ops += h.ops
            if h.max_len > max_len:
                max_len = h.max_len
    finally:
        free(h.val); free(h.cnt)
    return lists, heap_ops, max_len


def search_document(lists, bint emit_final=True):
    cdef Py_ssize_t m = len(lists), j, lo, hi, nout = 0, total = 0
    cdef int64_t s, e
    if m == 0 or any(len(x) == 0 for x in lists):
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    arrays = [np.ascontiguousarray(x, dtype=np.int64) for x in lists]
    for x in arrays:
        total += len(x)
    cdef int64_t** data = <int64_t**>malloc(m * sizeof(int64_t*))
    cdef Py_ssize_t* lens = <Py_ssize_t*>malloc(m * sizeof(Py_ssize_t))
    cdef Py_ssize_t* idx = <Py_ssize_t*>malloc(m * sizeof(Py_ssize_t))
    cdef int64_t* vals = <int64_t*>malloc(m * sizeof(int64_t))
    cdef int64_t[::1] view
    starts = np.empty(total + 1, dtype=np.int64)
    ends = np.empty(total + 1, dtype=np.int64)
    cdef int64_t[::1] vs = starts, ve = ends
    try:
        for j in range(m):
            view = arrays[j]
            data[j] = &view[0]
            lens[j] = view.shape[0]
            idx[j] = 0
            vals[j] = data[j][0]
        with nogil:
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
                if idx[lo] + 1 >= lens[lo]:
                    if emit_final:
                        vs[nout] = s
                        ve[nout] = e
                        nout += 1
                    break
                idx[lo] += 1
                vals[lo] = data[lo][idx[lo]]
                if vals[lo] > e:
                    vs[nout] = s
                    ve[nout] = e
                    nout += 1
    finally:
        free(data); free(lens); free(idx); free(vals)
    return starts[:nout].copy(), ends[:nout].copy()
