"""Brute-force reference search straight from document text.

No index files are read: each selected key's postings are regenerated from
token positions, projected, sorted with ``sorted`` instead of a heap, and fed
to the same window sweep and filters as the engine.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections import defaultdict
from typing import Sequence

import numpy as np

from ..kernels import pure
from ..lexicon import Dictionary, FLList, analyze
from .engine import ResultSet, canonical_windows
from .keys import Subquery, select_keys


class OracleCorpus:
    """Per-document lemma id -> ascending positions."""

    def __init__(self, documents: Sequence[str], fl: FLList, dictionary: Dictionary | None = None):
        self.docs: list[dict[int, list[int]]] = []
        for text in documents:
            occ: dict[int, list[int]] = defaultdict(list)
            for lemma, pos in analyze(text, dictionary):
                lid = fl.id_of(lemma)
                if lid is not None:
                    occ[lid].append(pos)
            self.docs.append(dict(occ))

    def __len__(self) -> int:
        return len(self.docs)


def key_postings(occ: dict[int, list[int]], key: Sequence[int], max_distance: int):
    """Postings ``(P, d1, ...)`` of one key in one document, by direct scan."""
    first = occ.get(key[0], [])
    rest = [occ.get(c, []) for c in key[1:]]
    out = []
    for pf in first:
        near = [ps[bisect_left(ps, pf - max_distance):bisect_right(ps, pf + max_distance)] for ps in rest]
        if any(not n for n in near):
            continue
        for k in range(max((len(n) for n in near), default=1)):
            out.append((pf,) + tuple(n[min(k, len(n) - 1)] - pf for n in near))
    return sorted(out)


def brute_force_search(sub: Subquery, corpus: OracleCorpus | Sequence[str], fl: FLList,
                       max_distance: int, arity: int = 3, emit_final: bool = True,
                       dictionary: Dictionary | None = None) -> ResultSet:
    """Reference result for a subquery using ``arity``-component keys."""
    if not isinstance(corpus, OracleCorpus):
        corpus = OracleCorpus(corpus, fl, dictionary)
    m = len(sub)
    if min(sub.lemmas, default=0) < 0:
        return ResultSet()
    if arity == 1:
        selected = [((lid,), (o,), (False,)) for o, lid in enumerate(sub.lemmas)]
    else:
        selected = [(sk.key, sk.bindings, sk.starred) for sk in select_keys(sub.lemmas, fl, arity)]
    fragments = []
    needed = set(sub.lemmas)
    for did, occ in enumerate(corpus.docs):
        if not needed.issubset(occ.keys()):
            continue
        lists: list = [None] * m
        for key, bindings, starred in selected:
            postings = key_postings(occ, key, max_distance)
            if not postings:
                break
            for j, ordinal in enumerate(bindings):
                if not starred[j]:
                    proj = [p[0] + (p[j] if j else 0) for p in postings]
                    lists[ordinal] = np.asarray(sorted(proj), dtype=np.int64)
        else:
            starts, ends = pure.search_document(lists, emit_final)
            starts, ends = canonical_windows(starts, ends, max_distance)
            fragments.extend((did, s, e) for s, e in zip(starts.tolist(), ends.tolist()))
    return ResultSet(fragments)
