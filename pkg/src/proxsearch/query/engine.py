"""Document-at-a-time evaluation over ordinary, pair and triple indexes."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .. import kernels
from ..index.reader import Index, PostingCursor
from ..lexicon import Dictionary, LemmaClass, LexiconConfig, classify
from ..metrics import Metrics
from .keys import (NotApplicable, QueryError, SelectedKey, Subquery, expand_query,
                   ordinary_keys, select_keys)

EXHAUSTED = 2**64 - 1
ENGINES = ("auto", "triple", "pair", "ordinary")


class Fragment(NamedTuple):
    did: int
    s: int
    e: int


class ResultSet:
    """Fragments sorted by (DID, S, E) without duplicates."""

    __slots__ = ("fragments",)

    def __init__(self, fragments: Iterable[tuple[int, int, int]] = ()):
        self.fragments = [Fragment(*f) for f in sorted(set(map(tuple, fragments)))]

    def __iter__(self):
        return iter(self.fragments)

    def __len__(self) -> int:
        return len(self.fragments)

    def __getitem__(self, i):
        return self.fragments[i]

    def __eq__(self, other) -> bool:
        if isinstance(other, ResultSet):
            return self.fragments == other.fragments
        return NotImplemented

    def __repr__(self) -> str:
        return f"ResultSet({self.fragments!r})"

    def union(self, *others: "ResultSet") -> "ResultSet":
        frags = list(self.fragments)
        for o in others:
            frags.extend(o.fragments)
        return ResultSet(frags)


@dataclass(frozen=True)
class QueryConfig:
    engine: str = "auto"
    emit_final_fragment: bool = True
    max_subqueries: int = 64

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")


@dataclass
class QueryResult:
    results: ResultSet
    metrics: Metrics
    paths: list[tuple[Subquery, str]] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)


def canonical_windows(starts: np.ndarray, ends: np.ndarray, max_distance: int):
    """Keep windows no wider than ``max_distance`` that contain no other window."""
    keep = ends - starts <= max_distance
    starts, ends = starts[keep], ends[keep]
    if len(starts) < 2:
        return starts, ends
    order = np.lexsort((ends, -starts))
    s, e = starts[order], ends[order]
    distinct = np.r_[True, (s[1:] != s[:-1]) | (e[1:] != e[:-1])]
    s, e = s[distinct], e[distinct]
    # walking S downwards, a window survives iff its E is below every E seen so far
    prev_min = np.r_[np.iinfo(np.int64).max, np.minimum.accumulate(e)[:-1]]
    keep = e < prev_min
    return s[keep][::-1], e[keep][::-1]


def equalize(cursors: Sequence[PostingCursor]) -> int | None:
    """Advance cursors until all sit on one document ID; None once any runs out."""
    for c in cursors:
        if c.i < 0:
            c.next()
        if c.exhausted:
            return None
    while True:
        target = max(c.doc for c in cursors)
        for c in cursors:
            if c.doc < target and not c.skip_to(target):
                return None
        if all(c.doc == target for c in cursors):
            return target


def fill_intermediate_lists(cursor: PostingCursor, did: int, starred: Sequence[bool],
                            max_distance: int, metrics: Metrics | None = None):
    """Consume the cursor's postings for ``did`` and build one sorted list per unstarred slot."""
    assert not cursor.exhausted and cursor.doc == did, "cursor not aligned on the document"
    ps, dists = cursor.take_document()
    lists, ops, max_len = kernels.fill_lists(ps, dists, 2 * max_distance, tuple(starred))
    if metrics is not None:
        metrics.heap_ops += ops
        metrics.max_heap_len = max(metrics.max_heap_len, max_len)
    return lists


def search_in_document(lists: Sequence[np.ndarray], emit_final: bool = True):
    """Run the window sweep over one document; returns ``[(S, E), ...]``."""
    starts, ends = kernels.search_document(list(lists), emit_final)
    return list(zip(starts.tolist(), ends.tolist()))


def _evaluate_keys(index: Index, family: str, selected: list[SelectedKey], m: int,
                   cfg: QueryConfig, metrics: Metrics) -> ResultSet:
    md = index.max_distance
    # one cursor per distinct key; its slot lists serve every selection of that key
    groups: dict[tuple[int, ...], list[SelectedKey]] = {}
    for sk in selected:
        groups.setdefault(sk.key, []).append(sk)
    if any(min(key) < 0 for key in groups):
        return ResultSet()
    cursors = {key: index.cursor(family, key, metrics) for key in groups}
    plan = []
    for key, sks in groups.items():
        arity = len(key)
        starred = tuple(all(sk.starred[j] for sk in sks) for j in range(arity))
        feeds = [(j, sk.bindings[j]) for sk in sks for j in range(arity) if not sk.starred[j]]
        plan.append((cursors[key], starred, feeds))
    order = list(cursors.values())
    fragments: list[tuple[int, int, int]] = []
    lists: list = [None] * m
    while True:
        did = equalize(order)
        if did is None:
            break
        for cursor, starred, feeds in plan:
            slot_lists = fill_intermediate_lists(cursor, did, starred, md, metrics)
            for j, ordinal in feeds:
                lists[ordinal] = slot_lists[j]
        starts, ends = kernels.search_document(lists, cfg.emit_final_fragment)
        starts, ends = canonical_windows(starts, ends, md)
        fragments.extend((did, s, e) for s, e in zip(starts.tolist(), ends.tolist()))
        for c in order:
            c.next()
    return ResultSet(fragments)


def _run(index, family, selected, sub, cfg, metrics):
    if family not in index.families:
        raise QueryError(f"index has no {family} family")
    t0 = time.perf_counter()
    local = Metrics(subquery_length=len(sub))
    rs = _evaluate_keys(index, family, selected, len(sub), cfg, local)
    local.wall_time = time.perf_counter() - t0
    if metrics is not None:
        metrics.merge(local)
    return rs


def evaluate_subquery(sub: Subquery, index: Index, cfg: QueryConfig = QueryConfig(),
                      metrics: Metrics | None = None) -> ResultSet:
    """Triple-key path; raises :class:`NotApplicable` for fewer than three lemmas."""
    return _run(index, "triple", select_keys(sub.lemmas, index.fl, 3), sub, cfg, metrics)


def evaluate_pair_path(sub: Subquery, index: Index, cfg: QueryConfig = QueryConfig(),
                       metrics: Metrics | None = None) -> ResultSet:
    """Pair-key path; raises :class:`NotApplicable` for fewer than two lemmas."""
    return _run(index, "pair", select_keys(sub.lemmas, index.fl, 2), sub, cfg, metrics)


def evaluate_ordinary(sub: Subquery, index: Index, cfg: QueryConfig = QueryConfig(),
                      metrics: Metrics | None = None) -> ResultSet:
    """Intersection over single-lemma posting lists feeding the same sweep."""
    return _run(index, "ordinary", ordinary_keys(sub.lemmas), sub, cfg, metrics)


def all_stop(sub: Subquery, index: Index) -> bool:
    cfg = LexiconConfig(index.sw_count, index.fu_count)
    return all(lid >= 0 and classify(index.fl.rank(lid), cfg) is LemmaClass.STOP
               for lid in sub.lemmas)


def choose_path(sub: Subquery, index: Index, engine: str) -> tuple[str, str | None]:
    """Return ``(path, notice)``; notice explains a fallback from a requested engine."""
    if engine == "ordinary":
        return "ordinary", None
    stop = all_stop(sub, index)
    m = len(sub)
    if engine == "auto":
        if stop and m >= 3 and "triple" in index.families:
            return "triple", None
        if stop and m >= 2 and "pair" in index.families:
            return "pair", None
        return "ordinary", None
    need = 3 if engine == "triple" else 2
    if engine not in index.families:
        raise QueryError(f"index has no {engine} family")
    if not stop:
        return "ordinary", (f"subquery {' '.join(sub.texts)!r} has non-stop lemmas; "
                            f"falling back from {engine} to ordinary")
    if m < need:
        path = "pair" if engine == "triple" and m == 2 else "ordinary"
        return path, f"subquery of length {m} is too short for {engine} keys; using {path}"
    return engine, None


_PATHS = {"triple": evaluate_subquery, "pair": evaluate_pair_path, "ordinary": evaluate_ordinary}


def evaluate_query(words, index: Index, cfg: QueryConfig = QueryConfig(),
                   dictionary: Dictionary | None = None) -> QueryResult:
    """Expand, dispatch every subquery, and merge the fragments."""
    t0 = time.perf_counter()
    dictionary = dictionary if dictionary is not None else index.dictionary
    subs = expand_query(words, dictionary, index.fl, cfg.max_subqueries)
    metrics = Metrics()
    result = QueryResult(ResultSet(), metrics)
    parts = []
    for sub in subs:
        path, notice = choose_path(sub, index, cfg.engine)
        if notice:
            result.notices.append(notice)
        result.paths.append((sub, path))
        try:
            parts.append(_PATHS[path](sub, index, cfg, metrics))
        except NotApplicable:
            parts.append(evaluate_ordinary(sub, index, cfg, metrics))
    result.results = ResultSet().union(*parts)
    metrics.wall_time = time.perf_counter() - t0
    return result
