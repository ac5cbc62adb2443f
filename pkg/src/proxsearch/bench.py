"""Synthetic Zipf corpora, stop-lemma query sets and engine comparisons."""

from __future__ import annotations

import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .index.reader import Index
from .lexicon import FLList, LemmaClass, LexiconConfig, classify
from .query.engine import QueryConfig, evaluate_query


@dataclass(frozen=True)
class CorpusSpec:
    doc_count: int = 2000
    words_per_doc: tuple[int, int] = (1000, 5000)
    vocab_size: int = 20000
    zipf_exponent: float = 1.0
    rng_seed: int = 42

    def __post_init__(self):
        lo, hi = self.words_per_doc
        if self.doc_count < 0 or lo < 0 or hi < lo or self.vocab_size < 1 or self.zipf_exponent <= 0:
            raise ValueError(f"invalid corpus spec: {self}")

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusSpec":
        d = dict(d)
        if "words_per_doc" in d:
            d["words_per_doc"] = tuple(d["words_per_doc"])
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "CorpusSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def vocabulary(size: int) -> np.ndarray:
    width = len(str(size - 1))
    return np.array([f"w{i:0{width}d}" for i in range(size)])


def zipf_cdf(size: int, exponent: float) -> np.ndarray:
    weights = 1.0 / np.arange(1, size + 1, dtype=np.float64) ** exponent
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def generate_corpus(spec: CorpusSpec = CorpusSpec()) -> list[str]:
    """Documents of i.i.d. Zipf-distributed words ``w<rank>`` (rank 0 most frequent)."""
    rng = np.random.default_rng(spec.rng_seed)
    vocab = vocabulary(spec.vocab_size)
    cdf = zipf_cdf(spec.vocab_size, spec.zipf_exponent)
    lo, hi = spec.words_per_doc
    docs = []
    for n in rng.integers(lo, hi + 1, size=spec.doc_count):
        ranks = np.searchsorted(cdf, rng.random(int(n)), side="right")
        docs.append(" ".join(vocab[np.minimum(ranks, spec.vocab_size - 1)].tolist()))
    return docs


def zipf_slope(counts: Sequence[int]) -> float:
    """Least-squares slope of log(frequency) against log(rank) over non-zero counts."""
    c = np.sort(np.asarray(counts, dtype=np.float64))[::-1]
    c = c[c > 0]
    ranks = np.arange(1, len(c) + 1)
    return float(np.polyfit(np.log(ranks), np.log(c), 1)[0])


def generate_queries(fl: FLList, cfg: LexiconConfig, count: int,
                     length_range: tuple[int, int] = (3, 5), seed: int = 0) -> list[list[str]]:
    """Queries of uniform length whose lemmas are stop lemmas drawn by corpus frequency."""
    stop = [lid for lid in fl.by_rank() if classify(fl.rank(lid), cfg) is LemmaClass.STOP]
    if not stop:
        raise ValueError("the lexicon has no stop lemmas")
    weights = np.array([max(fl.counts[lid], 0) for lid in stop], dtype=np.float64)
    p = weights / weights.sum() if weights.sum() > 0 else None
    rng = np.random.default_rng(seed)
    lo, hi = length_range
    queries = []
    for _ in range(count):
        m = int(rng.integers(lo, hi + 1))
        picks = rng.choice(len(stop), size=m, p=p)
        queries.append([fl.text_of(stop[i]) for i in picks])
    return queries


class BenchMismatch(AssertionError):
    def __init__(self, query, engines):
        super().__init__(f"engines {engines[0]} and {engines[1]} disagree on query {' '.join(query)!r}")
        self.query = query
        self.engines = engines


@dataclass
class EngineStats:
    mean_wall_time: float
    mean_postings_read: float
    mean_bytes_read: float
    mean_heap_ops: float
    total_fragments: int


@dataclass
class BenchReport:
    query_count: int
    engines: dict[str, EngineStats]
    config: dict = field(default_factory=dict)
    per_query: list[dict] = field(default_factory=list)

    def as_dict(self, include_queries: bool = False) -> dict:
        d = {"query_count": self.query_count, "config": self.config,
             "engines": {k: asdict(v) for k, v in self.engines.items()}}
        if include_queries:
            d["per_query"] = self.per_query
        return d

    def to_json(self, include_queries: bool = False) -> str:
        return json.dumps(self.as_dict(include_queries), indent=2, sort_keys=True)

    def table(self) -> str:
        rows = [("engine", "queries", "postings", "bytes", "heap ops", "ms/query")]
        for name, s in self.engines.items():
            rows.append((name, str(self.query_count), f"{s.mean_postings_read:.1f}",
                         f"{s.mean_bytes_read:.1f}", f"{s.mean_heap_ops:.1f}",
                         f"{s.mean_wall_time * 1000:.2f}"))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths)))
                         for r in rows)


def run_benchmark(index: Index, queries: Sequence[Sequence[str]],
                  engines: Sequence[str] = ("ordinary", "pair", "triple"),
                  config: dict | None = None, workers: int = 1) -> BenchReport:
    """Run every query through every engine, checking that all engines agree."""

    def one(query):
        row = {"query": " ".join(query)}
        results = {}
        for eng in engines:
            res = evaluate_query(list(query), index, QueryConfig(engine=eng))
            results[eng] = res.results
            row[eng] = {"postings_read": res.metrics.postings_read, "bytes_read": res.metrics.bytes_read,
                        "heap_ops": res.metrics.heap_ops, "wall_time": res.metrics.wall_time,
                        "fragments": len(res.results)}
        ref = engines[0]
        for eng in engines[1:]:
            if results[eng] != results[ref]:
                raise BenchMismatch(list(query), (ref, eng))
        return row

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, queries))
    else:
        rows = [one(q) for q in queries]
    stats = {}
    for eng in engines:
        col = [r[eng] for r in rows]
        mean = (lambda k: statistics.fmean(c[k] for c in col)) if col else (lambda k: 0.0)
        stats[eng] = EngineStats(mean("wall_time"), mean("postings_read"), mean("bytes_read"),
                                 mean("heap_ops"), sum(c["fragments"] for c in col))
    return BenchReport(len(rows), stats, dict(config or {}), rows)
