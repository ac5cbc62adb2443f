"""Index construction for the ordinary, pair and triple families."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .. import kernels
from ..lexicon import Dictionary, FLList, _WORD, build_fl_list, lemmatize
from .format import FORMAT_VERSION, KEY_LIMIT, pack_keys, unpack_keys, write_posting_file
from .repository import write_repository

log = logging.getLogger(__name__)

FAMILIES = ("ordinary", "pair", "triple")
FAMILY_FILES = {"ordinary": "ordinary.idx", "pair": "pairs.idx", "triple": "triples.idx"}
ARITY = {"ordinary": 1, "pair": 2, "triple": 3}
MAX_DOC_WORDS = 2**32


class IndexBuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class IndexConfig:
    max_distance: int = 5
    sw_count: int = 700
    fu_count: int = 2100
    families: tuple[str, ...] = FAMILIES
    min_count: int = 1
    batch_size: int = 128
    threads: int = 1

    def __post_init__(self):
        if self.max_distance < 1:
            raise ValueError("max_distance must be at least 1")
        if self.sw_count < 0 or self.fu_count < 0:
            raise ValueError("sw_count and fu_count must be non-negative")
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown index families: {sorted(unknown)}")
        if self.batch_size < 1 or self.threads < 1:
            raise ValueError("batch_size and threads must be positive")


def _varint_len(values: np.ndarray) -> np.ndarray:
    n = np.ones(len(values), dtype=np.int64)
    v = values >> 7
    while np.any(v):
        n += v > 0
        v >>= 7
    return n


MERGE_CHUNK = 1 << 21  # segments merged at a time


@dataclass
class _Run:
    keys: np.ndarray      # packed key of every segment
    start: np.ndarray     # byte offset of every segment in the shared blob
    size: np.ndarray      # byte length of every segment
    counts: np.ndarray
    first: np.ndarray     # first and last doc ID of every segment
    last: np.ndarray


@dataclass
class _Runs:
    """Sorted, encoded runs of one family (one run per document batch)."""

    arity: int
    runs: list[_Run] = field(default_factory=list)
    blob: bytearray = field(default_factory=bytearray)

    def add(self, keys, docs, ps, dists) -> None:
        if not len(keys):
            return
        # generation order is already (doc, P, offsets) inside every key
        order = np.argsort(keys, kind="stable")
        keys, docs, ps, dists = keys[order], docs[order], ps[order], dists[order]
        starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
        bounds = np.r_[starts, len(keys)]
        blob, offs = kernels.encode_groups(docs, ps, dists, bounds)
        base = len(self.blob)
        self.blob += blob
        self.runs.append(_Run(keys[starts], offs[:-1] + base, np.diff(offs).astype(np.uint32),
                              np.diff(bounds).astype(np.uint32), docs[starts].astype(np.uint32),
                              docs[bounds[1:] - 1].astype(np.uint32)))

    def _merge_range(self, lo, hi):
        parts = []
        for r in self.runs:
            a = 0 if lo is None else int(np.searchsorted(r.keys, lo))
            b = len(r.keys) if hi is None else int(np.searchsorted(r.keys, hi))
            if b > a:
                parts.append((r, slice(a, b)))
        if not parts:
            return None
        cat = lambda name: np.concatenate([getattr(r, name)[sl] for r, sl in parts])
        keys = cat("keys")
        # stable sort of concatenated sorted runs == k-way merge keeping run order
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        start = cat("start")[order]
        first = cat("first")[order].astype(np.int64)
        prev_last = np.r_[0, cat("last")[order][:-1]].astype(np.int64)
        new_key = np.r_[True, keys[1:] != keys[:-1]]
        heads = np.flatnonzero(new_key)
        new_head = np.where(new_key, -1, first - prev_last)
        out, seg = kernels.splice_segments(self.blob, start, start + cat("size")[order],
                                           _varint_len(first), new_head)
        offsets = seg[heads]
        counts = np.add.reduceat(cat("counts")[order].astype(np.int64), heads)
        return keys[heads], offsets, np.diff(np.r_[offsets, seg[-1]]), counts, out

    def merge(self, sink):
        """Merge runs, writing posting blocks to ``sink``.

        Runs cover increasing document ranges, so a key's posting list is the
        concatenation of its run segments in run order; only the first ID of
        each later segment must be re-encoded as a delta. The key space is
        cut into ranges so only a slice of the segment table is live at once.
        Returns ``(lemmas, offsets, lengths, counts)``.
        """
        total = sum(len(r.keys) for r in self.runs)
        if not total:
            return np.zeros((0, self.arity), dtype=np.int64), *(np.zeros(0, dtype=np.int64),) * 3
        edges: list = [None, None]
        if total > MERGE_CHUNK:
            sample = np.sort(np.concatenate([r.keys[::64] for r in self.runs]))
            picks = np.linspace(0, len(sample), total // MERGE_CHUNK + 1, endpoint=False)[1:]
            edges = [None, *np.unique(sample[picks.astype(np.int64)]).tolist(), None]
        keys, offsets, lengths, counts = [], [], [], []
        written = 0
        for lo, hi in zip(edges[:-1], edges[1:]):
            merged = self._merge_range(lo, hi)
            if merged is None:
                continue
            k, o, n, c, out = merged
            keys.append(k)
            offsets.append(o + written)
            lengths.append(n)
            counts.append(c)
            sink.write(out)
            written += len(out)
        self.runs, self.blob = [], bytearray()
        return (unpack_keys(np.concatenate(keys), self.arity), np.concatenate(offsets),
                np.concatenate(lengths), np.concatenate(counts))


class _Analyzer:
    """Maps texts to (position, provisional lemma id) arrays."""

    def __init__(self, dictionary: Dictionary | None):
        self.dictionary = dictionary
        self.vocab: dict[str, int] = {}
        self.cache: dict[str, tuple[int, ...]] = {}

    def _ids(self, word: str) -> tuple[int, ...]:
        ids = self.cache.get(word)
        if ids is None:
            out = []
            for lemma in lemmatize(word, self.dictionary):
                lid = self.vocab.setdefault(lemma, len(self.vocab))
                if lid not in out:
                    out.append(lid)
            ids = self.cache[word] = tuple(out)
        return ids

    def __call__(self, text: str):
        pos: list[int] = []
        pid: list[int] = []
        n = 0
        for n, m in enumerate(_WORD.finditer(text), 1):
            for lid in self._ids(m.group().lower()):
                pos.append(n - 1)
                pid.append(lid)
        if n >= MAX_DOC_WORDS:
            raise IndexBuildError(f"document has {n} words; the limit is {MAX_DOC_WORDS - 1}")
        return np.asarray(pos, dtype=np.int64), np.asarray(pid, dtype=np.int64)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_index(documents: Sequence[str], out_dir: str | Path, cfg: IndexConfig = IndexConfig(),
                dictionary: Dictionary | None = None,
                fl_order: Iterable[str] | None = None, metadata: dict | None = None) -> dict:
    """Build every enabled family for ``documents`` (doc id = sequence index).

    ``fl_order`` pins the leading FL ranks, for fixtures that need a
    particular key normalization; ``metadata`` is stored verbatim in the
    manifest. Returns the manifest.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    analyzer = _Analyzer(dictionary)
    docs = [analyzer(text) for text in documents]
    vocab = analyzer.vocab

    counts_by_pid = np.bincount(np.concatenate([p for _, p in docs]) if docs else np.zeros(0, np.int64),
                                minlength=len(vocab))
    texts_by_pid = sorted(vocab, key=vocab.__getitem__)
    fl = build_fl_list({t: int(counts_by_pid[i]) for i, t in enumerate(texts_by_pid)},
                       cfg.min_count, order=fl_order)
    remap = np.array([fl.id_of(t) for t in texts_by_pid], dtype=np.int64)
    rank_of_id = np.array([fl.rank(i) for i in range(len(fl))], dtype=np.int64)
    id_by_rank = np.full(min(cfg.sw_count, len(fl)), -1, dtype=np.int64)
    for lid, r in fl.ranks.items():
        if r < len(id_by_rank):
            id_by_rank[r] = lid
    if len(id_by_rank) and id_by_rank.max() >= KEY_LIMIT:
        raise IndexBuildError("too many lemmas for packed multi-component keys")

    for i, (pos, pid) in enumerate(docs):
        ids = remap[pid]
        order = np.lexsort((ids, pos))
        docs[i] = (pos[order], ids[order])

    families = [f for f in FAMILIES if f in cfg.families]
    runs = {f: _Runs(ARITY[f]) for f in families}
    md = cfg.max_distance

    def generate(item):
        did, (pos, ids) = item
        produced = {}
        if "ordinary" in runs:
            produced["ordinary"] = (ids, pos, np.zeros((len(pos), 0), dtype=np.int64))
        stop = rank_of_id[ids] < cfg.sw_count
        spos, srank = pos[stop], rank_of_id[ids[stop]]
        if "pair" in runs:
            w, v, p, d = kernels.pair_postings(spos, srank, md)
            produced["pair"] = (pack_keys(np.stack([id_by_rank[w], id_by_rank[v]], axis=1)),
                                p, d[:, None])
        if "triple" in runs:
            f, s, t, p, d1, d2 = kernels.triple_postings(spos, srank, md)
            produced["triple"] = (pack_keys(np.stack([id_by_rank[f], id_by_rank[s], id_by_rank[t]], axis=1)),
                                  p, np.stack([d1, d2], axis=1))
        return did, produced

    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        for b0 in range(0, len(docs), cfg.batch_size):
            batch = list(enumerate(docs[b0:b0 + cfg.batch_size], start=b0))
            results = list(pool.map(generate, batch) if pool else map(generate, batch))
            for fam in families:
                parts = [(did, r[fam]) for did, r in results if len(r[fam][0])]
                if not parts:
                    continue
                keys = np.concatenate([k for _, (k, _, _) in parts])
                dids = np.concatenate([np.full(len(k), did, dtype=np.int64) for did, (k, _, _) in parts])
                ps = np.concatenate([p for _, (_, p, _) in parts])
                dists = np.concatenate([d for _, (_, _, d) in parts])
                if fam == "ordinary":
                    keys = pack_keys(keys[:, None])
                runs[fam].add(keys, dids, ps, dists)
            log.debug("indexed documents %d..%d", b0, b0 + len(batch) - 1)
    finally:
        if pool:
            pool.shutdown()

    files = {}
    for fam in families:
        name = FAMILY_FILES[fam]
        with tempfile.TemporaryFile(dir=out) as scratch:
            lemmas, offsets, lengths, counts = runs.pop(fam).merge(scratch)
            scratch.seek(0)
            write_posting_file(out / name, ARITY[fam], lemmas, offsets, lengths, counts, scratch)
        files[name] = {"keys": int(len(offsets)), "postings": int(counts.sum()) if len(counts) else 0}
    fl.save(out / "lexicon")
    write_repository(out / "docs.repo", documents)
    files["lexicon"] = {}
    files["docs.repo"] = {}
    if dictionary is not None:
        dictionary.dump(out / "dictionary.tsv")
        files["dictionary.tsv"] = {}
    for name, info in files.items():
        info["bytes"] = os.path.getsize(out / name)
        info["sha256"] = _sha256(out / name)

    manifest = {
        "format_version": FORMAT_VERSION,
        "max_distance": cfg.max_distance,
        "sw_count": cfg.sw_count,
        "fu_count": cfg.fu_count,
        "min_count": cfg.min_count,
        "doc_count": len(docs),
        "lemma_count": len(fl),
        "families": families,
        "files": files,
    }
    if metadata:
        manifest["metadata"] = metadata
    (out / "manifest").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest


def config_dict(cfg: IndexConfig) -> dict:
    d = asdict(cfg)
    d["families"] = list(cfg.families)
    return d
