"""Read-only access to a built index directory."""

from __future__ import annotations

import json
import mmap
import re
from pathlib import Path

import numpy as np

from .. import kernels
from ..lexicon import Dictionary, FLList
from ..metrics import Metrics
from .build import ARITY, FAMILY_FILES
from .format import FORMAT_VERSION, IndexFormatError, pack_keys, read_key_table
from .repository import DocumentRepository

_OFFSET = re.compile(r"offset (\d+)")
_EMPTY = np.zeros(0, dtype=np.int64)


class PostingCursor:
    """Forward cursor over one decoded posting list.

    The cursor starts before the first posting. Every posting it moves onto
    counts as read, including those passed over by :meth:`skip_to`, and adds
    its encoded size to ``metrics.bytes_read``.
    """

    def __init__(self, ids, ps, dists, ends, metrics: Metrics | None = None):
        self.ids = ids
        self.ps = ps
        self.dists = dists
        self.ends = ends
        self.metrics = metrics if metrics is not None else Metrics()
        self.i = -1
        self._n = len(ids)

    def __len__(self) -> int:
        return self._n

    def _move(self, j: int) -> None:
        # load postings i+1 .. j (clamped to the list)
        j = min(j, self._n)
        last = min(j, self._n - 1)
        if last > self.i:
            before = int(self.ends[self.i]) if self.i >= 0 else 0
            self.metrics.postings_read += last - self.i
            self.metrics.bytes_read += int(self.ends[last]) - before
        self.i = j

    @property
    def exhausted(self) -> bool:
        return self.i >= self._n

    @property
    def doc(self) -> int:
        return int(self.ids[self.i])

    @property
    def value(self) -> tuple[int, int, tuple[int, ...]]:
        i = self.i
        return int(self.ids[i]), int(self.ps[i]), tuple(int(d) for d in self.dists[i])

    def next(self) -> bool:
        """Advance one posting; False once the list is exhausted."""
        self._move(self.i + 1)
        return self.i < self._n

    def skip_to(self, did: int) -> bool:
        """Advance to the first posting with ID >= ``did``."""
        if self.i >= 0 and (self.exhausted or self.ids[self.i] >= did):
            return not self.exhausted
        j = int(np.searchsorted(self.ids, did, side="left"))
        self._move(max(j, self.i + 1))
        return not self.exhausted

    def take_document(self):
        """Read every posting of the current document; returns ``(ps, dists)``.

        The cursor is left on the document's last posting.
        """
        i = self.i
        k = int(np.searchsorted(self.ids, self.ids[i], side="right"))
        self._move(k - 1)
        return self.ps[i:k], self.dists[i:k]


class FamilyReader:
    """One memory-mapped posting file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        with open(self.path, "rb") as fh:
            self._mm = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
        self.arity, self.table, self.postings_offset = read_key_table(self._mm, self.path)
        self.ndist = self.arity - 1
        self.packed = pack_keys(self.table["lemma"].astype(np.int64)) if len(self.table) else _EMPTY
        if len(self.packed) > 1 and np.any(self.packed[1:] <= self.packed[:-1]):
            raise IndexFormatError("key table is not sorted", 0, self.path)

    def __len__(self) -> int:
        return len(self.table)

    @property
    def posting_count(self) -> int:
        return int(self.table["count"].sum()) if len(self.table) else 0

    def lookup(self, key) -> int | None:
        if len(key) != self.arity or len(self.packed) == 0:
            return None
        if min(key) < 0:
            return None
        try:
            packed = int(pack_keys(np.asarray([key], dtype=np.int64))[0])
        except ValueError:
            return None
        j = int(np.searchsorted(self.packed, packed))
        if j < len(self.packed) and self.packed[j] == packed:
            return j
        return None

    def decode(self, j: int):
        entry = self.table[j]
        start = self.postings_offset + int(entry["offset"])
        length = int(entry["length"])
        block = memoryview(self._mm)[start:start + length]
        try:
            ids, ps, dists, ends = kernels.decode_postings(block, int(entry["count"]), self.ndist)
        except ValueError as exc:
            m = _OFFSET.search(str(exc))
            rel = int(m.group(1)) if m else 0
            raise IndexFormatError(f"corrupt posting list: {exc}", start + rel, self.path) from None
        finally:
            block.release()
        if len(ends) and ends[-1] != length:
            raise IndexFormatError("posting block length mismatch", start, self.path)
        if len(ids) > 1 and np.any(np.diff(ids) < 0):
            raise IndexFormatError("posting IDs out of order", start, self.path)
        return ids, ps, dists, ends

    def cursor(self, key, metrics: Metrics | None = None) -> PostingCursor:
        j = self.lookup(key)
        if j is None:
            return PostingCursor(_EMPTY, _EMPTY, np.zeros((0, self.ndist), np.int64), _EMPTY, metrics)
        return PostingCursor(*self.decode(j), metrics)

    def keys(self):
        for j in range(len(self.table)):
            yield tuple(int(x) for x in self.table[j]["lemma"])

    def close(self) -> None:
        self.table = self.packed = None
        try:
            self._mm.close()
        except BufferError:
            # arrays handed out earlier still view the mapping; it is
            # released when they are collected
            pass


class Index:
    """An opened index directory."""

    def __init__(self, path, manifest, fl, families, repo, dictionary):
        self.path = path
        self.manifest = manifest
        self.fl = fl
        self.families = families
        self.repo = repo
        self.dictionary = dictionary

    @property
    def max_distance(self) -> int:
        return int(self.manifest["max_distance"])

    @property
    def sw_count(self) -> int:
        return int(self.manifest["sw_count"])

    @property
    def fu_count(self) -> int:
        return int(self.manifest["fu_count"])

    @property
    def doc_count(self) -> int:
        return int(self.manifest["doc_count"])

    @classmethod
    def open(cls, path: str | Path) -> "Index":
        path = Path(path)
        mpath = path / "manifest"
        try:
            manifest = json.loads(mpath.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise IndexFormatError("no index manifest found", None, mpath) from None
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise IndexFormatError(f"unreadable manifest: {exc}", getattr(exc, "pos", None), mpath) from None
        if manifest.get("format_version") != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported format version {manifest.get('format_version')}", None, mpath)
        for name in manifest.get("files", {}):
            if not (path / name).exists():
                raise IndexFormatError(f"missing index file {name}", None, path / name)
        fl = FLList.load(path / "lexicon")
        families = {}
        for fam in manifest["families"]:
            reader = FamilyReader(path / FAMILY_FILES[fam])
            if reader.arity != ARITY[fam]:
                raise IndexFormatError(f"{fam} file has arity {reader.arity}", 6, reader.path)
            families[fam] = reader
        dictionary = Dictionary.load(path / "dictionary.tsv") if (path / "dictionary.tsv").exists() else None
        return cls(path, manifest, fl, families, DocumentRepository(path / "docs.repo"), dictionary)

    def cursor(self, family: str, key, metrics: Metrics | None = None) -> PostingCursor:
        return self.families[family].cursor(key, metrics)

    def close(self) -> None:
        for reader in self.families.values():
            reader.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_cursor(index: Index, family: str, key, metrics: Metrics | None = None) -> PostingCursor:
    return index.cursor(family, key, metrics)
