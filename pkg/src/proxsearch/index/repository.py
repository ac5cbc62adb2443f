"""Compressed store of the indexed texts, used for snippets."""

from __future__ import annotations

import struct
import zlib
from pathlib import Path
from typing import Iterable

import numpy as np

from ..lexicon import tokenize
from .format import IndexFormatError

REPO_MAGIC = b"PXRP"
_HEAD = struct.Struct("<4sIQ")


def write_repository(path: str | Path, texts: Iterable[str]) -> int:
    """Layout: magic, u32 version, u64 doc_count, (doc_count + 1) u64 offsets, zlib blobs."""
    blobs = [zlib.compress(t.encode("utf-8"), 6) for t in texts]
    offsets = np.zeros(len(blobs) + 1, dtype="<u8")
    np.cumsum([len(b) for b in blobs], out=offsets[1:])
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(REPO_MAGIC, 1, len(blobs)))
        fh.write(offsets.tobytes())
        for b in blobs:
            fh.write(b)
    return _HEAD.size + offsets.nbytes + int(offsets[-1])


class DocumentRepository:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._data = self.path.read_bytes()
        if len(self._data) < _HEAD.size:
            raise IndexFormatError("repository shorter than header", len(self._data), self.path)
        magic, version, count = _HEAD.unpack_from(self._data, 0)
        if magic != REPO_MAGIC or version != 1:
            raise IndexFormatError("bad repository header", 0, self.path)
        table_end = _HEAD.size + 8 * (count + 1)
        if table_end > len(self._data):
            raise IndexFormatError("offset table runs past end of file", _HEAD.size, self.path)
        self._offsets = np.frombuffer(self._data, dtype="<u8", count=count + 1, offset=_HEAD.size)
        self._base = table_end
        if self._base + int(self._offsets[-1]) != len(self._data):
            raise IndexFormatError("repository size mismatch", table_end, self.path)

    def __len__(self) -> int:
        return len(self._offsets) - 1

    def text(self, did: int) -> str:
        if not 0 <= did < len(self):
            raise IndexError(did)
        a = self._base + int(self._offsets[did])
        b = self._base + int(self._offsets[did + 1])
        try:
            return zlib.decompress(self._data[a:b]).decode("utf-8")
        except zlib.error as exc:
            raise IndexFormatError(f"corrupt document {did}: {exc}", a, self.path) from None

    def snippet(self, did: int, start: int, end: int, context: int = 2) -> str:
        words = [w for w, _ in tokenize(self.text(did))]
        return " ".join(words[max(0, start - context): end + context + 1])
