"""On-disk layout of posting files.

A posting file (``ordinary.idx``, ``pairs.idx``, ``triples.idx``) is::

    header      magic "PXIX", u16 version, u8 arity, u8 ndist,
                u64 key_count, u64 posting_count, u64 postings_offset
    key table   key_count entries sorted by lemma ids:
                arity x u32 lemma id, u64 offset, u64 length, u64 count
                (offset is relative to postings_offset)
    postings    one varint block per key

All integers are little-endian. A block holds ``count`` postings, each written
as varint(ID delta), varint(P or P delta), then ``ndist`` zigzag varints. The ID
delta is taken from the previous posting of the same block (the first one is
absolute); P is absolute when the ID delta is non-zero or for the first
posting, and a delta from the previous P otherwise.
"""

from __future__ import annotations

import shutil
import struct

import numpy as np

MAGIC = b"PXIX"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sHBBQQQ")
KEY_BITS = 21
KEY_LIMIT = 1 << KEY_BITS


class IndexFormatError(ValueError):
    """Raised for corrupt or incompatible index files."""

    def __init__(self, message: str, offset: int | None = None, path=None):
        where = []
        if path is not None:
            where.append(str(path))
        if offset is not None:
            where.append(f"byte {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.offset = offset
        self.path = path


def key_dtype(arity: int) -> np.dtype:
    return np.dtype([
        ("lemma", "<u4", (arity,)),
        ("offset", "<u8"),
        ("length", "<u8"),
        ("count", "<u8"),
    ])


def pack_keys(lemmas: np.ndarray) -> np.ndarray:
    """Pack an ``(n, arity)`` array of lemma ids into sortable int64 keys."""
    lemmas = np.asarray(lemmas, dtype=np.int64)
    limit = KEY_LIMIT if lemmas.shape[1] > 1 else 1 << 32
    if lemmas.size and (lemmas.min() < 0 or lemmas.max() >= limit):
        raise ValueError(f"lemma ids in keys must be below {limit}")
    packed = np.zeros(lemmas.shape[0], dtype=np.int64)
    for col in range(lemmas.shape[1]):
        packed = (packed << KEY_BITS) | lemmas[:, col]
    return packed


def unpack_keys(packed: np.ndarray, arity: int) -> np.ndarray:
    packed = np.asarray(packed, dtype=np.int64)
    if arity == 1:
        return packed.reshape(-1, 1).copy()
    out = np.empty((len(packed), arity), dtype=np.int64)
    for col in range(arity - 1, -1, -1):
        out[:, col] = packed & (KEY_LIMIT - 1)
        packed = packed >> KEY_BITS
    return out


def write_posting_file(path, arity: int, lemmas: np.ndarray, offsets: np.ndarray,
                       lengths: np.ndarray, counts: np.ndarray, blob) -> int:
    """Write one posting file; returns its size in bytes.

    ``blob`` holds the posting blocks: bytes, or a binary file positioned at
    their start.
    """
    table = np.zeros(len(offsets), dtype=key_dtype(arity))
    if len(offsets):
        table["lemma"] = np.asarray(lemmas, dtype=np.uint32).reshape(len(offsets), arity)
    table["offset"] = offsets
    table["length"] = lengths
    table["count"] = counts
    postings_offset = HEADER.size + table.nbytes
    header = HEADER.pack(MAGIC, FORMAT_VERSION, arity, arity - 1, len(table),
                         int(np.sum(counts)) if len(counts) else 0, postings_offset)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(table.tobytes())
        if isinstance(blob, (bytes, bytearray, memoryview)):
            fh.write(blob)
        else:
            shutil.copyfileobj(blob, fh, 1 << 20)
        return fh.tell()


def read_header(buf, path=None):
    if len(buf) < HEADER.size:
        raise IndexFormatError("file shorter than header", len(buf), path)
    magic, version, arity, ndist, key_count, posting_count, postings_offset = HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise IndexFormatError(f"bad magic {magic!r}", 0, path)
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported format version {version}", 4, path)
    if not 1 <= arity <= 3 or ndist != arity - 1:
        raise IndexFormatError(f"bad arity {arity}/{ndist}", 6, path)
    expected = HEADER.size + key_count * key_dtype(arity).itemsize
    if postings_offset != expected or postings_offset > len(buf):
        raise IndexFormatError("key table does not fit the file", HEADER.size, path)
    return arity, key_count, posting_count, postings_offset


def read_key_table(buf, path=None):
    """Parse and validate the header and key table of a posting file."""
    arity, key_count, posting_count, postings_offset = read_header(buf, path)
    table = np.frombuffer(buf, dtype=key_dtype(arity), count=key_count, offset=HEADER.size)
    region = len(buf) - postings_offset
    if key_count:
        end = table["offset"] + table["length"]
        bad = np.flatnonzero(end > region)
        if len(bad):
            entry = HEADER.size + int(bad[0]) * table.dtype.itemsize
            raise IndexFormatError("posting block runs past end of file", entry, path)
        if int(table["count"].sum()) != posting_count:
            raise IndexFormatError("posting count mismatch", 8, path)
    return arity, table, postings_offset
