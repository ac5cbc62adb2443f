"""Hot loops, compiled when the extension is available.

The Cython module is preferred; set ``PROXSEARCH_PURE=1`` to force the
pure-Python fallback (both expose the same functions).
"""

import os

from . import _pykernels as pure

compiled = None
if not os.environ.get("PROXSEARCH_PURE"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

active = compiled if compiled is not None else pure

BACKEND = active.BACKEND
encode_groups = active.encode_groups
encode_postings = active.encode_postings
splice_segments = active.splice_segments
decode_postings = active.decode_postings
triple_postings = active.triple_postings
pair_postings = active.pair_postings
fill_lists = active.fill_lists
search_document = active.search_document

__all__ = [
    "BACKEND",
    "compiled",
    "pure",
    "encode_groups",
    "encode_postings",
    "splice_segments",
    "decode_postings",
    "triple_postings",
    "pair_postings",
    "fill_lists",
    "search_document",
]
