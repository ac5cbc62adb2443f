"""Key normalization for multi-component keys."""

from __future__ import annotations

from typing import NamedTuple, Sequence

from ..lexicon import FLList


class TripleKey(NamedTuple):
    f: int
    s: int
    t: int


class PairKey(NamedTuple):
    w: int
    v: int


def normalize_key(lemmas: Sequence[int], fl: FLList) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Sort key components by FL-number (ties by lemma id, then original slot).

    Returns ``(key, perm)`` where ``key[j] == lemmas[perm[j]]``.
    """
    perm = tuple(sorted(range(len(lemmas)), key=lambda i: (fl.rank(lemmas[i]), lemmas[i], i)))
    return tuple(lemmas[i] for i in perm), perm


def normalize_triple(a: int, b: int, c: int, fl: FLList) -> tuple[TripleKey, tuple[int, ...]]:
    key, perm = normalize_key((a, b, c), fl)
    return TripleKey(*key), perm


def normalize_pair(a: int, b: int, fl: FLList) -> tuple[PairKey, tuple[int, ...]]:
    key, perm = normalize_key((a, b), fl)
    return PairKey(*key), perm
