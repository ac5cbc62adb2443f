"""Query expansion into subqueries and index key selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..index.keys import normalize_key
from ..lexicon import Dictionary, FLList, lemmatize, tokenize

MAX_SUBQUERIES = 64


class QueryError(ValueError):
    pass


class NotApplicable(ValueError):
    """The subquery is too short for the requested key arity."""


@dataclass(frozen=True)
class Subquery:
    lemmas: tuple[int, ...]
    texts: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.lemmas)


@dataclass(frozen=True)
class SelectedKey:
    """A normalized key plus, per key slot, the query ordinal it feeds.

    ``starred[j]`` marks slots whose ordinal an earlier key already covers;
    those slots get no intermediate list.
    """

    key: tuple[int, ...]
    bindings: tuple[int, ...]
    starred: tuple[bool, ...]

    def __str__(self) -> str:
        return "(" + ", ".join(f"{c}{'*' if s else ''}" for c, s in zip(self.key, self.starred)) + ")"


def lemma_ids(texts: Sequence[str], fl: FLList) -> tuple[int, ...]:
    """Map lemma texts to ids; lemmas missing from the lexicon get distinct negative ids."""
    unknown: dict[str, int] = {}
    out = []
    for t in texts:
        lid = fl.id_of(t)
        if lid is None:
            lid = unknown.setdefault(t, -1 - len(unknown))
        out.append(lid)
    return tuple(out)


def expand_query(words: str | Sequence[str], dictionary: Dictionary | None, fl: FLList,
                 limit: int = MAX_SUBQUERIES) -> list[Subquery]:
    """One subquery per combination of the words' lemma alternatives."""
    if isinstance(words, str):
        words = [w for w, _ in tokenize(words)]
    else:
        words = [w for word in words for w, _ in tokenize(word)]
    if not words:
        raise QueryError("empty query")
    alternatives = [list(dict.fromkeys(lemmatize(w, dictionary))) for w in words]
    total = 1
    for alt in alternatives:
        total *= len(alt)
    if total > limit:
        raise QueryError(f"query expands to {total} subqueries; the limit is {limit}")
    return [Subquery(lemma_ids(combo, fl), tuple(combo)) for combo in itertools.product(*alternatives)]


def select_keys(lemmas: Sequence[int], fl: FLList, k: int = 3) -> list[SelectedKey]:
    """Cover ordinals with consecutive k-groups; a short tail reuses the last k lemmas.

    Ordinals of the tail group that an earlier group covered are starred.
    """
    m = len(lemmas)
    if m < k:
        raise NotApplicable(f"subquery of length {m} needs at least {k} lemmas")
    groups = [range(i, i + k) for i in range(0, m - k + 1, k)]
    if m % k:
        groups.append(range(m - k, m))
    covered: set[int] = set()
    out = []
    for g in groups:
        key, perm = normalize_key([lemmas[o] for o in g], fl)
        bindings = tuple(g[p] for p in perm)
        out.append(SelectedKey(key, bindings, tuple(o in covered for o in bindings)))
        covered.update(g)
    return out


def ordinary_keys(lemmas: Sequence[int]) -> list[SelectedKey]:
    return [SelectedKey((lid,), (o,), (False,)) for o, lid in enumerate(lemmas)]
