"""Tokenization, lemmatization and the frequency-ranked lemma list."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

RARE = 2**32 - 1

_WORD = re.compile(r"[^\W_]+")


class LemmaClass(enum.Enum):
    STOP = "stop"
    FREQUENTLY_USED = "frequently_used"
    ORDINARY = "ordinary"


@dataclass(frozen=True)
class Lemma:
    id: int
    text: str


@dataclass(frozen=True)
class LexiconConfig:
    sw_count: int = 700
    fu_count: int = 2100

    def __post_init__(self):
        if self.sw_count < 0 or self.fu_count < 0:
            raise ValueError("sw_count and fu_count must be non-negative")


def tokenize(text: str) -> list[tuple[str, int]]:
    """Split text into lowercased letter/digit runs numbered from 0."""
    return [(m.group().lower(), i) for i, m in enumerate(_WORD.finditer(text))]


class Dictionary:
    """Surface word -> lemma texts. Missing words lemmatize to themselves."""

    def __init__(self, entries: Mapping[str, Iterable[str]] | None = None):
        self.entries: dict[str, list[str]] = {}
        for word, lemmas in (entries or {}).items():
            lemmas = [x for x in lemmas if x]
            if not lemmas:
                raise ValueError(f"dictionary entry {word!r} has no lemmas")
            self.entries[word.lower()] = [x.lower() for x in lemmas]

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, word: str) -> list[str]:
        return self.entries.get(word, [word])

    @classmethod
    def load(cls, path: str | Path) -> "Dictionary":
        """Read a ``word<TAB>lemma1,lemma2`` file."""
        entries: dict[str, list[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                word, sep, rest = line.partition("\t")
                lemmas = [x.strip() for x in rest.split(",") if x.strip()]
                if not sep or not word or not lemmas:
                    raise ValueError(f"{path}:{lineno}: expected 'word<TAB>lemma[,lemma...]'")
                entries[word.strip()] = lemmas
        return cls(entries)

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word in sorted(self.entries):
                fh.write(f"{word}\t{','.join(self.entries[word])}\n")


def lemmatize(word: str, dictionary: Dictionary | None = None) -> list[str]:
    """Lemma texts for an already lowercased word, in dictionary order."""
    if dictionary is None:
        return [word]
    return list(dictionary.lookup(word))


def analyze(text: str, dictionary: Dictionary | None = None) -> list[tuple[str, int]]:
    """(lemma text, position) for every lemma of every word, duplicates dropped."""
    out = []
    for word, pos in tokenize(text):
        seen = set()
        for lemma in lemmatize(word, dictionary):
            if lemma not in seen:
                seen.add(lemma)
                out.append((lemma, pos))
    return out


class FLList:
    """Lemma table plus each lemma's FL-number (frequency rank, 0 = most frequent).

    Lemma ids are dense from 0. Lemmas without a rank report ``rare_sentinel``.
    """

    def __init__(self, lemmas: Iterable[str], ranks: Mapping[int, int],
                 counts: Iterable[int] | None = None, rare_sentinel: int = RARE):
        self.lemmas = list(lemmas)
        self.ids = {text: i for i, text in enumerate(self.lemmas)}
        if len(self.ids) != len(self.lemmas):
            raise ValueError("duplicate lemma text")
        self.ranks = dict(ranks)
        self.counts = list(counts) if counts is not None else [0] * len(self.lemmas)
        self.rare_sentinel = rare_sentinel
        if any(r >= rare_sentinel for r in self.ranks.values()):
            raise ValueError("rank collides with the rare sentinel")

    def __len__(self) -> int:
        return len(self.lemmas)

    def __contains__(self, text: str) -> bool:
        return text in self.ids

    def id_of(self, text: str) -> int | None:
        return self.ids.get(text)

    def text_of(self, lemma_id: int) -> str:
        return self.lemmas[lemma_id]

    def lemma(self, text: str) -> Lemma:
        return Lemma(self.ids[text], text)

    def rank(self, lemma_id: int) -> int:
        return self.ranks.get(lemma_id, self.rare_sentinel)

    def rank_of(self, text: str) -> int:
        lemma_id = self.ids.get(text)
        return self.rare_sentinel if lemma_id is None else self.rank(lemma_id)

    def by_rank(self) -> list[int]:
        """Ranked lemma ids in FL order."""
        return sorted(self.ranks, key=self.ranks.__getitem__)

    @classmethod
    def from_ranks(cls, ranks: Mapping[str, int]) -> "FLList":
        """Fixture constructor: explicit FL-numbers keyed by lemma text."""
        texts = sorted(ranks, key=lambda t: (ranks[t], t))
        return cls(texts, {i: ranks[t] for i, t in enumerate(texts)})

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, text in enumerate(self.lemmas):
                fh.write(f"{i}\t{text}\t{self.counts[i]}\t{self.rank(i)}\n")

    @classmethod
    def load(cls, path: str | Path) -> "FLList":
        lemmas, counts, ranks = [], [], {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 4 or int(parts[0]) != lineno:
                    raise ValueError(f"{path}: malformed lexicon line {lineno + 1}")
                lemmas.append(parts[1])
                counts.append(int(parts[2]))
                if int(parts[3]) != RARE:
                    ranks[lineno] = int(parts[3])
        return cls(lemmas, ranks, counts)


def build_fl_list(counts: Mapping[str, int], min_count: int = 1,
                  order: Iterable[str] | None = None) -> FLList:
    """Rank lemmas by descending count, ties by ascending text.

    Lemma ids follow the same order, so a ranked lemma's id equals its rank.
    Lemmas counted fewer than ``min_count`` times get the rare sentinel.
    ``order`` pins the leading lemmas (test fixtures with prescribed ranks).
    """
    if any(c < 0 for c in counts.values()):
        raise ValueError("counts must be non-negative")
    pinned = list(dict.fromkeys(order or []))
    skip = set(pinned)
    rest = sorted((t for t in counts if t not in skip), key=lambda t: (-counts[t], t))
    texts = pinned + rest
    # pinned lemmas are always ranked; the rest are sorted by count, so the
    # ranked lemmas form a prefix and rank == id
    n_ranked = len(pinned) + sum(1 for t in rest if counts[t] >= min_count)
    ranks = {i: i for i in range(n_ranked)}
    return FLList(texts, ranks, [counts.get(t, 0) for t in texts])


def classify(fl: int, cfg: LexiconConfig) -> LemmaClass:
    if fl < cfg.sw_count:
        return LemmaClass.STOP
    if fl < cfg.sw_count + cfg.fu_count:
        return LemmaClass.FREQUENTLY_USED
    return LemmaClass.ORDINARY
