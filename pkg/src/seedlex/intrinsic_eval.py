"""Word-translation retrieval: cosine nearest neighbours and precision at 1."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .dictionary import SeedDictionary
from .embedding_store import EmbeddingSpace, normalized_rows
from .errors import DataError, DimensionError, FormatError

# Similarity entries computed per block of queries.
_BLOCK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class TranslationTestSet:
    gold: dict  # source word -> frozenset of target words
    pair_count: int

    def __post_init__(self):
        for src, targets in self.gold.items():
            if not targets:
                raise DataError(f"gold set for {src!r} is empty")

    def __len__(self) -> int:
        return len(self.gold)

    @classmethod
    def from_dictionary(cls, dictionary: SeedDictionary) -> "TranslationTestSet":
        gold = {}
        for src, tgt in dictionary.pairs:
            gold.setdefault(src, set()).add(tgt)
        return cls({s: frozenset(t) for s, t in gold.items()}, len(dictionary))


@dataclass
class P1Report:
    p_at_1: float
    evaluated: int
    skipped_oov: int
    per_word: list = field(default_factory=list)  # (source, retrieved, hit)
    warning: Optional[str] = None

    @property
    def hits(self) -> int:
        return round(self.p_at_1 * self.evaluated)

    def summary(self) -> str:
        return f"P@1 {self.p_at_1!r} evaluated {self.evaluated} skipped {self.skipped_oov}"

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("source\tretrieved\thit\n")
            for src, got, hit in self.per_word:
                fh.write(f"{src}\t{got if got is not None else ''}\t{int(hit)}\n")


def load_test_set(path) -> TranslationTestSet:
    """Read a space-separated two-column test set; repeated source words accumulate."""
    path = Path(path)
    gold = {}
    count = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FormatError(f"expected 2 columns, found {len(parts)}", path, lineno)
            gold.setdefault(parts[0], set()).add(parts[1])
            count += 1
    if not gold:
        raise DataError(f"{path}: test set is empty")
    return TranslationTestSet({s: frozenset(t) for s, t in gold.items()}, count)


class _Retriever:
    """Unit-normalized target matrix plus the tie-break order of its words."""

    def __init__(self, space: EmbeddingSpace):
        self.space = space
        self.unit = normalized_rows(space.vectors)
        self.zero = ~np.any(space.vectors != 0.0, axis=1)
        order = np.argsort(np.array(space.vocabulary, dtype=object), kind="stable")
        self.lex_rank = np.empty(len(space), dtype=np.int64)
        self.lex_rank[order] = np.arange(len(space))

    def search(self, queries: np.ndarray, exclude_mask: Optional[np.ndarray] = None):
        """Best target index and cosine per query row (``-1`` when nothing can win)."""
        q = normalized_rows(np.atleast_2d(queries))
        q_zero = ~np.any(np.atleast_2d(queries) != 0.0, axis=1)
        n_vocab = len(self.space)
        best_idx = np.full(len(q), -1, dtype=np.int64)
        best_score = np.full(len(q), -np.inf)
        blocked = self.zero if exclude_mask is None else (self.zero | exclude_mask)
        if n_vocab == 0:
            return best_idx, best_score
        sentinel = np.iinfo(np.int64).max
        block = max(1, _BLOCK_ENTRIES // n_vocab)
        for start in range(0, len(q), block):
            sims = q[start:start + block] @ self.unit.T
            sims[:, blocked] = -np.inf
            top = sims.max(axis=1)
            ties = sims == top[:, None]
            idx = np.where(ties, self.lex_rank[None, :], sentinel).argmin(axis=1)
            ok = np.isfinite(top) & ~q_zero[start:start + block]
            best_idx[start:start + block] = np.where(ok, idx, -1)
            best_score[start:start + block] = np.where(ok, top, -np.inf)
        return best_idx, best_score


def nearest_neighbor(query, space: EmbeddingSpace, exclude: Iterable[str] = ()):
    """Exhaustive cosine argmax over ``space`` minus ``exclude``.

    Ties go to the lexicographically smallest word.  Zero rows never win; a
    zero query returns ``(None, -inf)``.
    """
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (space.dim,):
        raise DimensionError(f"query has shape {query.shape}, space dimension is {space.dim}")
    exclude = set(exclude)
    if len(space) == 0 or all(w in exclude for w in space.vocabulary):
        raise DataError("nearest-neighbour candidate set is empty")
    mask = np.array([w in exclude for w in space.vocabulary]) if exclude else None
    idx, score = _Retriever(space).search(query[None, :], mask)
    if idx[0] < 0:
        return None, float("-inf")
    return space.vocabulary[idx[0]], float(score[0])


def precision_at_1(projected_source: EmbeddingSpace, target: EmbeddingSpace,
                   test: TranslationTestSet, keep_per_word: bool = True) -> P1Report:
    """Share of answerable test words whose nearest target word is a gold translation.

    Items whose source word is missing from ``projected_source``, or whose gold
    targets are all missing from ``target``, are counted in ``skipped_oov``.
    """
    if projected_source.dim != target.dim:
        raise DimensionError(
            f"projected source dimension {projected_source.dim} != target dimension {target.dim}"
        )
    sources, golds = [], []
    skipped = 0
    for src, targets in test.gold.items():
        reachable = frozenset(t for t in targets if t in target)
        if src not in projected_source or not reachable:
            skipped += 1
            continue
        sources.append(src)
        golds.append(reachable)
    if not sources:
        return P1Report(0.0, 0, skipped, [], warning="no test item is answerable; P@1 reported as 0")
    queries = projected_source.vectors[[projected_source.index(s) for s in sources]]
    idx, _ = _Retriever(target).search(queries)
    hits = 0
    per_word = []
    for src, gold, j in zip(sources, golds, idx.tolist()):
        got = target.vocabulary[j] if j >= 0 else None
        hit = got is not None and got in gold
        hits += hit
        if keep_per_word:
            per_word.append((src, got, hit))
    return P1Report(hits / len(sources), len(sources), skipped, per_word)
