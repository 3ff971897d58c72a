"""Monolingual embedding spaces and corpus frequency tables.

Embeddings are read and written in the word2vec text format: an optional
``"<vocab_size> <dim>"`` header line followed by one ``word v1 ... vd`` line
per word.  Frequency tables are two-column TSV files (``word<TAB>count``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional

import numpy as np

from .errors import DataError, FormatError

# Rows whose norm is already this close to 1 are left untouched so that
# normalization is exactly idempotent.
_UNIT_TOLERANCE = 8 * np.finfo(np.float64).eps


class EmbeddingSpace:
    """Vocabulary, vector matrix and optional frequency counts for one language.

    Instances are immutable: the vector matrix is copied and flagged read-only.
    """

    __slots__ = ("language_id", "vocabulary", "vectors", "frequencies", "_index")

    def __init__(
        self,
        vocabulary: Iterable[str],
        vectors,
        language_id: str = "",
        frequencies: Optional[Mapping[str, int]] = None,
    ):
        vocabulary = tuple(vocabulary)
        vectors = np.array(vectors, dtype=np.float64, copy=True)
        if vectors.ndim == 1 and len(vocabulary) == 0 and vectors.size == 0:
            vectors = vectors.reshape(0, 1)
        if vectors.ndim != 2:
            raise DataError(f"vectors must be a 2-d matrix, got shape {vectors.shape}")
        if vectors.shape[0] != len(vocabulary):
            raise DataError(
                f"row count {vectors.shape[0]} does not match vocabulary size {len(vocabulary)}"
            )
        if vectors.shape[1] < 1:
            raise DataError("embedding dimension must be at least 1")
        index = {}
        for i, word in enumerate(vocabulary):
            if word in index:
                raise DataError(f"duplicate word {word!r} at rows {index[word]} and {i}")
            index[word] = i
        if frequencies is not None:
            frequencies = dict(frequencies)
            missing = [w for w in frequencies if w not in index]
            if missing:
                raise DataError(
                    f"{len(missing)} frequency entries are not in the vocabulary, e.g. {missing[0]!r}"
                )
        vectors.setflags(write=False)
        object.__setattr__(self, "language_id", language_id)
        object.__setattr__(self, "vocabulary", vocabulary)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "_index", index)

    def __setattr__(self, name, value):
        raise AttributeError("EmbeddingSpace is immutable")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocabulary)

    def __contains__(self, word) -> bool:
        return word in self._index

    def index(self, word: str) -> int:
        return self._index[word]

    def get(self, word: str) -> Optional[int]:
        return self._index.get(word)

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self._index[word]]

    def replace(self, **changes) -> "EmbeddingSpace":
        kwargs = dict(
            vocabulary=self.vocabulary,
            vectors=self.vectors,
            language_id=self.language_id,
            frequencies=self.frequencies,
        )
        kwargs.update(changes)
        return EmbeddingSpace(**kwargs)

    def with_frequencies(self, table: "FrequencyTable") -> "EmbeddingSpace":
        """Attach the counts of in-vocabulary words from ``table``."""
        freqs = {w: c for w, c in table.entries.items() if w in self._index}
        return self.replace(frequencies=freqs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingSpace):
            return NotImplemented
        return (
            self.language_id == other.language_id
            and self.vocabulary == other.vocabulary
            and self.vectors.shape == other.vectors.shape
            and np.array_equal(self.vectors, other.vectors)
            and self.frequencies == other.frequencies
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"EmbeddingSpace(language_id={self.language_id!r}, size={len(self)}, dim={self.dim})"


@dataclass
class FrequencyTable:
    """Corpus counts per word.  ``total_tokens`` defaults to the sum of counts."""

    entries: dict = field(default_factory=dict)
    total_tokens: Optional[int] = None

    def __post_init__(self):
        for word, count in self.entries.items():
            if not isinstance(count, (int, np.integer)) or count < 1:
                raise DataError(f"count for {word!r} must be a positive integer, got {count!r}")
        if self.total_tokens is None:
            self.total_tokens = int(sum(self.entries.values()))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word) -> bool:
        return word in self.entries

    def count(self, word: str) -> int:
        return self.entries.get(word, 0)

    def ranked(self) -> list:
        """Words ordered by count descending, ties broken by word ascending."""
        return sorted(self.entries, key=lambda w: (-self.entries[w], w))


class NormalizedSpace(NamedTuple):
    space: EmbeddingSpace
    zero_words: tuple


def _format_float(x: float) -> str:
    # repr gives the shortest string that round-trips exactly
    return repr(float(x))


def _open_text(path):
    try:
        return open(path, encoding="utf-8", newline=None)
    except IsADirectoryError as exc:
        raise DataError(f"{path} is a directory") from exc


def load_embeddings(
    path,
    expect_header: Optional[bool] = None,
    language_id: str = "",
    lowercase: bool = False,
) -> EmbeddingSpace:
    """Read a word2vec text file.

    ``expect_header=None`` auto-detects a ``"n d"`` first line; ``True`` requires
    it and ``False`` treats the first line as a vector row.  With ``lowercase``
    the words are lowercased, and collisions become duplicate-word errors.
    """
    path = Path(path)
    words = []
    rows = []
    declared = None
    dim = None
    seen = {}
    try:
        with _open_text(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\r\n")
                if not line.strip():
                    continue
                parts = line.split()
                if lineno == 1 and expect_header is not False:
                    is_header = len(parts) == 2 and all(p.isdigit() for p in parts)
                    if is_header:
                        declared = (int(parts[0]), int(parts[1]))
                        continue
                    if expect_header:
                        raise FormatError("expected a '<vocab_size> <dim>' header", path, lineno)
                word, comps = parts[0], parts[1:]
                if lowercase:
                    word = word.lower()
                if not comps:
                    raise FormatError(f"word {word!r} has no vector components", path, lineno)
                if dim is None:
                    dim = len(comps)
                elif len(comps) != dim:
                    raise FormatError(
                        f"dimension mismatch: expected {dim} components, found {len(comps)}", path, lineno
                    )
                if word in seen:
                    raise FormatError(
                        f"duplicate word {word!r} (first seen at line {seen[word]})", path, lineno
                    )
                try:
                    rows.append([float(c) for c in comps])
                except ValueError as exc:
                    raise FormatError(f"non-numeric vector component: {exc}", path, lineno) from None
                seen[word] = lineno
                words.append(word)
    except UnicodeDecodeError as exc:
        raise FormatError(
            "file is not UTF-8 text; the binary word2vec format is not supported", path
        ) from exc
    if declared is not None:
        n_decl, d_decl = declared
        if n_decl != len(words):
            raise FormatError(f"header declares {n_decl} rows, found {len(words)}", path)
        if dim is not None and d_decl != dim:
            raise FormatError(f"header declares dimension {d_decl}, rows have {dim}", path)
        if dim is None:
            dim = d_decl
    if dim is None:
        raise FormatError("no embedding rows found", path)
    vectors = np.array(rows, dtype=np.float64).reshape(len(words), dim)
    return EmbeddingSpace(words, vectors, language_id=language_id)


def save_embeddings(space: EmbeddingSpace, path) -> None:
    """Write ``space`` with a header; values printed with round-trip precision."""
    if len(space) == 0:
        raise DataError("refusing to write an embedding file with an empty vocabulary")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for word, row in zip(space.vocabulary, space.vectors.tolist()):
            fh.write(word + " " + " ".join(map(_format_float, row)) + "\n")


def load_frequency_table(path) -> FrequencyTable:
    entries = {}
    path = Path(path)
    with _open_text(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"expected 'word<TAB>count', got {len(parts)} fields", path, lineno)
            word, count_str = parts[0].strip(), parts[1].strip()
            try:
                count = int(count_str)
            except ValueError:
                raise FormatError(f"non-integer count {count_str!r}", path, lineno) from None
            if count < 1:
                raise FormatError(f"count for {word!r} must be >= 1, got {count}", path, lineno)
            if word in entries:
                raise FormatError(f"duplicate word {word!r}", path, lineno)
            entries[word] = count
    return FrequencyTable(entries)


def save_frequency_table(table: FrequencyTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word in table.ranked():
            fh.write(f"{word}\t{table.entries[word]}\n")


def unit_normalize(space: EmbeddingSpace) -> NormalizedSpace:
    """Scale every row to unit Euclidean norm.

    All-zero rows stay zero and their words are returned in ``zero_words``.
    """
    vectors = np.array(space.vectors)
    norms = row_norms(vectors)
    zero = norms == 0.0
    scale = ~zero & (np.abs(norms - 1.0) > _UNIT_TOLERANCE)
    vectors[scale] /= norms[scale, None]
    zero_words = tuple(w for w, z in zip(space.vocabulary, zero) if z)
    return NormalizedSpace(space.replace(vectors=vectors), zero_words)


def row_norms(matrix: np.ndarray) -> np.ndarray:
    """Euclidean row norms, rescaled by the row maximum to avoid under/overflow."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        return np.zeros(matrix.shape[0])
    peak = np.abs(matrix).max(axis=1)
    safe = np.where(peak == 0.0, 1.0, peak)
    scaled = matrix / safe[:, None]
    return peak * np.sqrt(np.einsum("ij,ij->i", scaled, scaled))


def normalized_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-normalized copy of ``matrix``; zero rows stay zero."""
    matrix = np.asarray(matrix, dtype=np.float64)
    norms = row_norms(matrix)
    safe = np.where(norms == 0.0, 1.0, norms)
    return matrix / safe[:, None]


def load_stopwords(path) -> frozenset:
    """One word per line; blank lines and surrounding whitespace ignored."""
    with _open_text(Path(path)) as fh:
        return frozenset(line.strip() for line in fh if line.strip())

