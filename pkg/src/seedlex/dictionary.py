"""Bilingual seed dictionaries: selection, translation, loading and validation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Protocol, Sequence

import numpy as np

from .embedding_store import FrequencyTable
from .errors import DataError, FormatError, TranslationError

SOURCE_KINDS = ("domain", "muse", "idp", "synthetic")
SELECTIONS = ("high_freq", "lower_band", "explicit")
BANDS = ("high", "lower")

# Oversampling factor applied before translation so that misses can be absorbed.
OVERSAMPLE = 1.5
LOWER_BAND = (0.05, 0.10)


def _check_word(word: str) -> None:
    if not word or any(ch.isspace() for ch in word):
        raise DataError(f"invalid dictionary word {word!r}: must be non-empty without whitespace")


@dataclass(frozen=True)
class SeedDictionary:
    pairs: tuple
    source_kind: str = "synthetic"
    selection: str = "explicit"
    requested_size: Optional[int] = None
    provenance_notes: str = ""

    def __post_init__(self):
        pairs = tuple((str(s), str(t)) for s, t in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.source_kind not in SOURCE_KINDS:
            raise DataError(f"unknown source_kind {self.source_kind!r}")
        if self.selection not in SELECTIONS:
            raise DataError(f"unknown selection {self.selection!r}")
        seen = set()
        for pair in pairs:
            _check_word(pair[0])
            _check_word(pair[1])
            if pair in seen:
                raise DataError(f"duplicate pair {pair!r}")
            seen.add(pair)
        if self.requested_size is None:
            object.__setattr__(self, "requested_size", max(len(pairs), 1))
        if self.requested_size < 1:
            raise DataError("requested_size must be positive")
        if len(pairs) > self.requested_size:
            raise DataError(f"{len(pairs)} pairs exceed requested size {self.requested_size}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def source_words(self) -> list:
        return [s for s, _ in self.pairs]

    def with_pairs(self, pairs, **changes) -> "SeedDictionary":
        kwargs = dict(
            source_kind=self.source_kind,
            selection=self.selection,
            requested_size=self.requested_size,
            provenance_notes=self.provenance_notes,
        )
        kwargs.update(changes)
        return SeedDictionary(tuple(pairs), **kwargs)

    def truncated(self, size: int) -> "SeedDictionary":
        return self.with_pairs(self.pairs[:size], requested_size=size)


class TranslationProvider(Protocol):
    concurrent_safe: bool

    def translate_batch(self, words: Sequence[str]) -> Mapping[str, str]:
        """Map each translatable word to one translation; missing keys mean no translation."""


class FileTranslationProvider:
    """Translation lookups against a fixed lexicon (TSV ``source<TAB>target``).

    When a source word appears on several lines the first translation wins.
    """

    concurrent_safe = True

    def __init__(self, lexicon: Mapping[str, str]):
        self.lexicon = dict(lexicon)

    @classmethod
    def from_file(cls, path) -> "FileTranslationProvider":
        lexicon = {}
        for lineno, (src, tgt) in _read_two_columns(Path(path), "tsv"):
            lexicon.setdefault(src, tgt)
        return cls(lexicon)

    def translate_batch(self, words):
        return {w: self.lexicon[w] for w in words if w in self.lexicon}


def _read_two_columns(path: Path, fmt: str):
    if fmt not in ("space_separated", "tsv"):
        raise DataError(f"unknown dictionary format {fmt!r}")
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split("\t") if fmt == "tsv" else line.split()
            parts = [p.strip() for p in parts]
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise FormatError(f"expected 2 columns, found {len(parts)}", path, lineno)
            yield lineno, (parts[0], parts[1])


def select_seed_words(
    freqs: FrequencyTable,
    band: str,
    size: int,
    stopwords: Iterable[str] = (),
    min_length: int = 3,
) -> list:
    """Pick dictionary source words by corpus frequency.

    The ranking is (count desc, word asc) after dropping stopwords and words
    shorter than ``min_length``.  ``band="high"`` takes the top of that
    ranking; ``band="lower"`` takes ranks in (5%, 10%] of the filtered
    vocabulary.
    """
    if band not in BANDS:
        raise DataError(f"unknown frequency band {band!r}")
    if size < 1:
        raise DataError("size must be at least 1")
    candidates = band_candidates(freqs, band, stopwords, min_length)
    if size > len(candidates):
        raise DataError(
            f"requested {size} seed words but only {len(candidates)} candidates are available "
            f"in the {band} band"
        )
    return candidates[:size]


def band_candidates(freqs: FrequencyTable, band: str, stopwords=(), min_length: int = 3) -> list:
    stop = set(stopwords)
    ranked = [w for w in freqs.ranked() if w not in stop and len(w) >= min_length]
    if band == "high":
        return ranked
    n = len(ranked)
    lo = math.floor(LOWER_BAND[0] * n)
    hi = math.floor(LOWER_BAND[1] * n)
    return ranked[lo:hi]


def build_domain_dictionary(
    freqs: FrequencyTable,
    provider: TranslationProvider,
    band: str,
    size: int,
    stopwords: Iterable[str] = (),
    min_length: int = 3,
    batch_size: int = 500,
) -> SeedDictionary:
    """Select frequent source words, translate them, keep the first ``size`` hits.

    ``ceil(1.5 * size)`` words (or every candidate in the band, if fewer) are
    sent to the provider so that untranslatable words do not shrink the result.
    """
    if size < 1:
        raise DataError("size must be at least 1")
    candidates = band_candidates(freqs, band, stopwords, min_length)
    n_select = min(math.ceil(OVERSAMPLE * size), len(candidates))
    if n_select < size:
        raise DataError(
            f"requested {size} seed words but only {len(candidates)} candidates are available "
            f"in the {band} band"
        )
    words = select_seed_words(freqs, band, n_select, stopwords, min_length)
    translations = {}
    for start in range(0, len(words), batch_size):
        batch = words[start:start + batch_size]
        try:
            result = provider.translate_batch(batch)
        except Exception as exc:
            raise TranslationError(f"translation provider failed: {exc}", batch) from exc
        translations.update(result)
    pairs = []
    for word in words:
        target = translations.get(word)
        if not target or any(ch.isspace() for ch in target):
            continue
        pairs.append((word, target))
        if len(pairs) == size:
            break
    if len(pairs) < size:
        raise DataError(f"only {len(pairs)} of {size} requested pairs survived translation")
    return SeedDictionary(
        tuple(pairs),
        source_kind="domain",
        selection="high_freq" if band == "high" else "lower_band",
        requested_size=size,
        provenance_notes=f"{n_select} words sent for translation, {len(translations)} translated",
    )


def load_pair_dictionary(path, format: str = "space_separated", source_kind: str = "muse") -> SeedDictionary:
    """Read a two-column generic dictionary; exact duplicate pairs keep their first occurrence."""
    pairs = {}
    for _, pair in _read_two_columns(Path(path), format):
        pairs.setdefault(pair, None)
    if not pairs:
        raise DataError(f"{path}: dictionary is empty")
    return SeedDictionary(
        tuple(pairs),
        source_kind=source_kind,
        selection="explicit",
        provenance_notes=f"loaded from {Path(path).name}",
    )


def save_pair_dictionary(dictionary: SeedDictionary, path, format: str = "space_separated") -> None:
    sep = "\t" if format == "tsv" else " "
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for src, tgt in dictionary.pairs:
            fh.write(f"{src}{sep}{tgt}\n")


class ValidationResult(NamedTuple):
    dictionary: SeedDictionary
    dropped: list  # (source word, reason)


def validate_pairs(dictionary: SeedDictionary, target_freqs: FrequencyTable, threshold: int) -> ValidationResult:
    """Keep pairs whose target word occurs at least ``threshold`` times."""
    if threshold < 0:
        raise DataError("threshold must be non-negative")
    kept, dropped = [], []
    for src, tgt in dictionary.pairs:
        count = target_freqs.count(tgt)
        if count >= threshold:
            kept.append((src, tgt))
        else:
            dropped.append((src, f"target {tgt!r} count {count} below threshold {threshold}"))
    return ValidationResult(dictionary.with_pairs(kept), dropped)


def write_drop_report(dropped, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\treason\n")
        for word, reason in dropped:
            fh.write(f"{word}\t{reason}\n")


def tune_validation_threshold(
    dictionary: SeedDictionary,
    target_freqs: FrequencyTable,
    candidate_thresholds: Sequence[int],
    evaluator: Callable[[SeedDictionary], float],
):
    """Return ``(threshold, score)`` maximizing ``evaluator`` over validated dictionaries.

    Ties go to the smallest threshold.
    """
    if not candidate_thresholds:
        raise DataError("candidate threshold list is empty")
    best = None
    for threshold in sorted(set(candidate_thresholds)):
        score = float(evaluator(validate_pairs(dictionary, target_freqs, threshold).dictionary))
        if best is None or score > best[1]:
            best = (threshold, score)
    return best


class DictionarySplit(NamedTuple):
    train: SeedDictionary
    heldout: SeedDictionary
    moved: int  # held-out pairs relocated to train to avoid source-word leakage


def split_dictionary(dictionary: SeedDictionary, train_fraction: float, seed: int) -> DictionarySplit:
    n = len(dictionary)
    if n < 2:
        raise DataError("need at least 2 pairs to split a dictionary")
    if not 0.0 < train_fraction < 1.0:
        raise DataError("train_fraction must lie in (0, 1)")
    n_train = math.floor(train_fraction * n + 1e-9)
    if n_train == 0 or n_train == n:
        raise DataError(f"train fraction {train_fraction} leaves one side of a {n}-pair split empty")
    order = np.random.default_rng(seed).permutation(n)
    train_idx = sorted(order[:n_train].tolist())
    held_idx = sorted(order[n_train:].tolist())
    train_sources = {dictionary.pairs[i][0] for i in train_idx}
    leaked = [i for i in held_idx if dictionary.pairs[i][0] in train_sources]
    if leaked:
        train_idx = sorted(train_idx + leaked)
        leaked_set = set(leaked)
        held_idx = [i for i in held_idx if i not in leaked_set]
    if not held_idx:
        raise DataError("every held-out pair shares a source word with the training part")
    train = dictionary.with_pairs([dictionary.pairs[i] for i in train_idx], requested_size=len(train_idx))
    heldout = dictionary.with_pairs([dictionary.pairs[i] for i in held_idx], requested_size=len(held_idx))
    return DictionarySplit(train, heldout, len(leaked))
