"""Synthetic bilingual worlds with known ground truth.

A world pairs a pseudo-English target space (words ``e0001, e0002, ...``)
with a pseudo-German source space (``g0001, ...``) aligned by index:

    source_i = target_i @ R(t_i) @ true_map + noise_i

``R(t)`` is an optional frequency-dependent rotation (``drift``), where
``t_i = log(rank_i) / log(vocab_size)``; with ``drift=0`` it is the identity
and the world is exactly linear.  Word ranks follow the index, and corpus
counts are Zipfian.

Vocabulary strata (by frequency rank) feed the templated tagging corpora:
stopwords, context/header words, job-title and organisation words, filler.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .dictionary import SeedDictionary, save_pair_dictionary
from .embedding_store import EmbeddingSpace, FrequencyTable, save_embeddings, save_frequency_table
from .errors import DataError
from .tagger import TaggedCorpus, save_conll

MAP_KINDS = ("orthogonal", "general_linear")
STRATA = ("stopword", "context", "job", "org", "filler")


@dataclass(frozen=True)
class SyntheticWorldConfig:
    vocab_size: int = 5000
    dim: int = 50
    noise_sigma: float = 0.0
    map_kind: str = "orthogonal"
    zipf_exponent: float = 1.0
    seed: int = 0
    dict_train: int = 2000
    dict_test: int = 1000
    # Extensions beyond the plain linear world; all inactive by default.
    drift: float = 0.0
    class_strength: float = 0.0
    n_stopwords: int = 20
    n_context: int = 200
    n_job: int = 300
    n_org: int = 300
    n_filler: int = 2000
    entity_rank_fraction: float = 0.04

    def __post_init__(self):
        if self.vocab_size < 1 or self.dim < 1:
            raise DataError("vocab_size and dim must be positive")
        if self.dim > self.vocab_size:
            raise DataError(f"dim {self.dim} exceeds vocab_size {self.vocab_size}")
        if self.dict_train < 1 or self.dict_test < 1:
            raise DataError("dictionary sizes must be positive")
        if self.dict_train + self.dict_test > self.vocab_size:
            raise DataError(
                f"dict_train + dict_test = {self.dict_train + self.dict_test} exceeds vocab_size {self.vocab_size}"
            )
        if self.noise_sigma < 0 or self.drift < 0 or self.class_strength < 0:
            raise DataError("noise_sigma, drift and class_strength must be non-negative")
        if self.zipf_exponent <= 0:
            raise DataError("zipf_exponent must be positive")
        if self.map_kind not in MAP_KINDS:
            raise DataError(f"unknown map_kind {self.map_kind!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticWorldConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise DataError(f"unknown world config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class SyntheticWorld:
    config: SyntheticWorldConfig
    target_space: EmbeddingSpace
    source_space: EmbeddingSpace
    true_map: np.ndarray
    gold_train: SeedDictionary
    gold_test: SeedDictionary
    target_freqs: FrequencyTable
    source_freqs: FrequencyTable
    strata: dict  # stratum name -> word indices (rank order)
    template_corpora: Optional[tuple] = None

    @property
    def target_words(self) -> tuple:
        return self.target_space.vocabulary

    @property
    def source_words(self) -> tuple:
        return self.source_space.vocabulary

    def translation(self) -> dict:
        """The full gold bijection source word -> target word."""
        return dict(zip(self.source_words, self.target_words))

    def stopwords(self) -> frozenset:
        return frozenset(self.source_words[i] for i in self.strata["stopword"])

    def target_stopwords(self) -> frozenset:
        return frozenset(self.target_words[i] for i in self.strata["stopword"])


def word_forms(prefix: str, n: int) -> list:
    width = max(4, len(str(n)))
    return [f"{prefix}{i:0{width}d}" for i in range(1, n + 1)]


def zipf_counts(n: int, exponent: float) -> np.ndarray:
    """Integer counts ``round(10 * n^s / rank^s)`` with a floor of 1, so count(1)/count(10) = 10^s."""
    ranks = np.arange(1, n + 1, dtype=np.float64)
    scale = 10.0 * float(n) ** exponent
    return np.maximum(1, np.rint(scale * ranks ** (-exponent))).astype(np.int64)


def random_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _rotate_by_rank(vectors: np.ndarray, t: np.ndarray, basis: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Apply ``R(t_i) = basis @ planar_rotations(t_i * angles) @ basis.T`` to each row."""
    z = vectors @ basis
    d = z.shape[1]
    half = d // 2
    a = z[:, 0:2 * half:2]
    b = z[:, 1:2 * half:2]
    phi = t[:, None] * angles[None, :]
    c, s = np.cos(phi), np.sin(phi)
    out = z.copy()
    out[:, 0:2 * half:2] = a * c - b * s
    out[:, 1:2 * half:2] = a * s + b * c
    return out @ basis.T


def _assign_strata(cfg: SyntheticWorldConfig, rng: np.random.Generator) -> dict:
    V = cfg.vocab_size
    pos = 0

    def take(n):
        nonlocal pos
        idx = list(range(pos, min(pos + n, V)))
        pos += len(idx)
        return idx

    strata = {"stopword": take(cfg.n_stopwords), "context": take(cfg.n_context)}
    limit = max(pos + cfg.n_job + cfg.n_org, math.floor(cfg.entity_rank_fraction * V))
    pool = np.arange(pos, min(limit, V))
    chosen = rng.choice(pool, size=min(len(pool), cfg.n_job + cfg.n_org), replace=False) if len(pool) else pool
    chosen = chosen.tolist()
    strata["job"] = sorted(chosen[:cfg.n_job])
    strata["org"] = sorted(chosen[cfg.n_job:])
    used = set(strata["stopword"]) | set(strata["context"]) | set(chosen)
    rest = [i for i in range(pos, V) if i not in used]
    strata["filler"] = rest[:cfg.n_filler]
    return strata


def generate_world(config: SyntheticWorldConfig, n_template_docs: int = 0) -> SyntheticWorld:
    """Build a seeded world; identical configs give identical worlds."""
    cfg = config
    V, d = cfg.vocab_size, cfg.dim
    # Independent streams so that changing one knob leaves the other draws intact.
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(6)]
    g_vec, g_map, g_noise, g_dict, g_strata, g_drift = streams

    strata = _assign_strata(cfg, g_strata)
    target = g_vec.standard_normal((V, d))
    if cfg.class_strength > 0:
        centroids = g_vec.standard_normal((len(STRATA), d))
        centroids /= np.linalg.norm(centroids, axis=1, keepdims=True)
        for k, name in enumerate(STRATA):
            idx = strata[name]
            target[idx] += cfg.class_strength * math.sqrt(d) * centroids[k]
    target /= np.linalg.norm(target, axis=1, keepdims=True)

    if cfg.map_kind == "orthogonal":
        true_map = random_orthogonal(d, g_map)
    else:
        scales = np.exp(g_map.uniform(-0.5, 0.5, size=d))
        true_map = (random_orthogonal(d, g_map) * scales) @ random_orthogonal(d, g_map)

    rotated = target
    if cfg.drift > 0:
        basis = random_orthogonal(d, g_drift)
        angles = cfg.drift * g_drift.standard_normal(d // 2)
        t = np.log(np.arange(1, V + 1)) / math.log(max(V, 2))
        rotated = _rotate_by_rank(target, t, basis, angles)
    source = rotated @ true_map
    if cfg.noise_sigma > 0:
        source = source + cfg.noise_sigma * g_noise.standard_normal((V, d))

    counts = zipf_counts(V, cfg.zipf_exponent)
    e_words, g_words = word_forms("e", V), word_forms("g", V)
    target_freqs = FrequencyTable(dict(zip(e_words, counts.tolist())))
    source_freqs = FrequencyTable(dict(zip(g_words, counts.tolist())))

    picks = g_dict.permutation(V)
    test_idx = sorted(picks[:cfg.dict_test].tolist())
    train_idx = sorted(picks[cfg.dict_test:cfg.dict_test + cfg.dict_train].tolist())
    gold_train = SeedDictionary(tuple((g_words[i], e_words[i]) for i in train_idx),
                                source_kind="synthetic", provenance_notes=f"world seed {cfg.seed}")
    gold_test = SeedDictionary(tuple((g_words[i], e_words[i]) for i in test_idx),
                               source_kind="synthetic", provenance_notes=f"world seed {cfg.seed}")

    world = SyntheticWorld(
        config=cfg,
        target_space=EmbeddingSpace(e_words, target, "en", target_freqs.entries),
        source_space=EmbeddingSpace(g_words, source, "de", source_freqs.entries),
        true_map=true_map,
        gold_train=gold_train,
        gold_test=gold_test,
        target_freqs=target_freqs,
        source_freqs=source_freqs,
        strata=strata,
    )
    if n_template_docs:
        world.template_corpora = generate_tagged_corpora(world, n_template_docs, cfg.seed)
    return world


@dataclass
class CorpusStats:
    span_counts: dict
    entities_per_doc: float


def generate_tagged_corpora(world: SyntheticWorld, n_sequences: int, seed: int,
                            entities_per_doc: float = 4.0, min_stratum: int = 5):
    """Parallel (source, target) tagged corpora in an experience-section template.

    Each document opens with one or two context (header) words and holds
    entries of the form ``JOB (1-3 tokens) [cue] ORG (1-2 tokens) filler*``;
    an entry drops its organisation with probability 0.2.  Entities per
    document average roughly ``entities_per_doc`` and are never fewer than 1.
    The source corpus is the token-by-token translation of the target one.
    """
    if n_sequences < 1:
        raise DataError("n_sequences must be positive")
    for name in ("context", "job", "org", "filler"):
        if len(world.strata[name]) < min_stratum:
            raise DataError(
                f"vocabulary stratum {name!r} has {len(world.strata[name])} words, need {min_stratum}; "
                "increase vocab_size"
            )
    rng = np.random.default_rng(seed)
    e_words, g_words = world.target_words, world.source_words
    context = np.array(world.strata["context"])
    job = np.array(world.strata["job"])
    org = np.array(world.strata["org"])
    filler = np.array(world.strata["filler"])
    # Frequency-weighted sampling within strata keeps corpus counts Zipf-like.
    def weights(idx):
        w = 1.0 / (idx + 1.0)
        return w / w.sum()
    w_ctx, w_job, w_org, w_fill = weights(context), weights(job), weights(org), weights(filler)
    n_cues = max(1, len(context) // 10)
    cues = context[:n_cues]
    entries_mean = max(entities_per_doc / 1.8, 1.0)

    docs, labels = [], []
    for _ in range(n_sequences):
        toks, tags = [], []
        for idx in rng.choice(context, size=rng.integers(1, 3), p=w_ctx):
            toks.append(int(idx))
            tags.append("O")
        n_entries = max(1, int(rng.poisson(entries_mean - 1)) + 1)
        for _ in range(n_entries):
            span = rng.choice(job, size=rng.integers(1, 4), p=w_job)
            for k, idx in enumerate(span):
                toks.append(int(idx))
                tags.append("B-JOB_TITLE" if k == 0 else "I-JOB_TITLE")
            if rng.random() < 0.8:
                toks.append(int(rng.choice(cues)))
                tags.append("O")
                span = rng.choice(org, size=rng.integers(1, 3), p=w_org)
                for k, idx in enumerate(span):
                    toks.append(int(idx))
                    tags.append("B-ORG_NAME" if k == 0 else "I-ORG_NAME")
            for idx in rng.choice(filler, size=rng.integers(0, 5), p=w_fill):
                toks.append(int(idx))
                tags.append("O")
            if rng.random() < 0.3:
                toks.append(int(rng.choice(context, p=w_ctx)))
                tags.append("O")
        docs.append(toks)
        labels.append(tuple(tags))
    target = TaggedCorpus(tuple(tuple(e_words[i] for i in d) for d in docs), tuple(labels), "en")
    source = TaggedCorpus(tuple(tuple(g_words[i] for i in d) for d in docs), tuple(labels), "de")
    return source, target


def corpus_stats(corpus: TaggedCorpus) -> CorpusStats:
    counts = corpus.span_counts()
    return CorpusStats(counts, sum(counts.values()) / max(len(corpus), 1))


def translation_lexicon(world: SyntheticWorld, miss_rate: float = 0.0, error_rate: float = 0.0,
                        seed: int = 0, exclude_test: bool = True) -> dict:
    """Source -> target lexicon standing in for a machine-translation service.

    A ``miss_rate`` share of words has no entry and an ``error_rate`` share
    maps to a random wrong target word.  Test-set source words are left out
    so that dictionaries built from it never leak into intrinsic evaluation.
    """
    rng = np.random.default_rng(seed)
    V = len(world.source_words)
    test = {s for s, _ in world.gold_test.pairs} if exclude_test else set()
    miss = rng.random(V) < miss_rate
    wrong = rng.random(V) < error_rate
    replacement = rng.integers(0, V, size=V)
    lexicon = {}
    for i, (src, tgt) in enumerate(zip(world.source_words, world.target_words)):
        if miss[i] or src in test:
            continue
        lexicon[src] = world.target_words[replacement[i]] if wrong[i] else tgt
    return lexicon


def generic_dictionary(world: SyntheticWorld, size: int, error_rate: float, seed: int,
                       source_kind: str = "idp") -> SeedDictionary:
    """Random vocabulary sample (no frequency preference) with some wrong translations."""
    rng = np.random.default_rng(seed)
    test = {s for s, _ in world.gold_test.pairs}
    candidates = [i for i, w in enumerate(world.source_words) if w not in test]
    if size > len(candidates):
        raise DataError(f"generic dictionary of {size} pairs exceeds {len(candidates)} candidates")
    chosen = rng.choice(candidates, size=size, replace=False)
    V = len(world.target_words)
    pairs = []
    for i in chosen.tolist():
        j = int(rng.integers(0, V)) if rng.random() < error_rate else i
        pairs.append((world.source_words[i], world.target_words[j]))
    return SeedDictionary(tuple(dict.fromkeys(pairs)), source_kind=source_kind,
                          provenance_notes=f"synthetic generic dictionary, error rate {error_rate}")


@dataclass(frozen=True)
class BundleConfig:
    """Everything needed to materialize a world and its experiment inputs."""

    world: SyntheticWorldConfig = field(default_factory=SyntheticWorldConfig)
    pivot_docs: int = 600
    low_resource_docs: int = 600
    entities_per_doc: float = 4.0
    lexicon_miss_rate: float = 0.06
    lexicon_error_rate: float = 0.0
    muse_size: Optional[int] = None  # defaults to the whole gold training dictionary
    idp_size: int = 0  # 0 means the same size as the MUSE-style dictionary
    idp_error_rate: float = 0.3

    @classmethod
    def from_dict(cls, data: dict) -> "BundleConfig":
        data = dict(data)
        world = SyntheticWorldConfig.from_dict(data.pop("world", {}))
        known = set(cls.__dataclass_fields__) - {"world"}
        unknown = set(data) - known
        if unknown:
            raise DataError(f"unknown bundle config keys: {sorted(unknown)}")
        return cls(world=world, **data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Bundle:
    config: BundleConfig
    world: SyntheticWorld
    pivot_corpus: TaggedCorpus
    low_resource_corpus: TaggedCorpus
    lexicon: dict
    muse: SeedDictionary
    idp: SeedDictionary


def build_bundle(config: BundleConfig) -> Bundle:
    """World plus disjoint pivot and low-resource corpora, lexicon and generic dictionaries."""
    world = generate_world(config.world)
    seeds = np.random.SeedSequence([config.world.seed, 1]).generate_state(4).tolist()
    n_docs = config.pivot_docs + config.low_resource_docs
    source, target = generate_tagged_corpora(world, n_docs, seeds[0], config.entities_per_doc)
    pivot = target.subset(range(config.pivot_docs))
    low = source.subset(range(config.pivot_docs, n_docs))
    lexicon = translation_lexicon(world, config.lexicon_miss_rate, config.lexicon_error_rate, seeds[1])
    muse = world.gold_train
    if config.muse_size is not None:
        muse = muse.truncated(config.muse_size)
    muse = muse.with_pairs(muse.pairs, source_kind="muse")
    idp = generic_dictionary(world, config.idp_size or len(muse), config.idp_error_rate, seeds[2])
    return Bundle(config, world, pivot, low, lexicon, muse, idp)


MANIFEST_FILES = {
    "target_embeddings": "target.vec",
    "source_embeddings": "source.vec",
    "target_freqs": "target.freq.tsv",
    "source_freqs": "source.freq.tsv",
    "lexicon": "lexicon.tsv",
    "muse_dictionary": "muse.train.txt",
    "idp_dictionary": "idp.tsv",
    "test_set": "muse.test.txt",
    "stopwords": "stopwords.txt",
    "pivot_corpus": "pivot.conll",
    "low_resource_corpus": "low_resource.conll",
}


def export_bundle(bundle: Bundle, out_dir) -> Path:
    """Write all files plus ``manifest.json`` (config, seed, relative paths); returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    w = bundle.world
    save_embeddings(w.target_space, out / MANIFEST_FILES["target_embeddings"])
    save_embeddings(w.source_space, out / MANIFEST_FILES["source_embeddings"])
    save_frequency_table(w.target_freqs, out / MANIFEST_FILES["target_freqs"])
    save_frequency_table(w.source_freqs, out / MANIFEST_FILES["source_freqs"])
    with open(out / MANIFEST_FILES["lexicon"], "w", encoding="utf-8", newline="\n") as fh:
        for src, tgt in bundle.lexicon.items():
            fh.write(f"{src}\t{tgt}\n")
    save_pair_dictionary(bundle.muse, out / MANIFEST_FILES["muse_dictionary"], "space_separated")
    save_pair_dictionary(bundle.idp, out / MANIFEST_FILES["idp_dictionary"], "tsv")
    save_pair_dictionary(w.gold_test, out / MANIFEST_FILES["test_set"], "space_separated")
    with open(out / MANIFEST_FILES["stopwords"], "w", encoding="utf-8", newline="\n") as fh:
        for word in sorted(w.stopwords()):
            fh.write(word + "\n")
    save_conll(bundle.pivot_corpus, out / MANIFEST_FILES["pivot_corpus"])
    save_conll(bundle.low_resource_corpus, out / MANIFEST_FILES["low_resource_corpus"])
    manifest = {
        "kind": "seedlex-synthetic-world",
        "seed": bundle.config.world.seed,
        "config": bundle.config.to_dict(),
        "languages": {"pivot": "en", "low_resource": "de"},
        "files": dict(MANIFEST_FILES),
    }
    path = out / "manifest.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
