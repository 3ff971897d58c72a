"""Experiment runner: dictionary factor grid and low-resource data scaling.

Every cell runs the same pipeline::

    seed dictionary -> (threshold validation) -> map fit -> projection
        -> P@1 on the test dictionary
        -> zero-shot F1 (tagger trained on pivot data only)
        -> joint F1 (pivot data plus a fixed low-resource subset)

Randomness is derived from the master seed with :func:`derive_seed`, keyed
by a string, so any cell can be re-run on its own with identical results.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import alignment, dictionary as dictmod, intrinsic_eval, tagger
from .dictionary import FileTranslationProvider, SeedDictionary
from .embedding_store import EmbeddingSpace, FrequencyTable, load_embeddings, load_frequency_table, load_stopwords
from .errors import DataError
from .intrinsic_eval import TranslationTestSet
from .tagger import TaggedCorpus

log = logging.getLogger(__name__)

GENERIC_SOURCES = ("muse", "idp")
DICT_SOURCES = ("domain",) + GENERIC_SOURCES
SPLIT_TOLERANCE = 1e-9


def derive_seed(master: int, key: str) -> int:
    """Stable 63-bit seed from ``sha256("<master>|<key>")``."""
    digest = hashlib.sha256(f"{master}|{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# -- configuration ---------------------------------------------------------

def _from_dict(cls, data, where):
    data = dict(data or {})
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise DataError(f"unknown keys in config section {where!r}: {sorted(unknown)}")
    return cls(**data)


@dataclass
class PathsConfig:
    source_embeddings: Optional[str] = None
    target_embeddings: Optional[str] = None
    source_freqs: Optional[str] = None
    target_freqs: Optional[str] = None
    lexicon: Optional[str] = None
    muse_dictionary: Optional[str] = None
    idp_dictionary: Optional[str] = None
    test_set: Optional[str] = None
    pivot_corpus: Optional[str] = None
    low_resource_corpus: Optional[str] = None
    stopwords: Optional[str] = None
    output_dir: Optional[str] = None


@dataclass
class FactorsConfig:
    dict_source: list = field(default_factory=lambda: ["idp", "muse", "domain"])
    dict_size: list = field(default_factory=lambda: [10000, 5000, 1000])
    freq_band: list = field(default_factory=lambda: ["high", "lower"])
    sequential: bool = True
    baseline_source: str = "domain"
    baseline_size: int = 5000
    baseline_band: str = "high"
    selection_metric: str = "zero_shot_f1"


@dataclass
class MapConfig:
    method: str = "cca"
    ridge: Optional[float] = None
    keep_ratio: float = 1.0
    center: bool = False


@dataclass
class ValidationConfig:
    thresholds: list = field(default_factory=lambda: [0])
    metric: str = "p1"  # or "f1": zero-shot F1 on the low-resource dev split
    train_fraction: float = 0.8
    min_length: int = 3


@dataclass
class TaggerConfig:
    epochs: int = 10
    radius: int = 1


@dataclass
class DataConfig:
    split: list = field(default_factory=lambda: [0.70, 0.15, 0.15])
    joint_docs: int = 200
    low_resource_doc_counts: list = field(default_factory=lambda: [0, 200, 500, "all"])
    pivot_language: str = "en"
    low_resource_language: str = "de"


@dataclass
class ExperimentConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    factors: FactorsConfig = field(default_factory=FactorsConfig)
    map: MapConfig = field(default_factory=MapConfig)
    validation: ValidationConfig = field(default_factory=ValidationConfig)
    tagger: TaggerConfig = field(default_factory=TaggerConfig)
    data: DataConfig = field(default_factory=DataConfig)
    seed: int = 0
    manifest: Optional[str] = None

    _SECTIONS = {
        "paths": PathsConfig, "factors": FactorsConfig, "map": MapConfig,
        "validation": ValidationConfig, "tagger": TaggerConfig, "data": DataConfig,
    }

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> "ExperimentConfig":
        data = dict(data)
        unknown = set(data) - set(cls._SECTIONS) - {"seed", "manifest"}
        if unknown:
            raise DataError(f"unknown top-level config keys: {sorted(unknown)}")
        sections = {name: _from_dict(kind, data.get(name), name) for name, kind in cls._SECTIONS.items()}
        cfg = cls(**sections, seed=int(data.get("seed", 0)), manifest=data.get("manifest"))
        if base_dir is not None:
            cfg.resolve_paths(base_dir)
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid JSON config: {exc}") from None
        return cls.from_dict(data, base_dir=path.parent)

    def to_dict(self) -> dict:
        out = {name: dataclasses.asdict(getattr(self, name)) for name in self._SECTIONS}
        out["seed"] = self.seed
        out["manifest"] = self.manifest
        return out

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def resolve_paths(self, base_dir) -> None:
        """Make relative paths absolute against ``base_dir`` and fill gaps from the manifest."""
        base = Path(base_dir)
        if self.manifest:
            manifest_path = (base / self.manifest).resolve()
            self.manifest = str(manifest_path)
            apply_manifest(self, manifest_path)
        for f in dataclasses.fields(self.paths):
            value = getattr(self.paths, f.name)
            if value is not None:
                setattr(self.paths, f.name, str((base / value).resolve()))

    def validate(self, require=()) -> None:
        fr, dt = self.factors, self.data
        if abs(sum(dt.split) - 1.0) > SPLIT_TOLERANCE or len(dt.split) != 3:
            raise DataError(f"split fractions {dt.split} must be three values summing to 1")
        for src in fr.dict_source + [fr.baseline_source]:
            if src not in DICT_SOURCES:
                raise DataError(f"unknown dictionary source {src!r}")
        for band in fr.freq_band + [fr.baseline_band]:
            if band not in dictmod.BANDS:
                raise DataError(f"unknown frequency band {band!r}")
        for size in fr.dict_size + [fr.baseline_size]:
            if int(size) < 1:
                raise DataError(f"dictionary size must be positive, got {size}")
        if fr.selection_metric not in ("zero_shot_f1", "joint_f1", "p_at_1"):
            raise DataError(f"unknown selection metric {fr.selection_metric!r}")
        if self.map.method not in alignment.METHODS:
            raise DataError(f"unknown map method {self.map.method!r}")
        if not self.validation.thresholds:
            raise DataError("validation.thresholds must not be empty")
        if self.validation.metric not in ("p1", "f1"):
            raise DataError(f"unknown validation metric {self.validation.metric!r}")
        for c in dt.low_resource_doc_counts:
            if c != "all" and (not isinstance(c, int) or c < 0):
                raise DataError(f"low-resource doc counts must be non-negative integers or 'all', got {c!r}")
        if dt.joint_docs < 0:
            raise DataError("joint_docs must be non-negative")
        for name in require:
            value = getattr(self.paths, name)
            if value is None:
                raise DataError(f"config is missing paths.{name}")
            if not Path(value).exists():
                raise DataError(f"paths.{name} does not exist: {value}")


def apply_manifest(config: ExperimentConfig, manifest_path) -> None:
    """Fill unset input paths from a synthetic-world manifest."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("kind") != "seedlex-synthetic-world":
        raise DataError(f"{manifest_path} is not a synthetic world manifest")
    for key, rel in manifest["files"].items():
        if hasattr(config.paths, key) and getattr(config.paths, key) is None:
            setattr(config.paths, key, str((manifest_path.parent / rel).resolve()))


# -- inputs ----------------------------------------------------------------

@dataclass
class Inputs:
    source: EmbeddingSpace
    target: EmbeddingSpace
    source_freqs: FrequencyTable
    target_freqs: FrequencyTable
    provider: Optional[object]
    generic: dict  # "muse"/"idp" -> SeedDictionary
    test_set: TranslationTestSet
    pivot_corpus: TaggedCorpus
    low_corpus: TaggedCorpus
    stopwords: frozenset = frozenset()

    @classmethod
    def from_bundle(cls, bundle) -> "Inputs":
        w = bundle.world
        return cls(
            source=w.source_space,
            target=w.target_space,
            source_freqs=w.source_freqs,
            target_freqs=w.target_freqs,
            provider=FileTranslationProvider(bundle.lexicon),
            generic={"muse": bundle.muse, "idp": bundle.idp},
            test_set=TranslationTestSet.from_dictionary(w.gold_test),
            pivot_corpus=bundle.pivot_corpus,
            low_corpus=bundle.low_resource_corpus,
            stopwords=w.stopwords(),
        )


REQUIRED_PATHS = (
    "source_embeddings", "target_embeddings", "source_freqs", "target_freqs",
    "test_set", "pivot_corpus", "low_resource_corpus",
)


def load_inputs(config: ExperimentConfig) -> Inputs:
    p, dt = config.paths, config.data
    config.validate(require=REQUIRED_PATHS)
    generic = {}
    if p.muse_dictionary:
        generic["muse"] = dictmod.load_pair_dictionary(p.muse_dictionary, "space_separated", "muse")
    if p.idp_dictionary:
        generic["idp"] = dictmod.load_pair_dictionary(p.idp_dictionary, "tsv", "idp")
    return Inputs(
        source=load_embeddings(p.source_embeddings, language_id=dt.low_resource_language),
        target=load_embeddings(p.target_embeddings, language_id=dt.pivot_language),
        source_freqs=load_frequency_table(p.source_freqs),
        target_freqs=load_frequency_table(p.target_freqs),
        provider=FileTranslationProvider.from_file(p.lexicon) if p.lexicon else None,
        generic=generic,
        test_set=intrinsic_eval.load_test_set(p.test_set),
        pivot_corpus=tagger.load_conll(p.pivot_corpus, language_id=dt.pivot_language),
        low_corpus=tagger.load_conll(p.low_resource_corpus, language_id=dt.low_resource_language),
        stopwords=load_stopwords(p.stopwords) if p.stopwords else frozenset(),
    )


# -- corpus splitting --------------------------------------------------------

def split_corpus(corpus: TaggedCorpus, fractions: Sequence[float], seed: int):
    """Seeded document-level split into (train, dev, test).

    Dev and test get ``floor(fraction * n)`` documents; the remainder goes to train.
    """
    fractions = list(fractions)
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > SPLIT_TOLERANCE:
        raise DataError(f"split fractions {fractions} must be three values summing to 1")
    if any(f < 0 for f in fractions):
        raise DataError("split fractions must be non-negative")
    n = len(corpus)
    n_dev = math.floor(fractions[1] * n + 1e-9)
    n_test = math.floor(fractions[2] * n + 1e-9)
    order = np.random.default_rng(seed).permutation(n).tolist()
    n_train = n - n_dev - n_test
    return (
        corpus.subset(order[:n_train]),
        corpus.subset(order[n_train:n_train + n_dev]),
        corpus.subset(order[n_train + n_dev:]),
    )


# -- reports ---------------------------------------------------------------

@dataclass
class ExperimentReport:
    kind: str  # "grid" or "scaling"
    columns: tuple
    rows: list  # dicts keyed by column
    timings: list = field(default_factory=list)  # (row label, seconds)

    def body(self) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            lines.append("\t".join(_cell(row.get(c)) for c in self.columns))
        return "\n".join(lines) + "\n"

    def write(self, out_dir, stem: Optional[str] = None) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.kind
        path = out / f"{stem}.tsv"
        path.write_text(self.body(), encoding="utf-8")
        with open(out / f"{stem}.timings.tsv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("row\tseconds\n")
            for label, secs in self.timings:
                fh.write(f"{label}\t{secs:.3f}\n")
        return path


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


GRID_COLUMNS = (
    "block", "dict_source", "dict_size", "freq_band", "joint_training_f1", "zero_shot_f1", "p_at_1",
    "dict_pairs", "kept_pairs", "oov_pairs", "threshold", "p1_evaluated", "p1_skipped", "cell_seed", "status",
)
SCALING_COLUMNS = (
    "low_resource_data", "docs", "monolingual_f1", "cross_lingual_f1", "cross_lingual_gain",
    "dict_pairs", "status",
)


# -- pipeline ----------------------------------------------------------------

@dataclass(frozen=True)
class CellKey:
    dict_source: str
    dict_size: int
    freq_band: str

    def __str__(self) -> str:
        return f"{self.dict_source}/{self.dict_size}/{self.freq_band}"


@dataclass
class CellResult:
    key: CellKey
    seed: int
    joint_f1: Optional[float] = None
    zero_shot_f1: Optional[float] = None
    p_at_1: Optional[float] = None
    dict_pairs: Optional[int] = None
    kept_pairs: Optional[int] = None
    oov_pairs: Optional[int] = None
    threshold: Optional[int] = None
    p1_evaluated: Optional[int] = None
    p1_skipped: Optional[int] = None
    error: Optional[str] = None
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None

    def metric(self, name: str) -> Optional[float]:
        return getattr(self, {"zero_shot_f1": "zero_shot_f1", "joint_f1": "joint_f1", "p_at_1": "p_at_1"}[name])

    def row(self, block: str) -> dict:
        pct = lambda v: None if v is None else 100.0 * v  # noqa: E731
        return {
            "block": block,
            "dict_source": self.key.dict_source,
            "dict_size": self.key.dict_size,
            "freq_band": self.key.freq_band if self.key.dict_source == "domain" else "-",
            "joint_training_f1": pct(self.joint_f1),
            "zero_shot_f1": pct(self.zero_shot_f1),
            "p_at_1": pct(self.p_at_1),
            "dict_pairs": self.dict_pairs,
            "kept_pairs": self.kept_pairs,
            "oov_pairs": self.oov_pairs,
            "threshold": self.threshold,
            "p1_evaluated": self.p1_evaluated,
            "p1_skipped": self.p1_skipped,
            "cell_seed": self.seed,
            "status": "ok" if self.ok else f"failed: {self.error}",
        }


class Runner:
    """Holds loaded inputs, data splits and the pivot-only tagger shared by all cells.

    Everything cached here is a pure function of config and inputs, so cells
    evaluated through one runner match cells evaluated standalone.
    """

    def __init__(self, config: ExperimentConfig, inputs: Inputs):
        config.validate()
        self.config = config
        self.inputs = inputs
        seed = config.seed
        dt = config.data
        self.pivot_train, self.pivot_dev, self.pivot_test = split_corpus(
            inputs.pivot_corpus, dt.split, derive_seed(seed, "split/pivot"))
        self.low_train, self.low_dev, self.low_test = split_corpus(
            inputs.low_corpus, dt.split, derive_seed(seed, "split/low-resource"))
        # One fixed ordering of low-resource training docs; every subset is a prefix of it.
        self.low_order = np.random.default_rng(derive_seed(seed, "low-resource/order")).permutation(
            len(self.low_train)).tolist()
        self.tagger_seed = derive_seed(seed, "tagger")
        self._pivot_model = None
        self._cells = {}

    # shared pieces

    @property
    def pivot_model(self) -> tagger.TaggerModel:
        if self._pivot_model is None:
            tc = self.config.tagger
            self._pivot_model = tagger.train_tagger(
                [self.pivot_train], {self.pivot_train.language_id: self.inputs.target},
                epochs=tc.epochs, seed=self.tagger_seed, radius=tc.radius)
        return self._pivot_model

    def low_subset(self, count: int) -> TaggedCorpus:
        if count > len(self.low_train):
            raise DataError(f"requested {count} low-resource documents, training split has {len(self.low_train)}")
        return self.low_train.subset(self.low_order[:count])

    def resolve_count(self, count) -> int:
        return len(self.low_train) if count == "all" else int(count)

    def spaces(self, projected: EmbeddingSpace) -> dict:
        return {self.config.data.pivot_language: self.inputs.target,
                self.config.data.low_resource_language: projected}

    # pipeline steps

    def build_dictionary(self, key: CellKey) -> SeedDictionary:
        inp = self.inputs
        if key.dict_source == "domain":
            if inp.provider is None:
                raise DataError("domain dictionaries need a translation lexicon (paths.lexicon)")
            return dictmod.build_domain_dictionary(
                inp.source_freqs, inp.provider, key.freq_band, key.dict_size,
                inp.stopwords, self.config.validation.min_length)
        if key.freq_band != "high":
            raise DataError("the frequency-band factor applies only to domain dictionaries")
        generic = inp.generic.get(key.dict_source)
        if generic is None:
            raise DataError(f"no {key.dict_source} dictionary configured")
        if len(generic) < key.dict_size:
            raise DataError(f"{key.dict_source} dictionary has {len(generic)} pairs, {key.dict_size} requested")
        return generic.truncated(key.dict_size)

    def fit(self, dictionary: SeedDictionary):
        mc = self.config.map
        pm = alignment.pair_matrices(dictionary, self.inputs.source, self.inputs.target)
        pmap = alignment.fit_map(pm, mc.method, ridge=mc.ridge, keep_ratio=mc.keep_ratio, center=mc.center)
        return pm, pmap, alignment.project_space(self.inputs.source, pmap)

    def heldout_p1_evaluator(self, heldout: SeedDictionary):
        test = TranslationTestSet.from_dictionary(heldout)

        def evaluate(candidate: SeedDictionary) -> float:
            try:
                _, _, projected = self.fit(candidate)
            except DataError:
                return float("-inf")
            return intrinsic_eval.precision_at_1(projected, self.inputs.target, test, keep_per_word=False).p_at_1
        return evaluate

    def dev_f1_evaluator(self):
        def evaluate(candidate: SeedDictionary) -> float:
            try:
                _, _, projected = self.fit(candidate)
            except DataError:
                return float("-inf")
            return tagger.evaluate_f1(self.pivot_model, self.low_dev, self.spaces(projected)).average_f1
        return evaluate

    def choose_threshold(self, dictionary: SeedDictionary, seed: int) -> int:
        vc = self.config.validation
        if len(set(vc.thresholds)) == 1:
            return int(vc.thresholds[0])
        if vc.metric == "p1":
            split = dictmod.split_dictionary(dictionary, vc.train_fraction, seed)
            threshold, _ = dictmod.tune_validation_threshold(
                split.train, self.inputs.target_freqs, vc.thresholds, self.heldout_p1_evaluator(split.heldout))
        else:
            threshold, _ = dictmod.tune_validation_threshold(
                dictionary, self.inputs.target_freqs, vc.thresholds, self.dev_f1_evaluator())
        return int(threshold)

    def prepare_projection(self, key: CellKey, seed: int, result: CellResult) -> EmbeddingSpace:
        built = self.build_dictionary(key)
        result.dict_pairs = len(built)
        result.threshold = self.choose_threshold(built, seed)
        validated = dictmod.validate_pairs(built, self.inputs.target_freqs, result.threshold).dictionary
        pm, _, projected = self.fit(validated)
        result.kept_pairs = pm.n
        result.oov_pairs = pm.skipped
        return projected

    def run_cell(self, key: CellKey) -> CellResult:
        if key in self._cells:
            return self._cells[key]
        seed = derive_seed(self.config.seed, f"cell/{key}")
        result = CellResult(key, seed)
        start = time.perf_counter()
        try:
            projected = self.prepare_projection(key, seed, result)
            p1 = intrinsic_eval.precision_at_1(projected, self.inputs.target, self.inputs.test_set,
                                               keep_per_word=False)
            result.p_at_1, result.p1_evaluated, result.p1_skipped = p1.p_at_1, p1.evaluated, p1.skipped_oov
            spaces = self.spaces(projected)
            result.zero_shot_f1 = tagger.evaluate_f1(self.pivot_model, self.low_test, spaces).average_f1
            result.joint_f1 = self.joint_f1(spaces, self.config.data.joint_docs)
        except DataError as exc:
            log.warning("cell %s failed: %s", key, exc)
            result.error = str(exc)
        result.seconds = time.perf_counter() - start
        self._cells[key] = result
        return result

    def joint_f1(self, spaces: dict, docs: int) -> float:
        if docs == 0:
            return tagger.evaluate_f1(self.pivot_model, self.low_test, spaces).average_f1
        tc = self.config.tagger
        model = tagger.train_tagger([self.pivot_train, self.low_subset(docs)], spaces,
                                    epochs=tc.epochs, seed=self.tagger_seed, radius=tc.radius)
        return tagger.evaluate_f1(model, self.low_test, spaces).average_f1

    def monolingual_f1(self, docs: int) -> float:
        tc = self.config.tagger
        subset = self.low_subset(docs)
        spaces = {self.config.data.low_resource_language: self.inputs.source}
        model = tagger.train_tagger([subset], spaces, epochs=tc.epochs, seed=self.tagger_seed, radius=tc.radius)
        return tagger.evaluate_f1(model, self.low_test, spaces).average_f1


def _grid_plan(runner: Runner):
    """Yield ``(block, key)`` pairs; sequential mode picks each block's winner before the next."""
    fr = runner.config.factors
    if not fr.sequential:
        # The band factor does not apply to generic dictionaries: one cell per size.
        seen = set()
        for src, size, band in itertools.product(fr.dict_source, fr.dict_size, fr.freq_band):
            key = CellKey(src, int(size), band if src == "domain" else "high")
            if key not in seen:
                seen.add(key)
                yield "grid", key
        return

    def best(keys):
        scored = [(runner.run_cell(k).metric(fr.selection_metric), i, k) for i, k in enumerate(keys)]
        scored = [(s, i, k) for s, i, k in scored if s is not None]
        if not scored:
            return keys[0]
        top = max(s for s, _, _ in scored)
        return min((i, k) for s, i, k in scored if s == top)[1]

    size, band = int(fr.baseline_size), fr.baseline_band
    keys = [CellKey(src, size, band) for src in fr.dict_source]
    for k in keys:
        yield "source", k
    source = best(keys).dict_source
    keys = [CellKey(source, size, b) for b in fr.freq_band]
    for k in keys:
        yield "frequency", k
    band = best(keys).freq_band
    keys = [CellKey(source, int(z), band) for z in fr.dict_size]
    for k in keys:
        yield "size", k


def run_factor_grid(config: ExperimentConfig, inputs: Optional[Inputs] = None,
                    runner: Optional[Runner] = None) -> ExperimentReport:
    """Dictionary-factor experiments, one report row per (block, cell)."""
    if runner is None:
        runner = Runner(config, inputs if inputs is not None else load_inputs(config))
    rows, timings = [], []
    for block, key in _grid_plan(runner):
        result = runner.run_cell(key)
        rows.append(result.row(block))
        timings.append((f"{block}:{key}", result.seconds))
    return ExperimentReport("grid", GRID_COLUMNS, rows, timings)


def _scaling_label(count, resolved: int) -> str:
    if resolved == 0:
        return "none (zero-shot)"
    if count == "all":
        return f"full set ({resolved})"
    return f"{resolved} docs"


def run_data_scaling(config: ExperimentConfig, inputs: Optional[Inputs] = None,
                     runner: Optional[Runner] = None) -> ExperimentReport:
    """Monolingual vs cross-lingual F1 as low-resource training data grows.

    The dictionary is the configured baseline cell.  The gain column is
    cross-lingual minus monolingual F1, or the zero-shot F1 itself at 0 documents.
    """
    if runner is None:
        runner = Runner(config, inputs if inputs is not None else load_inputs(config))
    fr = config.factors
    key = CellKey(fr.baseline_source, int(fr.baseline_size), fr.baseline_band)
    probe = CellResult(key, derive_seed(config.seed, f"cell/{key}"))
    projected = runner.prepare_projection(key, probe.seed, probe)
    spaces = runner.spaces(projected)
    counts = [(c, runner.resolve_count(c)) for c in config.data.low_resource_doc_counts]
    for _, resolved in counts:
        if resolved > len(runner.low_train):
            raise DataError(
                f"low-resource doc count {resolved} exceeds the training split ({len(runner.low_train)} docs)")
    rows, timings = [], []
    for count, resolved in counts:
        start = time.perf_counter()
        cross = runner.joint_f1(spaces, resolved)
        mono = runner.monolingual_f1(resolved) if resolved > 0 else None
        gain = cross if mono is None else cross - mono
        rows.append({
            "low_resource_data": _scaling_label(count, resolved),
            "docs": resolved,
            "monolingual_f1": None if mono is None else 100.0 * mono,
            "cross_lingual_f1": 100.0 * cross,
            "cross_lingual_gain": 100.0 * gain,
            "dict_pairs": probe.kept_pairs,
            "status": "ok",
        })
        timings.append((str(resolved), time.perf_counter() - start))
    return ExperimentReport("scaling", SCALING_COLUMNS, rows, timings)


def write_report(report: ExperimentReport, config: ExperimentConfig, out_dir) -> Path:
    """Write the report, its timing sidecar and the effective config next to it."""
    path = report.write(out_dir)
    config.dump(Path(out_dir) / f"{report.kind}.config.json")
    return path
