"""Domain-specific bilingual seed dictionaries and linear cross-lingual embedding maps."""

from .alignment import (
    PairedMatrix,
    ProjectionMap,
    fit_cca,
    fit_least_squares,
    fit_map,
    fit_procrustes,
    load_map,
    pair_matrices,
    project_space,
    save_map,
)
from .dictionary import (
    FileTranslationProvider,
    SeedDictionary,
    build_domain_dictionary,
    load_pair_dictionary,
    select_seed_words,
    split_dictionary,
    tune_validation_threshold,
    validate_pairs,
)
from .embedding_store import (
    EmbeddingSpace,
    FrequencyTable,
    load_embeddings,
    load_frequency_table,
    save_embeddings,
    unit_normalize,
)
from .errors import DataError, DimensionError, FormatError, TranslationError
from .intrinsic_eval import P1Report, TranslationTestSet, load_test_set, nearest_neighbor, precision_at_1
from .synthetic import SyntheticWorldConfig, generate_tagged_corpora, generate_world
from .tagger import (
    Span,
    TaggedCorpus,
    TaggerModel,
    evaluate_f1,
    extract_spans,
    featurize,
    load_conll,
    train_tagger,
    viterbi_decode,
)

__version__ = "0.1.0"

__all__ = [
    "PairedMatrix",
    "ProjectionMap",
    "fit_cca",
    "fit_least_squares",
    "fit_map",
    "fit_procrustes",
    "load_map",
    "pair_matrices",
    "project_space",
    "save_map",
    "FileTranslationProvider",
    "SeedDictionary",
    "build_domain_dictionary",
    "load_pair_dictionary",
    "select_seed_words",
    "split_dictionary",
    "tune_validation_threshold",
    "validate_pairs",
    "EmbeddingSpace",
    "FrequencyTable",
    "load_embeddings",
    "load_frequency_table",
    "save_embeddings",
    "unit_normalize",
    "DataError",
    "DimensionError",
    "FormatError",
    "TranslationError",
    "P1Report",
    "TranslationTestSet",
    "load_test_set",
    "nearest_neighbor",
    "precision_at_1",
    "SyntheticWorldConfig",
    "generate_tagged_corpora",
    "generate_world",
    "Span",
    "TaggedCorpus",
    "TaggerModel",
    "evaluate_f1",
    "extract_spans",
    "featurize",
    "load_conll",
    "train_tagger",
    "viterbi_decode",
]
