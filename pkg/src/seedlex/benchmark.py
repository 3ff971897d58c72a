"""The fixed synthetic benchmark used for qualitative reproduction checks.

The world is large enough for the 10k dictionary cell and for a 5-10%
frequency band of 5k words.  Frequency-dependent drift makes the map only
approximately linear, so dictionary choices matter; class-clustered vectors
make entity tagging learnable from embeddings alone.

The same settings ship as JSON under ``configs/`` for use with the CLI::

    seedlex gen-world --config configs/benchmark-world.json --out bench/
    seedlex grid --config configs/benchmark-grid.json --manifest bench/manifest.json --out bench/report
"""

from __future__ import annotations

from typing import Sequence

from . import alignment, intrinsic_eval
from .experiments import ExperimentConfig, Inputs, Runner, run_data_scaling, run_factor_grid
from .synthetic import BundleConfig, SyntheticWorldConfig, build_bundle, generate_world

BENCHMARK_SEED = 20201
EXPERIMENT_SEED = 1
NOISE_LEVELS = (0.0, 0.05, 0.1, 0.2)

BENCHMARK_BUNDLE = {
    "world": {
        "vocab_size": 120000,
        "dim": 50,
        "noise_sigma": 0.07,
        "drift": 2.0,
        "class_strength": 0.35,
        "dict_train": 10000,
        "dict_test": 1500,
        "seed": BENCHMARK_SEED,
    },
    "pivot_docs": 800,
    "low_resource_docs": 1000,
    "lexicon_error_rate": 0.02,
}

BENCHMARK_EXPERIMENT = {
    "seed": EXPERIMENT_SEED,
    "factors": {
        "dict_source": ["idp", "muse", "domain"],
        "dict_size": [10000, 5000, 1000],
        "freq_band": ["high", "lower"],
        "sequential": True,
    },
    "data": {"joint_docs": 200, "low_resource_doc_counts": [0, 200, 500, "all"]},
}


def bundle_config() -> BundleConfig:
    return BundleConfig.from_dict(BENCHMARK_BUNDLE)


def experiment_config() -> ExperimentConfig:
    return ExperimentConfig.from_dict(BENCHMARK_EXPERIMENT)


def benchmark_inputs() -> Inputs:
    return Inputs.from_bundle(build_bundle(bundle_config()))


def run_benchmark(inputs: Inputs = None):
    """Grid and scaling reports over one shared runner."""
    config = experiment_config()
    runner = Runner(config, inputs if inputs is not None else benchmark_inputs())
    return run_factor_grid(config, runner=runner), run_data_scaling(config, runner=runner)


def noise_sweep(levels: Sequence[float] = NOISE_LEVELS, method: str = "procrustes") -> list:
    """Held-out P@1 of the benchmark world regenerated at each noise level."""
    results = []
    for sigma in levels:
        cfg = SyntheticWorldConfig(**{**BENCHMARK_BUNDLE["world"], "noise_sigma": sigma})
        world = generate_world(cfg)
        pm = alignment.pair_matrices(world.gold_train, world.source_space, world.target_space)
        projected = alignment.project_space(world.source_space, alignment.fit_map(pm, method))
        test = intrinsic_eval.TranslationTestSet.from_dictionary(world.gold_test)
        report = intrinsic_eval.precision_at_1(projected, world.target_space, test, keep_per_word=False)
        results.append((sigma, report.p_at_1))
    return results
