"""Command-line interface.

Every subcommand accepts ``--config FILE`` (JSON).  For the single-step
commands the file holds flag values keyed by option name, either at top
level or under a section named after the subcommand; explicit flags win.
``grid`` and ``scaling`` read a full experiment config instead.

Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import alignment, dictionary as dictmod, experiments, intrinsic_eval, synthetic, tagger
from .embedding_store import load_embeddings, load_frequency_table, load_stopwords, save_embeddings
from .errors import DataError

log = logging.getLogger("seedlex")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# prog -> dest -> (default, required, flag); applied after config merging.
_DEFAULTS = {}


def _add(p, *flags, default=None, required=False, **kw):
    action = p.add_argument(*flags, default=argparse.SUPPRESS, **kw)
    _DEFAULTS.setdefault(p.prog, {})[action.dest] = (default, required, flags[0])
    return action


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seedlex", description="Seed dictionaries and cross-lingual embedding maps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with option values")
        return p

    p = command("gen-world", "generate a synthetic bilingual world and export its files")
    _add(p, "--out", required=True, help="output directory")
    _add(p, "--seed", type=int)
    _add(p, "--vocab-size", type=int)
    _add(p, "--dim", type=int)
    _add(p, "--noise-sigma", type=float)
    _add(p, "--dict-train", type=int, help="gold training pairs (default: min(2000, 40%% of vocabulary))")
    _add(p, "--dict-test", type=int, help="gold test pairs (default: min(1000, 20%% of vocabulary))")
    _add(p, "--pivot-docs", type=int)
    _add(p, "--low-resource-docs", type=int)

    p = command("build-dict", "build or load a seed dictionary")
    _add(p, "--source-kind", choices=dictmod.SOURCE_KINDS[:3], default="domain")
    _add(p, "--freqs", help="source frequency TSV (domain dictionaries)")
    _add(p, "--lexicon", help="translation lexicon TSV (domain dictionaries)")
    _add(p, "--dictionary", help="generic dictionary file (muse/idp)")
    _add(p, "--format", choices=("space_separated", "tsv"), default=None)
    _add(p, "--band", choices=dictmod.BANDS, default="high")
    _add(p, "--size", type=int, required=True)
    _add(p, "--stopwords")
    _add(p, "--min-length", type=int, default=3)
    _add(p, "--target-freqs", help="target frequency TSV for threshold validation")
    _add(p, "--threshold", type=int, default=0)
    _add(p, "--drop-report")
    _add(p, "--out", required=True)

    p = command("fit-map", "fit a projection map from a seed dictionary")
    _add(p, "--dictionary", required=True)
    _add(p, "--dict-format", choices=("space_separated", "tsv"), default="space_separated")
    _add(p, "--source-emb", required=True)
    _add(p, "--target-emb", required=True)
    _add(p, "--method", choices=alignment.METHODS, default="cca")
    _add(p, "--ridge", type=float)
    _add(p, "--keep-ratio", type=float, default=1.0)
    _add(p, "--center", action="store_true")
    _add(p, "--out", required=True)

    p = command("project", "project a source embedding space through a fitted map")
    _add(p, "--map", required=True)
    _add(p, "--source-emb", required=True)
    _add(p, "--shared-space", action="store_true")
    _add(p, "--side", choices=("source", "target"), default="source")
    _add(p, "--out", required=True)

    p = command("eval-p1", "word-translation precision at 1")
    _add(p, "--projected", required=True)
    _add(p, "--target-emb", required=True)
    _add(p, "--test-set", required=True)
    _add(p, "--out", help="per-word TSV report")

    p = command("train-tagger", "train the BIO tagger")
    _add(p, "--corpus", action="append", required=True, help="LANG=PATH, repeatable")
    _add(p, "--embeddings", action="append", required=True, help="LANG=PATH, repeatable")
    _add(p, "--epochs", type=int, default=10)
    _add(p, "--seed", type=int, default=0)
    _add(p, "--radius", type=int, default=1)
    _add(p, "--out", required=True)

    p = command("eval-f1", "span F1 of a trained tagger")
    _add(p, "--model", required=True)
    _add(p, "--corpus", required=True, help="LANG=PATH")
    _add(p, "--embeddings", required=True, help="LANG=PATH")
    _add(p, "--out", help="TSV report")

    for name, help_text in (("grid", "dictionary factor grid"), ("scaling", "low-resource data scaling")):
        p = command(name, help_text)
        _add(p, "--manifest", help="synthetic world manifest supplying input paths")
        _add(p, "--out", help="output directory (overrides paths.output_dir)")
        _add(p, "--seed", type=int)
        _add(p, "--method", choices=alignment.METHODS)
        if name == "grid":
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--sequential", dest="sequential", action="store_true", default=None)
            mode.add_argument("--cartesian", dest="sequential", action="store_false")
    return parser


def _merge(args, prog: str) -> argparse.Namespace:
    """Fill options from ``--config`` where not given on the command line, then apply defaults."""
    config = {}
    if getattr(args, "config", None) and args.command not in ("grid", "scaling"):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        config = data.get(args.command, data)
        base = path.parent
    specs = _DEFAULTS.get(prog, {})
    for dest, (default, required, flag) in specs.items():
        if hasattr(args, dest):
            continue
        key_variants = (dest, dest.replace("_", "-"))
        found = next((config[k] for k in key_variants if k in config), None)
        if found is not None:
            if isinstance(found, str) and (dest in _PATH_OPTIONS) and not Path(found).is_absolute():
                found = str(base / found)
            setattr(args, dest, found)
        elif required:
            raise UsageError(f"{prog}: missing required option {flag}")
        else:
            setattr(args, dest, default)
    return args


_PATH_OPTIONS = {
    "out", "freqs", "lexicon", "dictionary", "stopwords", "target_freqs", "drop_report", "source_emb",
    "target_emb", "map", "projected", "test_set", "model",
}


def _require_files(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")


def _lang_path(value: str):
    if "=" not in value:
        raise UsageError(f"expected LANG=PATH, got {value!r}")
    lang, path = value.split("=", 1)
    _require_files(path)
    return lang, path


# -- commands ----------------------------------------------------------------

def cmd_gen_world(args):
    data = {}
    if args.config:
        _require_files(args.config)
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
        data = data.get("gen-world", data)
    data = {k: v for k, v in data.items() if k not in ("out",)}
    world = dict(data.pop("world", {}))
    for key in ("seed", "vocab_size", "dim", "noise_sigma", "dict_train", "dict_test"):
        value = getattr(args, key)
        if value is not None:
            world[key] = value
    vocab = world.get("vocab_size", synthetic.SyntheticWorldConfig.vocab_size)
    world.setdefault("dict_train", min(synthetic.SyntheticWorldConfig.dict_train, int(0.4 * vocab)))
    world.setdefault("dict_test", min(synthetic.SyntheticWorldConfig.dict_test, int(0.2 * vocab)))
    for flag in ("pivot_docs", "low_resource_docs"):
        if getattr(args, flag) is not None:
            data[flag] = getattr(args, flag)
    bundle_cfg = synthetic.BundleConfig.from_dict({**data, "world": world})
    bundle = synthetic.build_bundle(bundle_cfg)
    manifest = synthetic.export_bundle(bundle, args.out)
    print(manifest)


def cmd_build_dict(args):
    kind = args.source_kind
    if kind == "domain":
        if not args.freqs or not args.lexicon:
            raise UsageError("build-dict: domain dictionaries need --freqs and --lexicon")
        _require_files(args.freqs, args.lexicon, args.stopwords)
        stop = load_stopwords(args.stopwords) if args.stopwords else frozenset()
        d = dictmod.build_domain_dictionary(
            load_frequency_table(args.freqs), dictmod.FileTranslationProvider.from_file(args.lexicon),
            args.band, args.size, stop, args.min_length)
    else:
        if not args.dictionary:
            raise UsageError(f"build-dict: {kind} dictionaries need --dictionary")
        _require_files(args.dictionary)
        fmt = args.format or ("space_separated" if kind == "muse" else "tsv")
        d = dictmod.load_pair_dictionary(args.dictionary, fmt, kind)
        if len(d) < args.size:
            raise DataError(f"{kind} dictionary has {len(d)} pairs, {args.size} requested")
        d = d.truncated(args.size)
    if args.target_freqs:
        _require_files(args.target_freqs)
        result = dictmod.validate_pairs(d, load_frequency_table(args.target_freqs), args.threshold)
        d = result.dictionary
        if args.drop_report:
            dictmod.write_drop_report(result.dropped, args.drop_report)
        log.info("validation dropped %d pairs", len(result.dropped))
    dictmod.save_pair_dictionary(d, args.out, args.format or "space_separated")
    print(f"pairs {len(d)}")


def cmd_fit_map(args):
    _require_files(args.dictionary, args.source_emb, args.target_emb)
    d = dictmod.load_pair_dictionary(args.dictionary, args.dict_format, "domain")
    pm = alignment.pair_matrices(d, load_embeddings(args.source_emb), load_embeddings(args.target_emb))
    pmap = alignment.fit_map(pm, args.method, ridge=args.ridge, keep_ratio=args.keep_ratio, center=args.center)
    alignment.save_map(pmap, args.out)
    print(f"method {pmap.method} pairs {pm.n} skipped {pm.skipped}")


def cmd_project(args):
    _require_files(args.map, args.source_emb)
    projected = alignment.project_space(load_embeddings(args.source_emb), alignment.load_map(args.map),
                                        shared_space=args.shared_space, side=args.side)
    save_embeddings(projected, args.out)


def cmd_eval_p1(args):
    _require_files(args.projected, args.target_emb, args.test_set)
    report = intrinsic_eval.precision_at_1(
        load_embeddings(args.projected), load_embeddings(args.target_emb),
        intrinsic_eval.load_test_set(args.test_set))
    if report.warning:
        log.warning(report.warning)
    if args.out:
        report.write_tsv(args.out)
    print(report.summary())


def cmd_train_tagger(args):
    spaces = {lang: load_embeddings(path, language_id=lang) for lang, path in map(_lang_path, args.embeddings)}
    corpora = [tagger.load_conll(path, language_id=lang) for lang, path in map(_lang_path, args.corpus)]
    model = tagger.train_tagger(corpora, spaces, epochs=args.epochs, seed=args.seed, radius=args.radius)
    tagger.save_model(model, args.out)
    print(f"trained on {sum(len(c) for c in corpora)} sequences")


def cmd_eval_f1(args):
    _require_files(args.model)
    lang, corpus_path = _lang_path(args.corpus)
    elang, emb_path = _lang_path(args.embeddings)
    model = tagger.load_model(args.model)
    corpus = tagger.load_conll(corpus_path, entity_types=model.entity_types, language_id=lang)
    report = tagger.evaluate_f1(model, corpus, load_embeddings(emb_path, language_id=elang))
    if args.out:
        report.write_tsv(args.out)
    print(report.summary())


def _experiment_config(args) -> experiments.ExperimentConfig:
    if args.config:
        _require_files(args.config)
        cfg = experiments.ExperimentConfig.load(args.config)
    else:
        cfg = experiments.ExperimentConfig()
    if args.manifest:
        _require_files(args.manifest)
        cfg.manifest = str(Path(args.manifest).resolve())
        experiments.apply_manifest(cfg, cfg.manifest)
    if cfg.manifest is None and not args.config:
        raise UsageError(f"{args.command}: need --config or --manifest")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.method is not None:
        cfg.map.method = args.method
    if getattr(args, "sequential", None) is not None:
        cfg.factors.sequential = args.sequential
    if args.out:
        cfg.paths.output_dir = str(Path(args.out).resolve())
    if cfg.paths.output_dir is None:
        raise UsageError(f"{args.command}: need --out or paths.output_dir")
    return cfg


def cmd_grid(args):
    cfg = _experiment_config(args)
    report = experiments.run_factor_grid(cfg)
    path = experiments.write_report(report, cfg, cfg.paths.output_dir)
    sys.stdout.write(report.body())
    log.info("report written to %s", path)


def cmd_scaling(args):
    cfg = _experiment_config(args)
    report = experiments.run_data_scaling(cfg)
    path = experiments.write_report(report, cfg, cfg.paths.output_dir)
    sys.stdout.write(report.body())
    log.info("report written to %s", path)


COMMANDS = {
    "gen-world": cmd_gen_world,
    "build-dict": cmd_build_dict,
    "fit-map": cmd_fit_map,
    "project": cmd_project,
    "eval-p1": cmd_eval_p1,
    "train-tagger": cmd_train_tagger,
    "eval-f1": cmd_eval_f1,
    "grid": cmd_grid,
    "scaling": cmd_scaling,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().strip())
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        sub_prog = f"{parser.prog} {args.command}"
        args = _merge(args, sub_prog)
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
