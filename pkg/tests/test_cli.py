import json

import numpy as np
import pytest

from seedlex.cli import main
from seedlex.embedding_store import EmbeddingSpace, save_embeddings


@pytest.fixture(scope="module")
def world_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("world")
    code = main(["gen-world", "--out", str(out), "--vocab-size", "1000", "--dim", "12",
                 "--pivot-docs", "60", "--low-resource-docs", "60", "--config", str(_world_config(out))])
    assert code == 0
    return out


def _world_config(out):
    path = out.parent / f"{out.name}.world.json"
    path.write_text(json.dumps({"world": {"dict_train": 300, "dict_test": 100, "seed": 2}}))
    return path


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_eval_p1_without_test_set(world_dir, capsys):
    code = main(["eval-p1", "--projected", str(world_dir / "source.vec"),
                 "--target-emb", str(world_dir / "target.vec")])
    assert code == 1
    assert "--test-set" in capsys.readouterr().err


def test_missing_input_file_is_usage_error(world_dir, tmp_path):
    code = main(["eval-p1", "--projected", str(tmp_path / "nope.vec"),
                 "--target-emb", str(world_dir / "target.vec"), "--test-set", str(world_dir / "muse.test.txt")])
    assert code == 1


def test_procrustes_dimension_mismatch_exits_2(world_dir, tmp_path, capsys):
    wide = tmp_path / "wide.vec"
    rng = np.random.default_rng(0)
    words = [f"e{i:04d}" for i in range(1, 301)]
    save_embeddings(EmbeddingSpace(words, rng.standard_normal((300, 13))), wide)
    code = main(["fit-map", "--method", "procrustes", "--dictionary", str(world_dir / "muse.train.txt"),
                 "--source-emb", str(world_dir / "source.vec"), "--target-emb", str(wide),
                 "--out", str(tmp_path / "m.map")])
    assert code == 2
    assert "dimension" in capsys.readouterr().err


def test_malformed_embeddings_exit_2(world_dir, tmp_path, write):
    bad = write("a 1 0\na 0 1\n")
    code = main(["eval-p1", "--projected", str(bad), "--target-emb", str(world_dir / "target.vec"),
                 "--test-set", str(world_dir / "muse.test.txt")])
    assert code == 2


def test_single_step_pipeline(world_dir, tmp_path, capsys):
    w, t = world_dir, tmp_path
    assert main(["build-dict", "--freqs", str(w / "source.freq.tsv"), "--lexicon", str(w / "lexicon.tsv"),
                 "--stopwords", str(w / "stopwords.txt"), "--size", "200", "--target-freqs",
                 str(w / "target.freq.tsv"), "--threshold", "1", "--out", str(t / "seed.txt")]) == 0
    assert len((t / "seed.txt").read_text().splitlines()) == 200
    assert main(["fit-map", "--dictionary", str(t / "seed.txt"), "--source-emb", str(w / "source.vec"),
                 "--target-emb", str(w / "target.vec"), "--method", "procrustes", "--out", str(t / "m.map")]) == 0
    assert main(["project", "--map", str(t / "m.map"), "--source-emb", str(w / "source.vec"),
                 "--out", str(t / "proj.vec")]) == 0
    capsys.readouterr()
    assert main(["eval-p1", "--projected", str(t / "proj.vec"), "--target-emb", str(w / "target.vec"),
                 "--test-set", str(w / "muse.test.txt"), "--out", str(t / "p1.tsv")]) == 0
    assert capsys.readouterr().out.strip() == "P@1 1.0 evaluated 100 skipped 0"
    assert main(["train-tagger", "--corpus", f"en={w / 'pivot.conll'}", "--embeddings", f"en={w / 'target.vec'}",
                 "--epochs", "3", "--out", str(t / "tagger.model")]) == 0
    capsys.readouterr()
    assert main(["eval-f1", "--model", str(t / "tagger.model"), "--corpus", f"de={w / 'low_resource.conll'}",
                 "--embeddings", f"de={t / 'proj.vec'}", "--out", str(t / "f1.tsv")]) == 0
    assert capsys.readouterr().out.startswith("F1 ")
    assert (t / "f1.tsv").read_text().startswith("entity_type\tprecision")


def test_config_file_supplies_options(world_dir, tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"build-dict": {
        "source-kind": "muse", "dictionary": str(world_dir / "muse.train.txt"), "size": 50, "out": "d.txt"}}))
    assert main(["build-dict", "--config", str(config)]) == 0
    assert len((tmp_path / "d.txt").read_text().splitlines()) == 50
    assert main(["build-dict", "--config", str(config), "--size", "20"]) == 0
    assert len((tmp_path / "d.txt").read_text().splitlines()) == 20


def test_gen_world_then_grid(world_dir, tmp_path, capsys):
    config = tmp_path / "grid.json"
    config.write_text(json.dumps({
        "manifest": str(world_dir / "manifest.json"),
        "factors": {"dict_source": ["muse", "domain"], "dict_size": [100], "freq_band": ["high"],
                    "sequential": False},
        "tagger": {"epochs": 2},
        "data": {"joint_docs": 10},
    }))
    out = tmp_path / "report"
    assert main(["grid", "--config", str(config), "--out", str(out)]) == 0
    body = (out / "grid.tsv").read_text()
    assert capsys.readouterr().out == body
    assert len(body.splitlines()) == 3
    assert (out / "grid.config.json").exists()
    assert main(["grid", "--manifest", str(world_dir / "manifest.json")]) == 1
