import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_viterbi
from seedlex.embedding_store import EmbeddingSpace
from seedlex.errors import DataError, DimensionError, FormatError
from seedlex.tagger import (
    Span,
    TaggedCorpus,
    TaggerModel,
    evaluate_f1,
    extract_spans,
    featurize,
    label_set,
    load_conll,
    load_model,
    save_conll,
    save_model,
    span_f1,
    spans_to_bio,
    train_tagger,
    viterbi_decode,
)

LABELS = label_set()


def emissions_of(features, weights):
    return [[sum(f * w for f, w in zip(row, weights[y])) for y in range(len(weights))] for row in features]


def test_label_order():
    assert LABELS == ("O", "B-JOB_TITLE", "I-JOB_TITLE", "B-ORG_NAME", "I-ORG_NAME")


def test_load_conll_examples(write):
    corpus = load_conll(write("John\tO\n\nAcme\tB-ORG_NAME\n\n\n"))
    assert corpus.sequences == (("John",), ("Acme",))
    assert corpus.labels == (("O",), ("B-ORG_NAME",))
    with pytest.raises(FormatError) as exc:
        load_conll(write("John\tO\nAcme\tX-FOO\n"))
    assert exc.value.line == 2


def test_conll_round_trip(tmp_path):
    corpus = TaggedCorpus([["a", "b"], ["c"]], [["B-JOB_TITLE", "I-JOB_TITLE"], ["O"]], language_id="en")
    save_conll(corpus, tmp_path / "c.conll")
    back = load_conll(tmp_path / "c.conll", language_id="en")
    assert (back.sequences, back.labels) == (corpus.sequences, corpus.labels)


def test_corpus_invariants():
    with pytest.raises(DataError):
        TaggedCorpus([["a", "b"]], [["O"]])
    with pytest.raises(DataError):
        TaggedCorpus([["a"]], [["B-PERSON"]])


@pytest.mark.parametrize("labels, spans", [
    (["B-J", "I-J", "O"], [Span("J", 0, 1)]),
    (["O", "I-J", "I-J"], [Span("J", 1, 2)]),
    (["B-J", "B-J"], [Span("J", 0, 0), Span("J", 1, 1)]),
    (["B-J", "I-N", "I-N"], [Span("J", 0, 0), Span("N", 1, 2)]),
    (["I-J", "O", "I-J", "B-N"], [Span("J", 0, 0), Span("J", 2, 2), Span("N", 3, 3)]),
])
def test_extract_spans(labels, spans):
    assert extract_spans(labels) == spans


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.data())
def test_spans_bio_round_trip(length, data):
    cuts = sorted(data.draw(st.sets(st.integers(0, length), max_size=length + 1)))
    spans = []
    for a, b in zip(cuts, cuts[1:]):
        if data.draw(st.booleans()):
            spans.append(Span(data.draw(st.sampled_from(["JOB_TITLE", "ORG_NAME"])), a, b - 1))
    assert extract_spans(spans_to_bio(spans, length)) == spans


def test_featurize():
    space = EmbeddingSpace(["a", "b"], [[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(featurize(["a"], space, 0).matrix, [[1, 2, 1]])
    oov = featurize(["zzz"], space, 0)
    np.testing.assert_array_equal(oov.matrix, [[0, 0, 1]])
    assert oov.oov_rate == 1.0
    np.testing.assert_array_equal(featurize(["a", "b"], space, 1).matrix,
                                  [[0, 0, 1, 2, 3, 4, 1], [1, 2, 3, 4, 0, 0, 1]])


def test_decode_single_token_dominant_emission():
    model = TaggerModel.zeros(LABELS, 0, 1)
    model.emission[3, 1] = 5.0
    assert viterbi_decode(model, np.array([[0.0, 1.0]])) == ["B-ORG_NAME"]


def test_zero_model_decodes_all_o():
    model = TaggerModel.zeros(LABELS, 1, 3)
    assert viterbi_decode(model, np.ones((4, 10))) == ["O"] * 4
    with pytest.raises(DimensionError):
        viterbi_decode(model, np.ones((4, 9)))


def test_hand_weighted_three_token_toy():
    model = TaggerModel.zeros(LABELS, 0, 2)
    model.emission[:] = [[0.5, 0.0, 0.2], [2.0, -1.0, 0.0], [0.0, 1.5, -0.2],
                         [-0.5, 1.0, 0.3], [0.1, 0.1, 0.1]]
    model.transition[0, 2] = -3.0  # O -> I-JOB discouraged
    model.transition[1, 2] = 1.0
    model.transition[5, 2] = -2.0
    features = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.5, 0.5, 1.0]])
    expected, _ = brute_viterbi(emissions_of(features.tolist(), model.emission.tolist()),
                                model.transition.tolist())
    assert viterbi_decode(model, features) == [LABELS[i] for i in expected]


def random_instance(rng, integer):
    L = len(LABELS)
    T = int(rng.integers(1, 5))
    dim = int(rng.integers(1, 4))
    if integer:
        emission = rng.integers(-2, 3, size=(L, dim + 1)).astype(float)
        transition = rng.integers(-2, 3, size=(L + 1, L + 1)).astype(float)
        features = rng.integers(-1, 2, size=(T, dim + 1)).astype(float)
    else:
        emission = rng.standard_normal((L, dim + 1))
        transition = rng.standard_normal((L + 1, L + 1))
        features = rng.standard_normal((T, dim + 1))
    return TaggerModel(LABELS, emission, transition, 0, dim), features


@pytest.mark.parametrize("integer", [False, True], ids=["real", "integer-ties"])
def test_viterbi_matches_enumeration(integer):
    rng = np.random.default_rng(17 + integer)
    for _ in range(200):
        model, features = random_instance(rng, integer)
        path, score = brute_viterbi(emissions_of(features.tolist(), model.emission.tolist()),
                                    model.transition.tolist())
        decoded = viterbi_decode(model, features)
        assert decoded == [LABELS[i] for i in path]
        assert model.path_score(features, path) == pytest.approx(score, abs=1e-9)


def test_f1_hand_cases():
    gold = [["O", "B-JOB_TITLE", "I-JOB_TITLE"]]
    assert span_f1(gold, gold).per_type["JOB_TITLE"]["f1"] == 1.0
    assert span_f1(gold, [["O", "B-JOB_TITLE", "O"]]).per_type["JOB_TITLE"]["f1"] == 0.0
    gold = [["B-JOB_TITLE", "O", "B-JOB_TITLE", "O", "B-ORG_NAME"]]
    pred = [["B-JOB_TITLE", "O", "O", "B-ORG_NAME", "O"]]
    report = span_f1(gold, pred)
    assert report.per_type["JOB_TITLE"]["precision"] == 1.0
    assert report.per_type["JOB_TITLE"]["recall"] == 0.5
    assert report.per_type["JOB_TITLE"]["f1"] == pytest.approx(2 / 3, abs=1e-15)
    assert report.per_type["ORG_NAME"]["f1"] == 0.0
    assert report.average_f1 == pytest.approx(1 / 3, abs=1e-15)


def test_f1_empty_types_score_zero():
    report = span_f1([["O"]], [["O"]])
    assert report.average_f1 == 0.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from(LABELS), min_size=1, max_size=6), min_size=1, max_size=5), st.data())
def test_f1_swap_symmetry(gold, data):
    pred = [data.draw(st.lists(st.sampled_from(LABELS), min_size=len(g), max_size=len(g))) for g in gold]
    forward, backward = span_f1(gold, pred), span_f1(pred, gold)
    for etype in forward.per_type:
        assert forward.per_type[etype]["precision"] == backward.per_type[etype]["recall"]
        assert forward.per_type[etype]["recall"] == backward.per_type[etype]["precision"]
        assert forward.per_type[etype]["f1"] == backward.per_type[etype]["f1"]


def toy_corpus():
    space = EmbeddingSpace(["acme", "chief", "cook", "at", "in"],
                           [[1, 0, 0], [0, 1, 0], [0, 1, 1], [0, 0, 1], [0.5, 0, 1]], language_id="en")
    corpus = TaggedCorpus([["chief", "cook", "at", "acme"], ["cook", "in", "acme"]],
                          [["B-JOB_TITLE", "I-JOB_TITLE", "O", "B-ORG_NAME"], ["B-JOB_TITLE", "O", "B-ORG_NAME"]],
                          language_id="en")
    return space, corpus


def test_training_memorizes_and_is_deterministic(tmp_path):
    space, corpus = toy_corpus()
    model = train_tagger([corpus], {"en": space}, epochs=20, seed=3)
    assert evaluate_f1(model, corpus, {"en": space}).average_f1 == 1.0
    again = train_tagger([corpus], {"en": space}, epochs=20, seed=3)
    save_model(model, tmp_path / "a.model")
    save_model(again, tmp_path / "b.model")
    assert (tmp_path / "a.model").read_bytes() == (tmp_path / "b.model").read_bytes()
    loaded = load_model(tmp_path / "a.model")
    assert np.array_equal(loaded.emission, model.emission)
    assert np.array_equal(loaded.transition, model.transition)


def test_training_errors():
    space, corpus = toy_corpus()
    with pytest.raises(DataError, match="language"):
        train_tagger([corpus], {"de": space})
    other = EmbeddingSpace(["x"], [[1.0, 2.0]], language_id="de")
    de = TaggedCorpus([["x"]], [["O"]], language_id="de")
    with pytest.raises(DimensionError):
        train_tagger([corpus, de], {"en": space, "de": other})
    with pytest.raises(DataError):
        train_tagger([TaggedCorpus([], [], language_id="en")], {"en": space})


def test_zero_shot_transfer_beats_all_o(small_world):
    from seedlex.alignment import fit_procrustes, pair_matrices, project_space
    from seedlex.synthetic import generate_tagged_corpora

    w = small_world
    src_train, tgt_train = generate_tagged_corpora(w, 60, seed=1)
    src_test, _ = generate_tagged_corpora(w, 30, seed=2)
    projected = project_space(w.source_space,
                              fit_procrustes(pair_matrices(w.gold_train, w.source_space, w.target_space)))
    model = train_tagger([tgt_train], {"en": w.target_space}, epochs=5, seed=0)
    report = evaluate_f1(model, src_test, {"de": projected})
    all_o = span_f1(src_test.labels, [["O"] * len(s) for s in src_test.sequences])
    assert all_o.average_f1 == 0.0
    assert report.average_f1 > all_o.average_f1


def test_f1_report_outputs(tmp_path):
    gold = [["B-JOB_TITLE", "O"]]
    report = span_f1(gold, gold)
    assert report.summary() == "F1 0.5 JOB_TITLE 1.0 ORG_NAME 0.0"
    report.write_tsv(tmp_path / "f1.tsv")
    assert (tmp_path / "f1.tsv").read_text().splitlines()[-1].startswith("AVERAGE\t")
