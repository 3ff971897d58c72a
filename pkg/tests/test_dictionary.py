import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seedlex.alignment import fit_procrustes, pair_matrices, project_space
from seedlex.dictionary import (
    FileTranslationProvider,
    SeedDictionary,
    band_candidates,
    build_domain_dictionary,
    load_pair_dictionary,
    select_seed_words,
    split_dictionary,
    tune_validation_threshold,
    validate_pairs,
    write_drop_report,
)
from seedlex.embedding_store import FrequencyTable
from seedlex.errors import DataError, FormatError, TranslationError
from seedlex.intrinsic_eval import TranslationTestSet, precision_at_1
from seedlex.synthetic import SyntheticWorldConfig, generate_world, translation_lexicon


def ranked_table(n):
    # word "wNNN" has count n - rank so rank order is the index order
    return FrequencyTable({f"w{i:03d}": n - i for i in range(n)})


def test_select_high_band_removes_stopwords():
    freqs = FrequencyTable({"alpha": 10, "beta": 5, "und": 90})
    assert select_seed_words(freqs, "high", 2, stopwords={"und"}) == ["alpha", "beta"]


def test_select_filters_short_words():
    freqs = FrequencyTable({"zu": 50, "und": 40, "persoenliche": 3})
    assert band_candidates(freqs, "high", {"und"}, 3) == ["persoenliche"]


def test_lower_band_ranks_11_to_20():
    freqs = ranked_table(200)
    candidates = band_candidates(freqs, "lower")
    # ranks are 1-based: rank r is word w{r-1}
    assert candidates == [f"w{r - 1:03d}" for r in range(11, 21)]
    assert select_seed_words(freqs, "lower", 5) == [f"w{r - 1:03d}" for r in range(11, 16)]


def test_selection_size_error_reports_available():
    with pytest.raises(DataError, match="only 10 candidates"):
        select_seed_words(ranked_table(200), "lower", 11)


@settings(max_examples=30, deadline=None)
@given(st.integers(20, 300), st.sampled_from(["high", "lower"]), st.data())
def test_selection_is_prefix_stable(n, band, data):
    freqs = ranked_table(n)
    available = len(band_candidates(freqs, band))
    if available < 2:
        return
    k = data.draw(st.integers(1, available - 1))
    assert select_seed_words(freqs, band, k + 1, min_length=3)[:k] == select_seed_words(freqs, band, k)


def test_build_domain_dictionary_direct_map():
    freqs = FrequencyTable({"erfahrung": 20, "kenntnisse": 10})
    provider = FileTranslationProvider({"erfahrung": "experience", "kenntnisse": "skills"})
    d = build_domain_dictionary(freqs, provider, "high", 2)
    assert d.pairs == (("erfahrung", "experience"), ("kenntnisse", "skills"))
    assert d.source_kind == "domain"


def test_build_domain_dictionary_absences():
    freqs = FrequencyTable({"aaa": 3, "bbb": 2, "ccc": 1})
    provider = FileTranslationProvider({"aaa": "x", "ccc": "z"})
    assert len(build_domain_dictionary(freqs, provider, "high", 2)) == 2
    with pytest.raises(DataError, match="only 2 of 3"):
        build_domain_dictionary(freqs, provider, "high", 3)


def test_build_domain_dictionary_provider_failure_carries_batch():
    class Broken:
        concurrent_safe = False

        def translate_batch(self, words):
            raise RuntimeError("quota exceeded")

    freqs = FrequencyTable({"aaa": 3, "bbb": 2})
    with pytest.raises(TranslationError) as exc:
        build_domain_dictionary(freqs, Broken(), "high", 1)
    assert exc.value.batch == ["aaa", "bbb"]


def test_oversampling_absorbs_six_percent_misses():
    world = generate_world(SyntheticWorldConfig(vocab_size=3000, dim=8, dict_train=100, dict_test=100, seed=5))
    lexicon = translation_lexicon(world, miss_rate=0.06, error_rate=0.0, seed=9)
    candidates = band_candidates(world.source_freqs, "high", world.stopwords())
    # the first 1000 candidates alone would not suffice
    assert sum(w in lexicon for w in candidates[:1000]) < 1000
    d = build_domain_dictionary(world.source_freqs, FileTranslationProvider(lexicon), "high", 1000,
                                stopwords=world.stopwords())
    assert len(d) == 1000
    assert d.source_words == [w for w in candidates[:1500] if w in lexicon][:1000]


def test_load_pair_dictionary_formats(write):
    assert len(load_pair_dictionary(write("hund dog\nhund hound\n"))) == 2
    assert load_pair_dictionary(write("hund\tdog\nhund\tdog\n"), format="tsv").pairs == (("hund", "dog"),)
    with pytest.raises(FormatError) as exc:
        load_pair_dictionary(write("hund dog\nhund\n"))
    assert exc.value.line == 2


def test_seed_dictionary_invariants():
    with pytest.raises(DataError):
        SeedDictionary((("a", "x"), ("a", "x")))
    with pytest.raises(DataError):
        SeedDictionary((("a b", "x"),))
    with pytest.raises(DataError):
        SeedDictionary((("a", "x"), ("b", "y")), requested_size=1)


def test_validate_pairs_examples(tmp_path):
    d = SeedDictionary((("a", "x"), ("b", "y")))
    freqs = FrequencyTable({"x": 5})
    assert validate_pairs(d, freqs, 0).dictionary == d
    result = validate_pairs(d, freqs, 3)
    assert result.dictionary.pairs == (("a", "x"),)
    assert result.dropped[0][0] == "b"
    assert validate_pairs(d, freqs, 5).dictionary.pairs == (("a", "x"),)
    write_drop_report(result.dropped, tmp_path / "drops.tsv")
    assert (tmp_path / "drops.tsv").read_text().splitlines()[1].startswith("b\t")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=1, max_size=30), st.integers(0, 25), st.integers(0, 25))
def test_validate_pairs_monotone(counts, t1, t2):
    t1, t2 = sorted((t1, t2))
    d = SeedDictionary(tuple((f"s{i}", f"t{i}") for i in range(len(counts))))
    freqs = FrequencyTable({f"t{i}": c for i, c in enumerate(counts)})
    assert validate_pairs(d, freqs, 0).dictionary == d
    low = set(validate_pairs(d, freqs, t1).dictionary.pairs)
    high = set(validate_pairs(d, freqs, t2).dictionary.pairs)
    assert high <= low


def test_tune_threshold_trivial_cases():
    d = SeedDictionary((("a", "x"), ("b", "y")))
    freqs = FrequencyTable({"x": 7, "y": 12})
    assert tune_validation_threshold(d, freqs, [10, 0, 5], lambda _: 1.0) == (0, 1.0)
    assert tune_validation_threshold(d, freqs, [0, 10], len) == (0, 2.0)
    with pytest.raises(DataError):
        tune_validation_threshold(d, freqs, [], len)


CUTOFF = 40


def test_tune_threshold_prefers_positive_threshold_with_corrupted_rare_targets():
    world = generate_world(SyntheticWorldConfig(vocab_size=2000, dim=20, dict_train=600, dict_test=300, seed=11,
                                                noise_sigma=0.09))
    target = world.target_space
    counts = world.target_freqs.entries
    rare = np.array([counts[w] < CUTOFF for w in target.vocabulary])
    assert rare.sum() > 1000
    # replace the vectors of rare target words by unrelated noise
    vectors = np.array(target.vectors)
    noise = np.random.default_rng(0).standard_normal((rare.sum(), target.dim))
    vectors[rare] = noise / np.linalg.norm(noise, axis=1, keepdims=True)
    corrupted = target.replace(vectors=vectors)
    test = TranslationTestSet.from_dictionary(world.gold_test)
    heldout = SeedDictionary(tuple(p for p in world.gold_test.pairs if counts[p[1]] >= CUTOFF))
    heldout_test = TranslationTestSet.from_dictionary(heldout)

    def evaluator(d):
        pm = pair_matrices(d, world.source_space, corrupted)
        projected = project_space(world.source_space, fit_procrustes(pm))
        return precision_at_1(projected, corrupted, heldout_test).p_at_1

    threshold, score = tune_validation_threshold(world.gold_train, world.target_freqs, [0, 10, CUTOFF, 200], evaluator)
    assert threshold == CUTOFF
    assert score == 1.0
    assert evaluator(world.gold_train) < score
    assert len(test) == 300
    # regression values from the first run
    assert evaluator(world.gold_train) == pytest.approx(0.8875, abs=0)


def test_split_ten_pairs():
    d = SeedDictionary(tuple((f"s{i}", f"t{i}") for i in range(10)))
    first = split_dictionary(d, 0.8, seed=4)
    assert (len(first.train), len(first.heldout), first.moved) == (8, 2, 0)
    assert not set(first.train.source_words) & set(first.heldout.source_words)
    assert split_dictionary(d, 0.8, seed=4) == first


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=2, max_size=40, unique=True),
       st.integers(0, 2**32 - 1))
def test_split_never_leaks_and_preserves_pairs(raw, seed):
    d = SeedDictionary(tuple((f"s{a}", f"t{b}") for a, b in raw))
    try:
        split = split_dictionary(d, 0.7, seed)
    except DataError:
        return
    assert set(split.train.pairs) | set(split.heldout.pairs) == set(d.pairs)
    assert not set(split.train.pairs) & set(split.heldout.pairs)
    assert not set(split.train.source_words) & set(split.heldout.source_words)
    assert len(split.train) == int(0.7 * len(d) + 1e-9) + split.moved


def test_split_empty_side_errors():
    d = SeedDictionary((("a", "x"), ("b", "y")))
    with pytest.raises(DataError):
        split_dictionary(d, 0.4, seed=0)
    with pytest.raises(DataError):
        split_dictionary(d, 1.0, seed=0)
