"""BIO sequence labelling over window-embedding features.

The model is a linear-chain structured model: per-label emission weights on
the concatenated embeddings of a token window, plus label-transition scores
with explicit start and stop states.  Training is the averaged structured
perceptron; decoding is exact Viterbi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .embedding_store import EmbeddingSpace
from .errors import DataError, DimensionError, FormatError

DEFAULT_ENTITY_TYPES = ("JOB_TITLE", "ORG_NAME")


def label_set(entity_types: Sequence[str] = DEFAULT_ENTITY_TYPES) -> tuple:
    """``O`` first, then ``B-e``/``I-e`` for each entity type in order."""
    labels = ["O"]
    for etype in entity_types:
        labels += [f"B-{etype}", f"I-{etype}"]
    return tuple(labels)


class Span(NamedTuple):
    entity_type: str
    start: int
    end: int  # inclusive


@dataclass(frozen=True)
class TaggedCorpus:
    sequences: tuple
    labels: tuple
    language_id: str = ""
    entity_types: tuple = DEFAULT_ENTITY_TYPES

    def __post_init__(self):
        seqs = tuple(tuple(s) for s in self.sequences)
        labs = tuple(tuple(s) for s in self.labels)
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "entity_types", tuple(self.entity_types))
        if len(seqs) != len(labs):
            raise DataError(f"{len(seqs)} token sequences but {len(labs)} label sequences")
        allowed = set(label_set(self.entity_types))
        for i, (toks, tags) in enumerate(zip(seqs, labs)):
            if len(toks) != len(tags):
                raise DataError(f"sequence {i}: {len(toks)} tokens but {len(tags)} labels")
            for tag in tags:
                if tag not in allowed:
                    raise DataError(f"sequence {i}: invalid label {tag!r}")

    def __len__(self) -> int:
        return len(self.sequences)

    def subset(self, indices: Iterable[int]) -> "TaggedCorpus":
        indices = list(indices)
        return TaggedCorpus(
            tuple(self.sequences[i] for i in indices),
            tuple(self.labels[i] for i in indices),
            self.language_id,
            self.entity_types,
        )

    def span_counts(self) -> dict:
        counts = dict.fromkeys(self.entity_types, 0)
        for tags in self.labels:
            for span in extract_spans(tags):
                counts[span.entity_type] += 1
        return counts


def load_conll(path, entity_types: Sequence[str] = DEFAULT_ENTITY_TYPES, language_id: str = "") -> TaggedCorpus:
    """Read ``token<TAB>label`` lines with blank lines between sequences."""
    path = Path(path)
    allowed = set(label_set(entity_types))
    sequences, labels = [], []
    toks, tags = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if toks:
                    sequences.append(toks)
                    labels.append(tags)
                    toks, tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"expected 'token<TAB>label', got {len(parts)} fields", path, lineno)
            token, tag = parts[0], parts[1].strip()
            if tag not in allowed:
                raise FormatError(f"invalid label {tag!r}", path, lineno)
            toks.append(token)
            tags.append(tag)
    if toks:
        sequences.append(toks)
        labels.append(tags)
    return TaggedCorpus(tuple(sequences), tuple(labels), language_id, tuple(entity_types))


def save_conll(corpus: TaggedCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, (toks, tags) in enumerate(zip(corpus.sequences, corpus.labels)):
            if i:
                fh.write("\n")
            for tok, tag in zip(toks, tags):
                fh.write(f"{tok}\t{tag}\n")


def extract_spans(labels: Sequence[str]) -> list:
    """Maximal entity spans; an ``I-e`` that does not continue an ``e`` span opens one."""
    spans = []
    current = None  # [type, start]
    for i, tag in enumerate(labels):
        if tag == "O":
            prefix, etype = "O", None
        else:
            prefix, etype = tag.split("-", 1)
        continues = prefix == "I" and current is not None and current[0] == etype
        if current is not None and not continues:
            spans.append(Span(current[0], current[1], i - 1))
            current = None
        if prefix in ("B", "I") and not continues:
            current = [etype, i]
    if current is not None:
        spans.append(Span(current[0], current[1], len(labels) - 1))
    return spans


def spans_to_bio(spans: Iterable[Span], length: int) -> list:
    tags = ["O"] * length
    for span in spans:
        if not 0 <= span.start <= span.end < length:
            raise DataError(f"span {span} out of bounds for length {length}")
        tags[span.start] = f"B-{span.entity_type}"
        for i in range(span.start + 1, span.end + 1):
            tags[i] = f"I-{span.entity_type}"
    return tags


class Features(NamedTuple):
    matrix: np.ndarray  # tokens x ((2 * radius + 1) * d + 1)
    oov_rate: float


def featurize(tokens: Sequence[str], embeddings: EmbeddingSpace, radius: int = 1) -> Features:
    """Concatenate the embeddings of the ``2*radius+1`` token window plus a bias of 1.

    Out-of-vocabulary and out-of-bounds positions contribute zero vectors.
    """
    n, d = len(tokens), embeddings.dim
    rows = np.zeros((n + 2 * radius, d))
    oov = 0
    for i, tok in enumerate(tokens):
        j = embeddings.get(tok)
        if j is None:
            oov += 1
        else:
            rows[i + radius] = embeddings.vectors[j]
    width = (2 * radius + 1) * d
    matrix = np.ones((n, width + 1))
    for off in range(2 * radius + 1):
        matrix[:, off * d:(off + 1) * d] = rows[off:off + n]
    return Features(matrix, oov / n if n else 0.0)


@dataclass
class TaggerModel:
    labels: tuple
    emission: np.ndarray  # |L| x feature width
    transition: np.ndarray  # (|L|+1) x (|L|+1); last row is START, last column is STOP
    radius: int
    dim: int
    epochs: int = 0
    seed: int = 0
    averaged: bool = True

    def __post_init__(self):
        self.labels = tuple(self.labels)
        L = len(self.labels)
        width = (2 * self.radius + 1) * self.dim + 1
        self.emission = np.asarray(self.emission, dtype=np.float64)
        self.transition = np.asarray(self.transition, dtype=np.float64)
        if self.emission.shape != (L, width):
            raise DataError(f"emission weights have shape {self.emission.shape}, expected {(L, width)}")
        if self.transition.shape != (L + 1, L + 1):
            raise DataError(f"transition weights have shape {self.transition.shape}, expected {(L + 1, L + 1)}")

    @property
    def entity_types(self) -> tuple:
        return tuple(lab[2:] for lab in self.labels if lab.startswith("B-"))

    @property
    def feature_width(self) -> int:
        return self.emission.shape[1]

    @classmethod
    def zeros(cls, labels, radius, dim, **meta) -> "TaggerModel":
        L = len(labels)
        return cls(labels, np.zeros((L, (2 * radius + 1) * dim + 1)), np.zeros((L + 1, L + 1)), radius, dim, **meta)

    def path_score(self, features: np.ndarray, path: Sequence[int]) -> float:
        L = len(self.labels)
        score = self.transition[L, path[0]] + self.transition[path[-1], L]
        for t, y in enumerate(path):
            score += features[t] @ self.emission[y]
            if t:
                score += self.transition[path[t - 1], y]
        return float(score)


def _viterbi_indices(emission_scores: list, trans: list, L: int) -> list:
    """Exact argmax path; among equal-scoring paths the lexicographically smallest index sequence.

    The recursion runs from the end of the sentence so that reading the path
    forward can pick the smallest label at each position.
    """
    n = len(emission_scores)
    start = trans[L][:L]
    beta = [None] * n
    beta[n - 1] = [emission_scores[n - 1][y] + trans[y][L] for y in range(L)]
    for t in range(n - 2, -1, -1):
        nxt = beta[t + 1]
        em = emission_scores[t]
        row = []
        for y in range(L):
            ty = trans[y]
            row.append(em[y] + max([ty[z] + nxt[z] for z in range(L)]))
        beta[t] = row
    first = [start[y] + beta[0][y] for y in range(L)]
    best = max(first)
    path = [first.index(best)]
    for t in range(1, n):
        ty = trans[path[-1]]
        nxt = beta[t]
        cand = [ty[z] + nxt[z] for z in range(L)]
        path.append(cand.index(max(cand)))
    return path


def _decode_matrix(model: TaggerModel, matrix: np.ndarray) -> list:
    if matrix.shape[0] == 0:
        return []
    scores = (matrix @ model.emission.T).tolist()
    return _viterbi_indices(scores, model.transition.tolist(), len(model.labels))


def viterbi_decode(model: TaggerModel, features) -> list:
    """Highest-scoring label sequence for one featurized sentence."""
    matrix = features.matrix if isinstance(features, Features) else np.asarray(features, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != model.feature_width:
        raise DimensionError(
            f"feature matrix has shape {matrix.shape}, model expects width {model.feature_width}"
        )
    return [model.labels[i] for i in _decode_matrix(model, matrix)]


def _space_for(corpus: TaggedCorpus, embeddings: Mapping[str, EmbeddingSpace]) -> EmbeddingSpace:
    if isinstance(embeddings, EmbeddingSpace):
        return embeddings
    try:
        return embeddings[corpus.language_id]
    except KeyError:
        raise DataError(f"no embedding space provided for language {corpus.language_id!r}") from None


def train_tagger(
    train: Sequence[TaggedCorpus],
    embeddings,
    epochs: int = 10,
    seed: int = 0,
    radius: int = 1,
) -> TaggerModel:
    """Averaged structured perceptron over the concatenation of ``train`` corpora.

    ``embeddings`` maps each corpus ``language_id`` to a space; all spaces must
    share one dimension (non-pivot languages already projected).  Each epoch
    visits the sequences in a fresh seeded shuffle.
    """
    if isinstance(train, TaggedCorpus):
        train = [train]
    if epochs < 1:
        raise DataError("epochs must be positive")
    items = []
    dims = set()
    entity_types = None
    for corpus in train:
        space = _space_for(corpus, embeddings)
        dims.add(space.dim)
        if entity_types is None:
            entity_types = corpus.entity_types
        elif corpus.entity_types != entity_types:
            raise DataError("training corpora use different entity type sets")
        for toks, tags in zip(corpus.sequences, corpus.labels):
            if toks:
                items.append((featurize(toks, space, radius).matrix, tags))
    if not items:
        raise DataError("no training sequences")
    if len(dims) != 1:
        raise DimensionError(f"embedding spaces disagree on dimension: {sorted(dims)}")
    dim = dims.pop()
    labels = label_set(entity_types)
    lab_index = {lab: i for i, lab in enumerate(labels)}
    L = len(labels)
    model = TaggerModel.zeros(labels, radius, dim, epochs=epochs, seed=seed, averaged=True)
    w, tr = model.emission, model.transition
    w_acc, tr_acc = np.zeros_like(w), np.zeros_like(tr)
    gold_paths = [[lab_index[t] for t in tags] for _, tags in items]
    rng = np.random.default_rng(seed)
    step = 1
    for _ in range(epochs):
        for i in rng.permutation(len(items)).tolist():
            matrix, gold = items[i][0], gold_paths[i]
            pred = _decode_matrix(model, matrix)
            if pred != gold:
                for t, (g, p) in enumerate(zip(gold, pred)):
                    if g != p:
                        w[g] += matrix[t]
                        w[p] -= matrix[t]
                        w_acc[g] += step * matrix[t]
                        w_acc[p] -= step * matrix[t]
                delta = np.zeros_like(tr)
                for path, sign in ((gold, 1.0), (pred, -1.0)):
                    prev = L
                    for y in path:
                        delta[prev, y] += sign
                        prev = y
                    delta[prev, L] += sign
                tr += delta
                tr_acc += step * delta
            step += 1
    model.emission = w - w_acc / step
    model.transition = tr - tr_acc / step
    return model


@dataclass
class F1Report:
    per_type: dict  # type -> dict(precision, recall, f1, gold, predicted, correct)
    average_f1: float
    oov_rate: Optional[float] = None
    predictions: list = field(default_factory=list, repr=False)

    def summary(self) -> str:
        parts = [f"F1 {self.average_f1!r}"]
        for etype, row in self.per_type.items():
            parts.append(f"{etype} {row['f1']!r}")
        return " ".join(parts)

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("entity_type\tprecision\trecall\tf1\tgold\tpredicted\tcorrect\n")
            for etype, r in self.per_type.items():
                fh.write(
                    f"{etype}\t{r['precision']!r}\t{r['recall']!r}\t{r['f1']!r}\t"
                    f"{r['gold']}\t{r['predicted']}\t{r['correct']}\n"
                )
            fh.write(f"AVERAGE\t\t\t{self.average_f1!r}\t\t\t\n")


def span_f1(gold_labels: Sequence[Sequence[str]], pred_labels: Sequence[Sequence[str]],
            entity_types: Sequence[str] = DEFAULT_ENTITY_TYPES) -> F1Report:
    """Exact-match span precision, recall and F1 per type, macro-averaged over ``entity_types``."""
    if len(gold_labels) != len(pred_labels):
        raise DataError("gold and predicted corpora differ in sequence count")
    gold_spans = {e: set() for e in entity_types}
    pred_spans = {e: set() for e in entity_types}
    for i, (g, p) in enumerate(zip(gold_labels, pred_labels)):
        if len(g) != len(p):
            raise DataError(f"sequence {i}: gold and predicted lengths differ")
        for span in extract_spans(g):
            gold_spans.setdefault(span.entity_type, set()).add((i, span))
        for span in extract_spans(p):
            pred_spans.setdefault(span.entity_type, set()).add((i, span))
    per_type = {}
    for etype in entity_types:
        gold, pred = gold_spans[etype], pred_spans[etype]
        correct = len(gold & pred)
        precision = correct / len(pred) if pred else 0.0
        recall = correct / len(gold) if gold else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_type[etype] = dict(
            precision=precision, recall=recall, f1=f1,
            gold=len(gold), predicted=len(pred), correct=correct,
        )
    average = sum(r["f1"] for r in per_type.values()) / len(per_type) if per_type else 0.0
    return F1Report(per_type, average)


def predict(model: TaggerModel, corpus: TaggedCorpus, embeddings) -> tuple:
    """Decoded label sequences and the token OOV rate over ``corpus``."""
    space = _space_for(corpus, embeddings)
    if space.dim != model.dim:
        raise DimensionError(f"embedding dimension {space.dim} != model dimension {model.dim}")
    preds = []
    oov = tokens = 0
    for toks in corpus.sequences:
        feats = featurize(toks, space, model.radius)
        oov += round(feats.oov_rate * len(toks))
        tokens += len(toks)
        preds.append(viterbi_decode(model, feats))
    return preds, (oov / tokens if tokens else 0.0)


def evaluate_f1(model: TaggerModel, test: TaggedCorpus, embeddings) -> F1Report:
    preds, oov_rate = predict(model, test, embeddings)
    report = span_f1(test.labels, preds, model.entity_types)
    report.oov_rate = oov_rate
    report.predictions = preds
    return report


# -- serialization ---------------------------------------------------------

_MAGIC = "seedlex-tagger 1"


def save_model(model: TaggerModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_MAGIC + "\n")
        fh.write("labels " + " ".join(model.labels) + "\n")
        fh.write(f"features radius {model.radius} dim {model.dim}\n")
        fh.write(f"training epochs {model.epochs} seed {model.seed} averaged {int(model.averaged)}\n")
        for name, M in (("emission", model.emission), ("transition", model.transition)):
            fh.write(f"matrix {name} {M.shape[0]} {M.shape[1]}\n")
            for row in M.tolist():
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def load_model(path) -> TaggerModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh]
    if not lines or lines[0] != _MAGIC:
        raise FormatError("not a tagger model file", path, 1)
    try:
        labels = lines[1].split()[1:]
        feat = lines[2].split()
        train = lines[3].split()
        radius, dim = int(feat[2]), int(feat[4])
        epochs, seed, averaged = int(train[2]), int(train[4]), bool(int(train[6]))
        mats = {}
        i = 4
        while i < len(lines):
            if not lines[i].strip():
                i += 1
                continue
            _, name, rows, cols = lines[i].split()
            rows, cols = int(rows), int(cols)
            data = [[float(x) for x in lines[i + 1 + r].split()] for r in range(rows)]
            mats[name] = np.array(data, dtype=np.float64).reshape(rows, cols)
            i += rows + 1
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed tagger model: {exc}", path) from None
    return TaggerModel(labels, mats["emission"], mats["transition"], radius, dim, epochs, seed, averaged)
