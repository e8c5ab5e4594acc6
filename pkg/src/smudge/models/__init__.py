"""Two from-scratch linear text classifiers behind one train/predict contract.

bow_linear: one-vs-rest hinge loss over bag-of-words counts, trained by
stochastic subgradient descent with exact iterate averaging and L2 decay.

bag_embedding: the count-weighted mean of jointly-trained word embeddings fed
to a linear softmax layer, trained by plain SGD.

Training is a pure function of (dataset, spec, vocabulary): epoch shuffles are
keyed on document ids and embedding rows are initialized per token string, so
permuting the training documents changes nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..corpus import Dataset
from ..seeding import id_keyed_order, rng_for
from ..text import Vocabulary, add_bigrams, bow_matrix, build_vocabulary, tokenize
from . import backend

FAMILIES = ("bow_linear", "bag_embedding")


@dataclass(frozen=True)
class ClassifierSpec:
    """Training configuration shared by both families."""

    family: str = "bow_linear"
    epochs: int = 5
    learning_rate: float = 0.1
    l2: float = 1e-4
    embedding_dim: int = 100
    bigrams: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown classifier family {self.family!r}; expected one of {FAMILIES}")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.embedding_dim < 1:
            raise ValueError("embedding_dim must be at least 1")
        if self.learning_rate * self.l2 >= 1:
            raise ValueError("learning_rate * l2 must stay below 1 for stable decay")


def _feature_seqs(texts: Sequence[str], bigrams: bool) -> list[list[str]]:
    seqs = [tokenize(t) for t in texts]
    if bigrams:
        seqs = [add_bigrams(s) for s in seqs]
    return seqs


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


class TrainedModel:
    """Fitted classifier: vocabulary, label order, and a parameter block."""

    family: str = ""

    def __init__(self, vocabulary: Vocabulary, label_order: Sequence[str], bigrams: bool):
        self.vocabulary = vocabulary
        self.label_order = tuple(label_order)
        self.bigrams = bigrams

    def features(self, text: str) -> list[str]:
        tokens = tokenize(text)
        return add_bigrams(tokens) if self.bigrams else tokens

    def vectorize(self, text: str) -> sp.csr_matrix:
        return bow_matrix([self.features(text)], self.vocabulary)

    def score_matrix(self, bow: sp.csr_matrix) -> np.ndarray:
        raise NotImplementedError

    def _arrays(self) -> dict[str, np.ndarray]:
        raise NotImplementedError


class BowLinearModel(TrainedModel):
    """One-vs-rest linear scorer; scores are per-label margins."""

    family = "bow_linear"

    def __init__(self, vocabulary, label_order, bigrams, weights: np.ndarray, bias: np.ndarray):
        super().__init__(vocabulary, label_order, bigrams)
        self.weights = weights
        self.bias = bias

    def score_matrix(self, bow: sp.csr_matrix) -> np.ndarray:
        return np.asarray(bow @ self.weights.T) + self.bias

    def _arrays(self):
        return {"weights": self.weights, "bias": self.bias}


class BagEmbeddingModel(TrainedModel):
    """Mean-embedding softmax scorer; scores are probabilities summing to 1."""

    family = "bag_embedding"

    def __init__(self, vocabulary, label_order, bigrams, embeddings, out_weights, out_bias):
        super().__init__(vocabulary, label_order, bigrams)
        self.embeddings = embeddings
        self.out_weights = out_weights
        self.out_bias = out_bias

    def score_matrix(self, bow: sp.csr_matrix) -> np.ndarray:
        sums = np.asarray(bow.sum(axis=1)).ravel()
        hidden = np.asarray(bow @ self.embeddings)
        nonempty = sums > 0
        hidden[nonempty] /= sums[nonempty, None]
        return _softmax_rows(hidden @ self.out_weights.T + self.out_bias)

    def _arrays(self):
        return {
            "embeddings": self.embeddings,
            "out_weights": self.out_weights,
            "out_bias": self.out_bias,
        }


def _csr_parts(x: sp.csr_matrix):
    return (
        np.asarray(x.data, dtype=np.float64),
        np.asarray(x.indices, dtype=np.int32),
        np.asarray(x.indptr, dtype=np.int32),
    )


def averaged_hinge_weights(v, acc, scale_sum, step):
    """Running mean of the hinge iterates, recovered from the factored state."""
    return (scale_sum * v - acc) / step


def hinge_objective(weights, bias, bow, y_signs, l2) -> float:
    """Sum over classes of mean hinge loss, plus the L2 penalty."""
    margins = np.asarray(bow @ weights.T) + bias
    losses = np.maximum(0.0, 1.0 - y_signs.T * margins)
    return float(losses.mean(axis=0).sum() + 0.5 * l2 * (weights * weights).sum())


def _fit_bow(bow, labels, ids, label_order, vocab, spec, trace=None) -> BowLinearModel:
    n_docs, n_features = bow.shape
    n_classes = len(label_order)
    position = {label: i for i, label in enumerate(label_order)}
    y_signs = np.full((n_classes, n_docs), -1.0)
    for i, label in enumerate(labels):
        y_signs[position[label], i] = 1.0

    data, indices, indptr = _csr_parts(bow)
    v = np.zeros((n_classes, n_features))
    acc = np.zeros((n_classes, n_features))
    bias = np.zeros(n_classes)
    bias_acc = np.zeros(n_classes)
    scale, scale_sum, step = 1.0, 0.0, 0
    total_steps = spec.epochs * n_docs

    for epoch in range(spec.epochs):
        order = id_keyed_order(spec.seed, ids, "epoch", epoch)
        scale, scale_sum, step = backend.hinge_epoch(
            data, indices, indptr, y_signs, order, v, acc, bias, bias_acc,
            scale, scale_sum, step, spec.learning_rate, spec.l2, total_steps,
        )
        if trace is not None:
            trace.append(
                hinge_objective(
                    averaged_hinge_weights(v, acc, scale_sum, step),
                    bias_acc / step, bow, y_signs, spec.l2,
                )
            )

    weights = averaged_hinge_weights(v, acc, scale_sum, step)
    return BowLinearModel(vocab, label_order, spec.bigrams, weights, bias_acc / step)


def _init_embeddings(vocab: Vocabulary, dim: int, seed: int) -> np.ndarray:
    """Uniform rows in [-1/dim, 1/dim], keyed per token string."""
    emb = np.empty((len(vocab), dim))
    bound = 1.0 / dim
    for token, j in vocab.token_to_index.items():
        emb[j] = rng_for(seed, "embedding-init", token).uniform(-bound, bound, dim)
    return emb


def _fit_emb(bow, labels, ids, label_order, vocab, spec) -> BagEmbeddingModel:
    n_docs = bow.shape[0]
    position = {label: i for i, label in enumerate(label_order)}
    label_idx = np.asarray([position[label] for label in labels], dtype=np.int64)

    data, indices, indptr = _csr_parts(bow)
    emb = _init_embeddings(vocab, spec.embedding_dim, spec.seed)
    out_w = np.zeros((len(label_order), spec.embedding_dim))
    out_b = np.zeros(len(label_order))
    step = 0
    total_steps = spec.epochs * n_docs

    for epoch in range(spec.epochs):
        order = id_keyed_order(spec.seed, ids, "epoch", epoch)
        step = backend.emb_epoch(
            data, indices, indptr, label_idx, order, emb, out_w, out_b,
            step, spec.learning_rate, spec.l2, total_steps,
        )
    return BagEmbeddingModel(vocab, label_order, spec.bigrams, emb, out_w, out_b)


def train(d: Dataset, spec: ClassifierSpec, vocabulary: Vocabulary | None = None) -> TrainedModel:
    """Fit a classifier on the dataset. Deterministic for fixed (d, spec).

    Builds a vocabulary from the training text unless one is supplied (the
    sweep harness shares one vocabulary per noise level).
    """
    if len(d) == 0:
        raise ValueError("cannot train on an empty dataset")
    if len(d.label_set) < 2:
        raise ValueError(f"training needs at least 2 labels, dataset {d.name!r} has {len(d.label_set)}")

    seqs = _feature_seqs([doc.text for doc in d.documents], spec.bigrams)
    vocab = vocabulary if vocabulary is not None else build_vocabulary(seqs)
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty after pruning; nothing to train on")

    bow = bow_matrix(seqs, vocab)
    labels = [doc.label for doc in d.documents]
    ids = d.ids()
    label_order = tuple(d.label_set)
    if spec.family == "bow_linear":
        return _fit_bow(bow, labels, ids, label_order, vocab, spec)
    return _fit_emb(bow, labels, ids, label_order, vocab, spec)


def predict(model: TrainedModel, text: str) -> tuple[str, np.ndarray]:
    """Predicted label and per-label scores (margins or probabilities).

    Ties break toward the earlier label in label_order; text with no
    in-vocabulary tokens is scored from the bias terms alone.
    """
    scores = model.score_matrix(model.vectorize(text))[0]
    return model.label_order[int(np.argmax(scores))], scores


def evaluate(model: TrainedModel, d: Dataset) -> float:
    """Fraction of documents whose predicted label matches the stored label."""
    if len(d) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    seqs = _feature_seqs([doc.text for doc in d.documents], model.bigrams)
    scores = model.score_matrix(bow_matrix(seqs, model.vocabulary))
    picks = np.argmax(scores, axis=1)
    hits = sum(
        1 for doc, k in zip(d.documents, picks) if model.label_order[k] == doc.label
    )
    return hits / len(d)


def emb_loss_and_grads(emb, out_w, out_b, docs, label_idx, l2):
    """Total softmax cross-entropy (plus L2 on the output weights) and its
    analytic gradients, for gradient checking. `docs` is a list of
    (index array, count array) pairs."""
    loss = 0.0
    g_emb = np.zeros_like(emb)
    g_w = np.zeros_like(out_w)
    g_b = np.zeros_like(out_b)
    for (idx, counts), y in zip(docs, label_idx):
        total = counts.sum()
        h = (counts @ emb[idx]) / total if total > 0 else np.zeros(emb.shape[1])
        z = out_w @ h + out_b
        z_shift = z - z.max()
        lse = np.log(np.exp(z_shift).sum()) + z.max()
        loss += lse - z[y]
        probs = np.exp(z - lse)
        gz = probs
        gz[y] -= 1.0
        g_w += np.outer(gz, h)
        g_b += gz
        if total > 0:
            g_emb[idx] += (counts[:, None] / total) * (out_w.T @ gz)[None, :]
    loss += 0.5 * l2 * (out_w * out_w).sum()
    g_w += l2 * out_w
    return loss, (g_emb, g_w, g_b)


_MODEL_FORMAT = "smudge-model"
_MODEL_VERSION = 1


def save_model(model: TrainedModel, path: str | Path) -> None:
    """Self-describing container; round-trips bit-exactly."""
    vocab = model.vocabulary
    meta = {
        "format": _MODEL_FORMAT,
        "version": _MODEL_VERSION,
        "family": model.family,
        "label_order": list(model.label_order),
        "bigrams": model.bigrams,
        "vocabulary": {
            "total_docs": vocab.total_docs,
            "entries": [
                [token, index, vocab.counts[token], vocab.doc_freq[token]]
                for token, index in vocab.token_to_index.items()
            ],
        },
    }
    with open(path, "wb") as fh:
        np.savez(fh, meta=json.dumps(meta), **model._arrays())


def load_model(path: str | Path) -> TrainedModel:
    with np.load(path, allow_pickle=False) as bundle:
        meta = json.loads(str(bundle["meta"]))
        if meta.get("format") != _MODEL_FORMAT:
            raise ValueError(f"{path}: not a model container")
        entries = meta["vocabulary"]["entries"]
        vocab = Vocabulary(
            token_to_index={token: index for token, index, _, _ in entries},
            counts={token: count for token, _, count, _ in entries},
            doc_freq={token: df for token, _, _, df in entries},
            total_docs=meta["vocabulary"]["total_docs"],
        )
        common = (vocab, tuple(meta["label_order"]), meta["bigrams"])
        if meta["family"] == "bow_linear":
            return BowLinearModel(*common, bundle["weights"], bundle["bias"])
        if meta["family"] == "bag_embedding":
            return BagEmbeddingModel(
                *common, bundle["embeddings"], bundle["out_weights"], bundle["out_bias"]
            )
        raise ValueError(f"{path}: unknown family {meta['family']!r}")
