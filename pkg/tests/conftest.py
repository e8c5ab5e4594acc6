"""Shared corpus builders for the test suite.

All builders are deterministic functions of their seeds; token pools are
sized so that generated corpora survive the vocabulary pruning rules
(counts >= 6, document frequency < 50%).
"""

from __future__ import annotations

import pytest

from smudge.corpus import Dataset, Document
from smudge.seeding import rng_for


def make_corpus(
    n_docs: int,
    n_labels: int,
    seed: int,
    *,
    vocab_per_label: int = 40,
    doc_len: int = 20,
    name: str = "toy",
    prefix: str = "",
) -> Dataset:
    """Balanced corpus with disjoint per-label token pools (fully separable).

    A non-empty `prefix` keeps pools disjoint across corpora too.
    """
    docs = []
    for i in range(n_docs):
        label = f"L{i % n_labels}"
        rng = rng_for(seed, "doc", i)
        words = [
            f"{prefix}w{label.lower()}t{int(rng.integers(vocab_per_label))}"
            for _ in range(doc_len)
        ]
        docs.append(Document(id=f"d{i}", text=" ".join(words), label=label))
    return Dataset(tuple(docs), name=name)


def make_distractor(
    n_docs: int = 300,
    seed: int = 99,
    *,
    lexicon: int = 1500,
    doc_len: int = 40,
    name: str = "distractor",
) -> Dataset:
    """Out-of-domain filler text with a wide lexicon (stays under the 50% DF cap)."""
    docs = []
    for i in range(n_docs):
        rng = rng_for(seed, "distractor", i)
        words = [f"zz{int(rng.integers(lexicon))}" for _ in range(doc_len)]
        docs.append(Document(id=f"x{i}", text=" ".join(words), label="filler"))
    return Dataset(tuple(docs), name=name)


@pytest.fixture(scope="session")
def separable_two_label() -> Dataset:
    """Two classes, disjoint 20-word vocabularies, 50 docs each."""
    return make_corpus(100, 2, seed=11, vocab_per_label=20, doc_len=12, name="separable")


@pytest.fixture(scope="session")
def four_label_corpus() -> Dataset:
    return make_corpus(400, 4, seed=12, name="four")


@pytest.fixture(scope="session")
def distractor() -> Dataset:
    return make_distractor()
