"""Lowercasing tokenizer, frequency-pruned vocabulary, bag-of-words vectors."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

# Maximal runs of Unicode alphanumerics; underscore counts as punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+")

TokenSequence = list[str]


def tokenize(text: str) -> TokenSequence:
    """Lowercase `text` and split it on runs of non-alphanumeric characters.

    Idempotent on single-space joins of its own output:
    tokenize(" ".join(tokenize(t))) == tokenize(t).
    """
    return _TOKEN_RE.findall(text.lower())


def add_bigrams(tokens: Sequence[str]) -> list[str]:
    """Unigram features plus adjacent-pair features joined with '_'.

    Tokens never contain underscores, so pair features cannot collide with
    unigrams.
    """
    return list(tokens) + [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]


@dataclass
class Vocabulary:
    """Token-to-dense-index map with the counts that justified each entry.

    Indices are dense 0..V-1 in first-occurrence order over the corpus the
    vocabulary was built from.
    """

    token_to_index: dict[str, int]
    counts: dict[str, int]
    doc_freq: dict[str, int]
    total_docs: int

    def __len__(self) -> int:
        return len(self.token_to_index)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    @property
    def tokens(self) -> list[str]:
        """Tokens in index order."""
        return list(self.token_to_index)

    def save(self, path: str | Path) -> None:
        """One token per line: token, index, corpus count, document frequency."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"#total_docs={self.total_docs}\n")
            for token, index in self.token_to_index.items():
                fh.write(f"{token}\t{index}\t{self.counts[token]}\t{self.doc_freq[token]}\n")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        token_to_index: dict[str, int] = {}
        counts: dict[str, int] = {}
        doc_freq: dict[str, int] = {}
        total_docs = 0
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#total_docs="):
                    total_docs = int(line.split("=", 1)[1])
                    continue
                token, index, count, df = line.split("\t")
                token_to_index[token] = int(index)
                counts[token] = int(count)
                doc_freq[token] = int(df)
        return cls(token_to_index, counts, doc_freq, total_docs)


def build_vocabulary(
    corpus: Iterable[Sequence[str]],
    min_count: int = 6,
    max_df_ratio: float = 0.5,
) -> Vocabulary:
    """Build a pruned vocabulary from tokenized documents.

    Retains tokens whose corpus count is at least `min_count` and whose
    document frequency is strictly below `max_df_ratio` of all documents.
    Indices follow first occurrence in corpus order, so the result is a pure
    function of the (ordered) corpus.
    """
    totals: dict[str, int] = {}
    dfs: dict[str, int] = {}
    total_docs = 0
    for seq in corpus:
        total_docs += 1
        for token in seq:
            totals[token] = totals.get(token, 0) + 1
        for token in dict.fromkeys(seq):
            dfs[token] = dfs.get(token, 0) + 1
    if total_docs == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")

    token_to_index: dict[str, int] = {}
    counts: dict[str, int] = {}
    doc_freq: dict[str, int] = {}
    for token, count in totals.items():
        if count >= min_count and dfs[token] < max_df_ratio * total_docs:
            token_to_index[token] = len(token_to_index)
            counts[token] = count
            doc_freq[token] = dfs[token]
    return Vocabulary(token_to_index, counts, doc_freq, total_docs)


def vectorize_bow(seq: Sequence[str], vocab: Vocabulary) -> sp.csr_matrix:
    """Sparse 1 x V count vector; out-of-vocabulary tokens are ignored."""
    return bow_matrix([seq], vocab)


def bow_matrix(seqs: Iterable[Sequence[str]], vocab: Vocabulary) -> sp.csr_matrix:
    """Stacked count vectors, one row per sequence, with sorted column indices."""
    lookup = vocab.token_to_index
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for seq in seqs:
        row: dict[int, int] = {}
        for token in seq:
            j = lookup.get(token)
            if j is not None:
                row[j] = row.get(j, 0) + 1
        for j in sorted(row):
            indices.append(j)
            data.append(float(row[j]))
        indptr.append(len(indices))
    return sp.csr_matrix(
        (
            np.asarray(data, dtype=np.float64),
            np.asarray(indices, dtype=np.int32),
            np.asarray(indptr, dtype=np.int32),
        ),
        shape=(len(indptr) - 1, len(vocab)),
    )
