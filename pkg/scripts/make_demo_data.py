#!/usr/bin/env python3
"""Generate a small demo corpus, distractor and sweep config.

    python scripts/make_demo_data.py demo/

then:

    smudge sweep --config demo/sweep.cfg
"""

from __future__ import annotations

import sys
from pathlib import Path

from smudge.corpus import Dataset, Document, save_dataset
from smudge.seeding import rng_for


def labeled_corpus(n_docs=600, n_labels=4, seed=7, vocab_per_label=60, doc_len=25):
    docs = []
    for i in range(n_docs):
        label = f"topic{i % n_labels}"
        rng = rng_for(seed, "doc", i)
        words = [f"{label}w{int(rng.integers(vocab_per_label))}" for _ in range(doc_len)]
        docs.append(Document(id=f"d{i}", text=" ".join(words), label=label))
    return Dataset(tuple(docs), name="demo")


def distractor_corpus(n_docs=250, seed=8, lexicon=1200, doc_len=35):
    docs = []
    for i in range(n_docs):
        rng = rng_for(seed, "noise", i)
        words = [f"offtopic{int(rng.integers(lexicon))}" for _ in range(doc_len)]
        docs.append(Document(id=f"x{i}", text=" ".join(words), label="offtopic"))
    return Dataset(tuple(docs), name="demo-distractor")


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo")
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(labeled_corpus(), out / "corpus.jsonl")
    save_dataset(distractor_corpus(), out / "distractor.jsonl")
    (out / "sweep.cfg").write_text(
        f"""# demo sweep: dirty-CV curve vs clean-test curve across noise levels
seed = 42
dataset.path = {out / 'corpus.jsonl'}
noise.distractor_path = {out / 'distractor.jsonl'}
noise.grid = 0,0.25,0.5,0.75
model.family = bow_linear
eval.folds = 5
out.dir = {out / 'run'}
""",
        encoding="utf-8",
    )
    print(f"wrote {out}/corpus.jsonl, {out}/distractor.jsonl, {out}/sweep.cfg")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
