"""Training-data corruption: four mechanisms and their composite schedule.

Text mechanisms (truncation, interspersal) rewrite the document as a
single-space token join and never touch labels; label mechanisms (flipping,
conflicting replication) never touch text. Every mechanism marks the
documents it was applied to with an audit flag, including no-op applications,
so flag counts are closed-form functions of the noise level:

    truncated     = floor(p * N)
    interspersed  = floor(p * N)
    label_flipped = sum over affected labels of floor(p * n_label)
    replica       = same sum, selected from an independent stream

where the affected labels are floor(p * |labels|) of them, raised to 1 when
p > 0 would otherwise round to none.

All selections draw exact counts from independent named streams; per-document
randomness is keyed on (seed, mechanism, document id), so results do not
depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .corpus import Dataset, Document
from .seeding import exact_count, rng_for
from .text import tokenize

MECHANISM_ORDER = ("truncate", "intersperse", "flip", "replicate")


@dataclass(frozen=True)
class NoisePlan:
    """A fully-specified injection: level, seed, toggles, distractor source."""

    level: float
    seed: int = 0
    enable_truncate: bool = True
    enable_intersperse: bool = True
    enable_flip: bool = True
    enable_replicate: bool = True
    distractor: Dataset | None = None
    truncate_keep: str = "prefix"

    def __post_init__(self):
        if not 0 <= self.level <= 1:
            raise ValueError(f"noise level must lie in [0, 1], got {self.level}")
        if self.truncate_keep not in ("prefix", "suffix"):
            raise ValueError(f"truncate_keep must be 'prefix' or 'suffix', got {self.truncate_keep!r}")
        if self.enable_intersperse and self.level > 0:
            if self.distractor is None or len(self.distractor) == 0:
                raise ValueError(
                    "interspersal is enabled at a positive level but no distractor corpus was given"
                )


def select_fraction(ids: Sequence[str], p: float, seed: int, stream_tag: str) -> list[str]:
    """Exactly floor(p * N) ids, chosen by a seeded shuffle keyed on the tag.

    Distinct stream tags give independent selections under the same seed.
    """
    k = exact_count(p, len(ids))
    order = rng_for(seed, stream_tag).permutation(len(ids))
    return [ids[i] for i in order[:k]]


def _take(items: Sequence[str], k: int, seed: int, stream_tag: str) -> list[str]:
    order = rng_for(seed, stream_tag).permutation(len(items))
    return [items[i] for i in order[:k]]


def truncate_doc(doc: Document, p: float, keep: str = "prefix") -> Document:
    """Drop floor(p * L) of the document's L tokens, keeping the prefix.

    Export-style truncation cuts tails; keep="suffix" inverts that. The raw
    string is preserved whenever nothing is dropped, and the provenance flag
    is set either way because the document was selected for truncation.
    """
    tokens = tokenize(doc.text)
    dropped = exact_count(p, len(tokens))
    provenance = doc.provenance | {"truncated"}
    if dropped == 0:
        return replace(doc, provenance=provenance)
    kept = len(tokens) - dropped
    kept_tokens = tokens[:kept] if keep == "prefix" else tokens[len(tokens) - kept :]
    return replace(doc, text=" ".join(kept_tokens), provenance=provenance)


def _distractor_pool(distractor: Dataset) -> list[list[str]]:
    pool = [tokens for doc in distractor.documents if (tokens := tokenize(doc.text))]
    return pool


def intersperse_doc(
    doc: Document,
    p: float,
    distractor: Dataset,
    seed: int,
    *,
    base_len: int | None = None,
    pool: list[list[str]] | None = None,
) -> Document:
    """Insert floor(p * L) irrelevant tokens between the document's tokens.

    Insertions arrive as contiguous snippets, each the leading run of a
    randomly chosen distractor document, cut to fit; snippet positions are
    uniform over the L+1 inter-token gaps. The original tokens stay in order,
    so the input sequence is always a subsequence of the output. Randomness
    is keyed on (seed, "intersperse", doc.id).

    `base_len` overrides the length the insertion budget is computed from;
    the composite schedule passes the pre-truncation length.
    """
    tokens = tokenize(doc.text)
    base = len(tokens) if base_len is None else base_len
    need = exact_count(p, base)
    provenance = doc.provenance | {"interspersed"}
    if need == 0:
        return replace(doc, provenance=provenance)

    if pool is None:
        pool = _distractor_pool(distractor)
    if not pool:
        raise ValueError("distractor corpus has no tokenizable text to intersperse")

    rng = rng_for(seed, "intersperse", doc.id)
    snippets: list[list[str]] = []
    remaining = need
    while remaining > 0:
        run = pool[int(rng.integers(len(pool)))]
        take = min(len(run), remaining)
        snippets.append(run[:take])
        remaining -= take
    gaps = [int(rng.integers(len(tokens) + 1)) for _ in snippets]

    slots: list[list[str]] = [[] for _ in range(len(tokens) + 1)]
    for snippet, gap in zip(snippets, gaps):
        slots[gap].extend(snippet)
    merged: list[str] = []
    for i, slot in enumerate(slots):
        merged.extend(slot)
        if i < len(tokens):
            merged.append(tokens[i])
    return replace(doc, text=" ".join(merged), provenance=provenance)


def _affected_labels(d: Dataset, p: float, seed: int, stream_tag: str) -> set[str]:
    count = exact_count(p, len(d.label_set))
    if p > 0 and count == 0:
        count = 1  # small label sets still receive label noise at low levels
    return set(_take(list(d.label_set), count, seed, f"{stream_tag}:labels"))


def _selected_per_label(d: Dataset, p: float, seed: int, stream_tag: str) -> set[str]:
    """Ids hit by a label mechanism: floor(p * n_label) docs in each affected label."""
    affected = _affected_labels(d, p, seed, stream_tag)
    chosen: set[str] = set()
    for label in d.label_set:
        if label not in affected:
            continue
        group_ids = [doc.id for doc in d.by_label[label]]
        chosen.update(_take(group_ids, exact_count(p, len(group_ids)), seed, f"{stream_tag}:docs:{label}"))
    return chosen


def _flip_target(label_set: Sequence[str], current: str, seed: int, stream_tag: str, doc_id: str) -> str:
    others = [label for label in label_set if label != current]
    rng = rng_for(seed, f"{stream_tag}:target", doc_id)
    return others[int(rng.integers(len(others)))]


def _pruned_label_set(d: Dataset, docs: Sequence[Document]) -> tuple[str, ...]:
    used = {doc.label for doc in docs}
    return tuple(label for label in d.label_set if label in used)


def flip_labels(d: Dataset, p: float, seed: int, *, stream_tag: str = "flip") -> Dataset:
    """Reassign labels uniformly at random (never to themselves) for
    floor(p * n_label) documents within each affected label."""
    if not 0 <= p <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {p}")
    if p == 0:
        return d
    if len(d.label_set) < 2:
        raise ValueError("cannot flip labels in a single-label dataset")

    chosen = _selected_per_label(d, p, seed, stream_tag)
    docs = []
    for doc in d.documents:
        if doc.id in chosen:
            target = _flip_target(d.label_set, doc.label, seed, stream_tag, doc.id)
            docs.append(replace(doc, label=target, provenance=doc.provenance | {"label_flipped"}))
        else:
            docs.append(doc)
    return Dataset(tuple(docs), label_set=_pruned_label_set(d, docs), name=d.name)


def replicate_conflict(d: Dataset, p: float, seed: int, *, stream_tag: str = "replicate") -> Dataset:
    """Clone floor(p * n_label) documents per affected label, giving each clone
    a fresh id and a conflicting label. Originals are untouched; clones are
    appended in document order."""
    if not 0 <= p <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {p}")
    if p == 0:
        return d
    if len(d.label_set) < 2:
        raise ValueError("cannot create conflicting replicas in a single-label dataset")

    chosen = _selected_per_label(d, p, seed, stream_tag)
    clones = [
        Document(
            id=f"{doc.id}::replica",
            text=doc.text,
            label=_flip_target(d.label_set, doc.label, seed, stream_tag, doc.id),
            provenance=frozenset({"replica", "label_flipped"}),
        )
        for doc in d.documents
        if doc.id in chosen
    ]
    docs = tuple(d.documents) + tuple(clones)
    return Dataset(docs, label_set=d.label_set, name=d.name)


def apply_noise(d: Dataset, plan: NoisePlan) -> Dataset:
    """Run the composite schedule at level p = plan.level.

    Fixed mechanism order — truncate, intersperse, flip, replicate — with all
    four selections drawn independently against the input dataset, so the flag
    counts keep their closed forms. Truncation applies at depth p to a p
    fraction of documents; interspersal adds p of each selected document's
    pre-truncation length; flips and replicas follow the per-label rule.
    Replicas clone the already-text-noised document and conflict with its
    current (possibly flipped) label.
    """
    if d.name.endswith(":test"):
        raise ValueError(f"refusing to noise {d.name!r}: clean test sets are never injected")
    p = plan.level
    if p == 0:
        return d

    ids = d.ids()
    truncate_ids = (
        set(select_fraction(ids, p, plan.seed, "truncate")) if plan.enable_truncate else set()
    )
    intersperse_ids = (
        set(select_fraction(ids, p, plan.seed, "intersperse")) if plan.enable_intersperse else set()
    )
    flip_ids = _selected_per_label(d, p, plan.seed, "flip") if plan.enable_flip else set()
    replicate_ids = (
        _selected_per_label(d, p, plan.seed, "replicate") if plan.enable_replicate else set()
    )

    pool = _distractor_pool(plan.distractor) if intersperse_ids else None
    if intersperse_ids and not pool:
        raise ValueError("distractor corpus has no tokenizable text to intersperse")

    noised: list[Document] = []
    for doc in d.documents:
        current = doc
        original_len: int | None = None
        if doc.id in truncate_ids:
            original_len = len(tokenize(doc.text))
            current = truncate_doc(current, p, plan.truncate_keep)
        if doc.id in intersperse_ids:
            base = original_len if original_len is not None else len(tokenize(current.text))
            current = intersperse_doc(
                current, p, plan.distractor, plan.seed, base_len=base, pool=pool
            )
        if doc.id in flip_ids:
            target = _flip_target(d.label_set, current.label, plan.seed, "flip", doc.id)
            current = replace(current, label=target, provenance=current.provenance | {"label_flipped"})
        noised.append(current)

    clones = [
        Document(
            id=f"{doc.id}::replica",
            text=doc.text,
            label=_flip_target(d.label_set, doc.label, plan.seed, "replicate", doc.id),
            provenance=frozenset({"replica", "label_flipped"}),
        )
        for doc in noised
        if doc.id in replicate_ids
    ]

    docs = tuple(noised) + tuple(clones)
    return Dataset(docs, label_set=_pruned_label_set(d, docs), name=d.name)
