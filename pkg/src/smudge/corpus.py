"""Labeled text datasets: loading, validation, splitting, subsampling, synthesis.

The interchange format is UTF-8 JSON lines with fields id (optional), text and
label, plus a comma-joined provenance field on documents that noise injection
has touched. All operations are pure functions of their inputs and seeds.
"""

from __future__ import annotations

import csv
import hashlib
import json
import statistics
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

from .seeding import exact_round, rng_for
from .text import tokenize

#: Canonical serialization order for audit flags.
PROVENANCE_FLAGS = ("original", "replica", "truncated", "interspersed", "label_flipped")

ORIGINAL = frozenset({"original"})


@dataclass(frozen=True)
class Document:
    """One labeled text record plus audit flags for the noise that touched it."""

    id: str
    text: str
    label: str
    provenance: frozenset[str] = ORIGINAL


@dataclass(frozen=True)
class Dataset:
    """An ordered, validated collection of documents and its label set.

    `label_set` keeps first-occurrence order when derived; when passed
    explicitly it must cover exactly the labels in use.
    """

    documents: tuple[Document, ...]
    label_set: tuple[str, ...] = ()
    name: str = "dataset"

    def __post_init__(self):
        docs = tuple(self.documents)
        object.__setattr__(self, "documents", docs)

        seen_ids = set()
        used_labels: dict[str, None] = {}
        for doc in docs:
            if doc.id in seen_ids:
                raise ValueError(f"duplicate document id {doc.id!r} in dataset {self.name!r}")
            seen_ids.add(doc.id)
            used_labels.setdefault(doc.label)
            unknown = doc.provenance - set(PROVENANCE_FLAGS)
            if unknown:
                raise ValueError(f"document {doc.id!r} has unknown provenance flags {sorted(unknown)}")
            if ("original" in doc.provenance) == ("replica" in doc.provenance):
                raise ValueError(
                    f"document {doc.id!r} must carry exactly one of the 'original'/'replica' flags"
                )
            # empty text comes only from truncation, directly or via a clone
            # of a fully-truncated source
            if doc.text == "" and not doc.provenance & {"truncated", "replica"}:
                raise ValueError(f"document {doc.id!r} has empty text but was never truncated")

        if not self.label_set:
            object.__setattr__(self, "label_set", tuple(used_labels))
        else:
            declared = tuple(self.label_set)
            object.__setattr__(self, "label_set", declared)
            if len(set(declared)) != len(declared):
                raise ValueError(f"label_set of {self.name!r} contains duplicates")
            if set(declared) != set(used_labels):
                raise ValueError(
                    f"label_set of {self.name!r} does not match the labels in use "
                    f"(declared {sorted(declared)}, used {sorted(used_labels)})"
                )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    @cached_property
    def by_label(self) -> dict[str, tuple[Document, ...]]:
        """Documents grouped by label, groups in label_set order."""
        groups: dict[str, list[Document]] = {label: [] for label in self.label_set}
        for doc in self.documents:
            groups[doc.label].append(doc)
        return {label: tuple(docs) for label, docs in groups.items()}

    def ids(self) -> list[str]:
        return [doc.id for doc in self.documents]

    def with_name(self, name: str) -> "Dataset":
        return replace(self, name=name)


@dataclass(frozen=True)
class SplitSpec:
    """How to carve out the clean held-out set."""

    test_fraction: float = 0.30
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")


def _parse_provenance(raw: str | None, where: str) -> frozenset[str]:
    if raw is None or raw == "":
        return ORIGINAL
    flags = frozenset(part.strip() for part in raw.split(","))
    unknown = flags - set(PROVENANCE_FLAGS)
    if unknown:
        raise ValueError(f"{where}: unknown provenance flags {sorted(unknown)}")
    return flags


def _record_to_document(record: dict, index: int, where: str) -> Document:
    for key in ("text", "label"):
        if record.get(key) is None:
            raise ValueError(f"{where}: missing field {key!r}")
    text = record["text"]
    if not isinstance(text, str):
        raise ValueError(f"{where}: field 'text' must be a string")
    provenance = _parse_provenance(record.get("provenance"), where)
    if text == "" and not provenance & {"truncated", "replica"}:
        # only truncation (possibly via a clone of a truncated source) may
        # produce empty documents
        raise ValueError(f"{where}: field 'text' is empty")
    doc_id = record.get("id")
    doc_id = str(index) if doc_id is None or doc_id == "" else str(doc_id)
    return Document(
        id=doc_id,
        text=text,
        label=str(record["label"]),
        provenance=provenance,
    )


def load_dataset(
    path: str | Path,
    format: str = "jsonl",
    *,
    delimiter: str = ",",
    name: str | None = None,
) -> Dataset:
    """Load a dataset from JSON lines or a delimited file with a header.

    Records missing an id get their zero-based record index as id. Record
    order is the file order, so identical files always load identically.
    """
    path = Path(path)
    documents: list[Document] = []
    if format in ("jsonl", "json-lines"):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                where = f"{path.name} line {lineno}"
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as err:
                    raise ValueError(f"{where}: invalid JSON ({err.msg})") from err
                if not isinstance(record, dict):
                    raise ValueError(f"{where}: expected a JSON object")
                documents.append(_record_to_document(record, len(documents), where))
    elif format in ("delimited", "delimiter-separated", "csv", "tsv"):
        if format == "tsv":
            delimiter = "\t"
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter=delimiter)
            if reader.fieldnames is None:
                raise ValueError(f"{path.name}: empty file")
            missing = {"text", "label"} - set(reader.fieldnames)
            if missing:
                raise ValueError(f"{path.name}: header lacks columns {sorted(missing)}")
            for record in reader:
                where = f"{path.name} line {reader.line_num}"
                documents.append(_record_to_document(record, len(documents), where))
    else:
        raise ValueError(f"unknown dataset format {format!r}")

    if not documents:
        raise ValueError(f"{path.name}: no records found")
    return Dataset(tuple(documents), name=name or path.stem)


def save_dataset(d: Dataset, path: str | Path) -> None:
    """Write the interchange format; provenance appears only once noise did."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in d.documents:
            fh.write(document_to_json(doc))
            fh.write("\n")


def document_to_json(doc: Document) -> str:
    record = {"id": doc.id, "text": doc.text, "label": doc.label}
    if doc.provenance != ORIGINAL:
        record["provenance"] = ",".join(f for f in PROVENANCE_FLAGS if f in doc.provenance)
    return json.dumps(record, ensure_ascii=False)


def content_hash(d: Dataset) -> str:
    """Order-sensitive digest of the dataset contents (not its name)."""
    h = hashlib.sha256()
    for doc in d.documents:
        h.update(document_to_json(doc).encode("utf-8"))
        h.update(b"\n")
    h.update("\x1f".join(d.label_set).encode("utf-8"))
    return h.hexdigest()


def _subset(d: Dataset, keep_ids: set[str], name: str) -> Dataset:
    docs = tuple(doc for doc in d.documents if doc.id in keep_ids)
    used = {doc.label for doc in docs}
    label_set = tuple(label for label in d.label_set if label in used)
    return Dataset(docs, label_set=label_set, name=name)


def split_train_test(d: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Partition into train/test by id, keeping document order on both sides."""
    test_ids: set[str] = set()
    if spec.stratified:
        for label in d.label_set:
            group = d.by_label[label]
            if len(group) < 2:
                raise ValueError(
                    f"label {label!r} has {len(group)} document(s); "
                    "stratified splitting needs at least 2 per label"
                )
            n_test = exact_round(spec.test_fraction, len(group))
            order = rng_for(spec.seed, "split", label).permutation(len(group))
            test_ids.update(group[i].id for i in order[:n_test])
    else:
        n_test = exact_round(spec.test_fraction, len(d))
        order = rng_for(spec.seed, "split").permutation(len(d))
        test_ids.update(d.documents[i].id for i in order[:n_test])

    train_ids = {doc.id for doc in d.documents} - test_ids
    return (
        _subset(d, train_ids, f"{d.name}:train"),
        _subset(d, test_ids, f"{d.name}:test"),
    )


def build_synthetic(
    sources: Sequence[tuple[str, Dataset]], name: str = "synthetic"
) -> Dataset:
    """Union of source corpora relabeled by source name, ids prefixed to stay unique."""
    if len(sources) < 2:
        raise ValueError("build_synthetic needs at least 2 sources; one label is untrainable")
    names = [source_name for source_name, _ in sources]
    if len(set(names)) != len(names):
        raise ValueError(f"source names must be distinct, got {names}")
    documents = [
        Document(
            id=f"{source_name}/{doc.id}",
            text=doc.text,
            label=source_name,
            provenance=doc.provenance,
        )
        for source_name, source in sources
        for doc in source.documents
    ]
    return Dataset(tuple(documents), name=name)


def subsample(d: Dataset, n: int, seed: int) -> Dataset:
    """Stratified sample of exactly n documents, label proportions kept to rounding.

    Quotas use the largest-remainder method so they always sum to n.
    """
    if n <= 0:
        raise ValueError("sample size must be positive")
    if n > len(d):
        raise ValueError(f"cannot sample {n} documents from {len(d)}")
    if n == len(d):
        return d

    total = len(d)
    quotas: dict[str, int] = {}
    remainders: list[tuple[Fraction, int, str]] = []
    for rank, label in enumerate(d.label_set):
        ideal = Fraction(n * len(d.by_label[label]), total)
        quotas[label] = int(ideal)
        remainders.append((ideal - int(ideal), rank, label))
    short = n - sum(quotas.values())
    remainders.sort(key=lambda item: (-item[0], item[1]))
    for _, _, label in remainders[:short]:
        quotas[label] += 1

    keep: set[str] = set()
    for label in d.label_set:
        group = d.by_label[label]
        order = rng_for(seed, "subsample", label).permutation(len(group))
        keep.update(group[i].id for i in order[: quotas[label]])
    return _subset(d, keep, f"{d.name}:sub{n}")


def ingest_newsgroups(root: str | Path, name: str | None = None) -> Dataset:
    """Adapter for the classic newsgroups directory layout: one folder per
    group, one message file per document. Folder and file names are sorted so
    loads are order-stable."""
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"{root}: not a directory")
    documents: list[Document] = []
    groups = sorted(p for p in root.iterdir() if p.is_dir())
    if not groups:
        raise ValueError(f"{root}: no group directories found")
    for group in groups:
        for entry in sorted(p for p in group.iterdir() if p.is_file()):
            text = entry.read_bytes().decode("utf-8", errors="replace")
            if text == "":
                raise ValueError(f"{entry}: empty document file")
            documents.append(
                Document(id=f"{group.name}/{entry.name}", text=text, label=group.name)
            )
    if not documents:
        raise ValueError(f"{root}: no documents found")
    return Dataset(tuple(documents), name=name or root.name)


def summarize(d: Dataset) -> dict:
    """Doc count, label histogram and median token length, for audit output."""
    if not d.documents:
        raise ValueError("cannot summarize an empty dataset")
    token_counts = [len(tokenize(doc.text)) for doc in d.documents]
    return {
        "name": d.name,
        "documents": len(d),
        "labels": len(d.label_set),
        "label_histogram": {label: len(d.by_label[label]) for label in d.label_set},
        "median_tokens": statistics.median(token_counts),
    }
