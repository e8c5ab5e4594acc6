"""Dirty-data cross-validation, clean-test sweeps, and divergence metrics.

The sweep reproduces the two-curve protocol: at each noise level the training
set is injected, a vocabulary is rebuilt from the noised text, k-fold
cross-validation inside the dirty set gives one curve, and a model trained on
the full dirty set scored on the untouched test set gives the other. Derived
metrics compare the curves at reference levels 0.25 and 0.5.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import models
from .corpus import Dataset, content_hash
from .noise import MECHANISM_ORDER, NoisePlan, apply_noise
from .seeding import derive_seed, rng_for
from .text import build_vocabulary

from . import __about__


class SweepError(RuntimeError):
    """A noise level failed; the message names it."""


@dataclass(frozen=True)
class FoldAssignment:
    """Stratified, seeded mapping of document ids to folds 0..k-1."""

    k: int
    fold_of: dict[str, int]
    seed: int


def kfold(d: Dataset, k: int, seed: int) -> FoldAssignment:
    """Assign every document to one of k folds.

    Per-label fold counts differ by at most one, and so do overall fold sizes
    (the round-robin deal keeps rotating across labels).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > len(d):
        raise ValueError(f"cannot make {k} folds from {len(d)} documents")
    fold_of: dict[str, int] = {}
    offset = 0
    for label in d.label_set:
        group = d.by_label[label]
        order = rng_for(seed, "kfold", label).permutation(len(group))
        for i, pos in enumerate(order):
            fold_of[group[pos].id] = (offset + i) % k
        offset += len(group)
    return FoldAssignment(k=k, fold_of=fold_of, seed=seed)


def _fold_datasets(d: Dataset, folds: FoldAssignment, i: int) -> tuple[Dataset, Dataset]:
    held = [doc for doc in d.documents if folds.fold_of[doc.id] == i]
    rest = [doc for doc in d.documents if folds.fold_of[doc.id] != i]

    def used_labels(docs):
        present = {doc.label for doc in docs}
        return tuple(label for label in d.label_set if label in present)

    return (
        Dataset(tuple(rest), label_set=used_labels(rest), name=f"{d.name}:cv{i}-train"),
        Dataset(tuple(held), label_set=used_labels(held), name=f"{d.name}:cv{i}-held"),
    )


def cross_validate(
    d: Dataset,
    spec: models.ClassifierSpec,
    folds: FoldAssignment,
    vocabulary=None,
) -> tuple[float, list[float]]:
    """Mean and per-fold accuracy of k-fold cross-validation within `d`.

    Each fold's model trains on the remainder; with no shared vocabulary,
    one is rebuilt per fold from that remainder. Held-out documents whose
    label is absent from the remainder simply count as errors.
    """
    accuracies = []
    for i in range(folds.k):
        rest, held = _fold_datasets(d, folds, i)
        model = models.train(rest, spec, vocabulary=vocabulary)
        accuracies.append(models.evaluate(model, held))
    return sum(accuracies) / folds.k, accuracies


def _curve_value(curve: Mapping[float, float], level: float) -> float:
    for key, value in curve.items():
        if float(key) == float(level):
            return value
    raise ValueError(f"curve has no point at noise level {level}")


def secant_slope(curve: Mapping[float, float], at: float) -> float:
    """Two-point slope of the curve between level 0 and `at`."""
    if float(at) == 0.0:
        raise ValueError("slope reference level must be positive")
    return (_curve_value(curve, at) - _curve_value(curve, 0.0)) / float(at)


def regression_slope(curve: Mapping[float, float], at: float) -> float | None:
    """Least-squares slope over all grid points in [0, at]; None below 3 points."""
    points = sorted((float(l), a) for l, a in curve.items() if 0.0 <= float(l) <= float(at))
    if len(points) < 3:
        return None
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    xc = xs - xs.mean()
    return float((xc @ (ys - ys.mean())) / (xc @ xc))


def relative_gain(clean: float, dirty: float) -> float:
    """Percentage by which the clean accuracy exceeds the dirty one."""
    if dirty <= 0:
        raise ValueError("relative gain is undefined for a non-positive dirty accuracy")
    return 100.0 * (clean - dirty) / dirty


@dataclass
class LevelResult:
    level: float
    dirty_cv_mean: float
    dirty_cv_folds: list[float]
    dirty_cv_std: float
    clean_test: float


@dataclass
class SweepReport:
    """Everything one noise sweep produced, ready for JSON/CSV export."""

    dataset: str
    classifier: dict
    grid: list[float]
    levels: list[LevelResult]
    derived: dict
    metadata: dict

    def clean_curve(self) -> dict[float, float]:
        return {r.level: r.clean_test for r in self.levels}

    def dirty_curve(self) -> dict[float, float]:
        return {r.level: r.dirty_cv_mean for r in self.levels}

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "classifier": self.classifier,
            "grid": self.grid,
            "levels": [dataclasses.asdict(r) for r in self.levels],
            "derived": self.derived,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def curves_csv(self) -> str:
        lines = ["level,dirty_cv_mean,dirty_cv_std,clean_test"]
        for r in self.levels:
            lines.append(f"{r.level!r},{r.dirty_cv_mean!r},{r.dirty_cv_std!r},{r.clean_test!r}")
        return "\n".join(lines) + "\n"


def _derived_metrics(clean: Mapping[float, float], dirty: Mapping[float, float]) -> dict:
    out: dict[str, dict] = {"slope_secant": {}, "slope_fit": {}, "gain_percent": {}}
    for at in (0.25, 0.5):
        key = str(at)
        if any(float(l) == at for l in clean):
            out["slope_secant"][key] = secant_slope(clean, at)
            out["slope_fit"][key] = regression_slope(clean, at)
            dirty_at = _curve_value(dirty, at)
            out["gain_percent"][key] = (
                relative_gain(_curve_value(clean, at), dirty_at) if dirty_at > 0 else None
            )
    return out


def sweep(
    train: Dataset,
    test: Dataset,
    spec: models.ClassifierSpec,
    grid: Sequence[float],
    plan: NoisePlan,
    k: int = 5,
    *,
    min_count: int = 6,
    max_df_ratio: float = 0.5,
    vocab_dump_dir: str | Path | None = None,
) -> SweepReport:
    """Run the full two-curve protocol over the noise grid.

    The clean test set is never noised; its content hash is checked after the
    run. A failure at any level aborts the sweep, naming the level.
    """
    grid = [float(p) for p in grid]
    if not grid or grid[0] != 0.0:
        raise ValueError("the noise grid must start at 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("the noise grid must be strictly increasing")
    if grid[-1] > 1.0:
        raise ValueError("noise levels cannot exceed 1")
    if set(test.label_set) != set(train.label_set):
        raise ValueError("train and test must share a label set")

    test_digest = content_hash(test)
    level_results: list[LevelResult] = []
    level_seeds: dict[str, dict[str, int]] = {}

    for p in grid:
        try:
            noise_seed = derive_seed(plan.seed, "level", p)
            fold_seed = derive_seed(plan.seed, "folds", p)
            level_seeds[str(p)] = {"noise": noise_seed, "folds": fold_seed}
            plan_p = dataclasses.replace(plan, level=p, seed=noise_seed)
            noised = apply_noise(train, plan_p)

            seqs = models._feature_seqs([doc.text for doc in noised.documents], spec.bigrams)
            vocab = build_vocabulary(seqs, min_count=min_count, max_df_ratio=max_df_ratio)
            if vocab_dump_dir is not None:
                dump_dir = Path(vocab_dump_dir)
                dump_dir.mkdir(parents=True, exist_ok=True)
                vocab.save(dump_dir / f"vocabulary_level_{p!r}.txt")

            folds = kfold(noised, k, fold_seed)
            dirty_mean, dirty_folds = cross_validate(noised, spec, folds, vocabulary=vocab)
            model = models.train(noised, spec, vocabulary=vocab)
            clean = models.evaluate(model, test)
        except Exception as err:
            raise SweepError(f"noise level {p!r} failed: {err}") from err

        level_results.append(
            LevelResult(
                level=p,
                dirty_cv_mean=dirty_mean,
                dirty_cv_folds=dirty_folds,
                dirty_cv_std=float(np.std(dirty_folds)),
                clean_test=clean,
            )
        )

    if content_hash(test) != test_digest:
        raise SweepError("clean test set changed during the sweep")

    clean_curve = {r.level: r.clean_test for r in level_results}
    dirty_curve = {r.level: r.dirty_cv_mean for r in level_results}
    report = SweepReport(
        dataset=train.name,
        classifier=dataclasses.asdict(spec),
        grid=grid,
        levels=level_results,
        derived=_derived_metrics(clean_curve, dirty_curve),
        metadata={
            "tool_version": __about__.__version__,
            "backend": models.backend.backend_name(),
            "mechanism_order": list(MECHANISM_ORDER),
            "folds": k,
            "vocabulary": {"min_count": min_count, "max_df_ratio": max_df_ratio},
            "noise_plan": {
                "seed": plan.seed,
                "enable_truncate": plan.enable_truncate,
                "enable_intersperse": plan.enable_intersperse,
                "enable_flip": plan.enable_flip,
                "enable_replicate": plan.enable_replicate,
                "truncate_keep": plan.truncate_keep,
                "distractor": plan.distractor.name if plan.distractor is not None else None,
            },
            "level_seeds": level_seeds,
            "train_documents": len(train),
            "test_documents": len(test),
            "test_content_sha256": test_digest,
        },
    )
    return report
