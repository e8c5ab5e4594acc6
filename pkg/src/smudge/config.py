"""Flat dotted-key run configuration for the command-line driver.

A config file is `key = value` lines (with '#' comments). A single master
`seed` derives every component seed through named streams, so one integer
reproduces an entire sweep; any component seed can still be pinned explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .seeding import derive_seed

_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}

#: Every key the config format accepts, with its documented default.
KNOWN_KEYS = {
    "seed": "0",
    "dataset.path": None,
    "dataset.format": "jsonl",
    "dataset.delimiter": ",",
    "dataset.subsample": None,
    "split.test_fraction": "0.3",
    "split.stratified": "true",
    "split.seed": None,
    "model.family": "bow_linear",
    "model.epochs": "5",
    "model.learning_rate": "0.1",
    "model.l2": "0.0001",
    "model.embedding_dim": "100",
    "model.bigrams": "false",
    "model.seed": None,
    "noise.grid": "0,0.25,0.5,0.75",
    "noise.level": None,
    "noise.seed": None,
    "noise.enable_truncate": "true",
    "noise.enable_intersperse": "true",
    "noise.enable_flip": "true",
    "noise.enable_replicate": "true",
    "noise.truncate_keep": "prefix",
    "noise.distractor_path": None,
    "noise.distractor_format": "jsonl",
    "eval.folds": "5",
    "vocab.min_count": "6",
    "vocab.max_df": "0.5",
    "out.dir": None,
}


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read `key = value` lines; later occurrences of a key win."""
    values: dict[str, str] = {}
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path.name} line {lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{path.name} line {lineno}: unknown key {key!r}")
            values[key] = value.strip()
    return values


def _as_bool(raw: str, key: str) -> bool:
    try:
        return _BOOL_WORDS[raw.lower()]
    except KeyError:
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}") from None


def _as_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _as_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


@dataclass
class RunConfig:
    """A validated, fully-resolved configuration."""

    raw: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: v for k, v in KNOWN_KEYS.items() if v is not None}
        merged.update(self.raw)
        self.values = merged

        self.master_seed = _as_int(merged["seed"], "seed")
        self.dataset_path = merged.get("dataset.path")
        self.dataset_format = merged["dataset.format"]
        self.delimiter = merged["dataset.delimiter"]
        self.subsample_n = (
            _as_int(merged["dataset.subsample"], "dataset.subsample")
            if "dataset.subsample" in merged
            else None
        )
        self.test_fraction = _as_float(merged["split.test_fraction"], "split.test_fraction")
        self.stratified = _as_bool(merged["split.stratified"], "split.stratified")
        self.split_seed = (
            _as_int(merged["split.seed"], "split.seed")
            if "split.seed" in merged
            else derive_seed(self.master_seed, "split")
        )
        self.families = [f.strip() for f in merged["model.family"].split(",") if f.strip()]
        self.epochs = _as_int(merged["model.epochs"], "model.epochs")
        self.learning_rate = _as_float(merged["model.learning_rate"], "model.learning_rate")
        self.l2 = _as_float(merged["model.l2"], "model.l2")
        self.embedding_dim = _as_int(merged["model.embedding_dim"], "model.embedding_dim")
        self.bigrams = _as_bool(merged["model.bigrams"], "model.bigrams")
        self.model_seed = (
            _as_int(merged["model.seed"], "model.seed")
            if "model.seed" in merged
            else derive_seed(self.master_seed, "model")
        )
        try:
            self.grid = [float(x) for x in merged["noise.grid"].split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"noise.grid: expected comma-separated numbers, got {merged['noise.grid']!r}")
        if not self.grid or self.grid[0] != 0.0 or any(not 0 <= p <= 1 for p in self.grid):
            raise ConfigError("noise.grid must start at 0 and stay within [0, 1]")
        self.noise_seed = (
            _as_int(merged["noise.seed"], "noise.seed")
            if "noise.seed" in merged
            else derive_seed(self.master_seed, "noise")
        )
        self.enable_truncate = _as_bool(merged["noise.enable_truncate"], "noise.enable_truncate")
        self.enable_intersperse = _as_bool(
            merged["noise.enable_intersperse"], "noise.enable_intersperse"
        )
        self.enable_flip = _as_bool(merged["noise.enable_flip"], "noise.enable_flip")
        self.enable_replicate = _as_bool(merged["noise.enable_replicate"], "noise.enable_replicate")
        self.truncate_keep = merged["noise.truncate_keep"]
        self.distractor_path = merged.get("noise.distractor_path")
        self.distractor_format = merged["noise.distractor_format"]
        self.folds = _as_int(merged["eval.folds"], "eval.folds")
        self.min_count = _as_int(merged["vocab.min_count"], "vocab.min_count")
        self.max_df = _as_float(merged["vocab.max_df"], "vocab.max_df")
        self.out_dir = merged.get("out.dir")

    def validate_for_sweep(self):
        if not self.dataset_path:
            raise ConfigError("dataset.path is required")
        if not Path(self.dataset_path).exists():
            raise ConfigError(f"dataset.path does not exist: {self.dataset_path}")
        needs_distractor = self.enable_intersperse and any(p > 0 for p in self.grid)
        if needs_distractor:
            if not self.distractor_path:
                raise ConfigError(
                    "noise.distractor_path is required when interspersal is enabled "
                    "and the grid has positive levels"
                )
            if not Path(self.distractor_path).exists():
                raise ConfigError(f"noise.distractor_path does not exist: {self.distractor_path}")
        for family in self.families:
            if family not in ("bow_linear", "bag_embedding"):
                raise ConfigError(f"model.family: unknown family {family!r}")
        if not self.families:
            raise ConfigError("model.family must name at least one family")
        if not self.out_dir:
            raise ConfigError("out.dir is required (or pass --out)")

    def echo(self) -> dict[str, str]:
        """The resolved key/value view written into report metadata."""
        return dict(sorted(self.values.items()))
