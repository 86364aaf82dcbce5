"""Declarative run configuration: defaults, INI file, flag overrides.

A run is fully described by one ``RunConfig``.  Values come from three
layers, later layers winning: built-in defaults, an INI-style config
file, and command-line flags.  All randomness flows from the four named
seeds; ``--seed N`` is shorthand for data/model/split/subset seeds
N, N+1, N+2, N+3.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .attribution import IgConfig
from .diffnet.train import TrainSpec
from .eegdata.preprocess import FilterSpec
from .eegdata.synth import SynthSpec
from .errors import ConfigError
from .evalharness.sweep import ModelTemplate, SweepConfig

_STRATEGIES = ("averaging", "voting", "random")


@dataclass(frozen=True)
class RunConfig:
    data_path: str | None = None  # None: generate from the synth spec
    synth: SynthSpec = field(default_factory=SynthSpec)
    filter_enabled: bool = True
    filter_spec: FilterSpec = field(default_factory=lambda: FilterSpec(4.0, 40.0))
    window_seconds: float = 0.5
    overlap_fraction: float = 0.0
    test_fraction: float = 0.25
    augment_factor: int = 1
    augment_segments: int = 4
    model: ModelTemplate = field(default_factory=ModelTemplate)
    train: TrainSpec = field(default_factory=TrainSpec)
    ig: IgConfig = field(default_factory=IgConfig)
    correct_only: bool = False
    strategy: str = "averaging"
    voting_k: int | None = None
    n_random_sets: int = 5
    densities: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    data_seed: int = 0
    model_seed: int = 1
    split_seed: int = 2
    subset_seed: int = 3
    fps_warmup: int = 50
    fps_reps: int = 1000
    out_dir: str = "plugselect_out"
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.strategy not in _STRATEGIES:
            raise ConfigError(
                f"strategy must be one of {_STRATEGIES}, got {self.strategy!r}"
            )
        if not self.densities:
            raise ConfigError("densities must be non-empty")
        for d in self.densities:
            if not 0.0 < d <= 1.0:
                raise ConfigError(f"density {d} outside (0, 1]")
        if not any(abs(d - 1.0) <= 1e-12 for d in self.densities):
            raise ConfigError("densities must include 1.0 (the full-channel row)")
        if self.voting_k is not None and self.voting_k < 1:
            raise ConfigError(f"voting_k must be >= 1, got {self.voting_k}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(
                f"test_fraction must lie in (0, 1), got {self.test_fraction}"
            )

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            window_seconds=self.window_seconds,
            overlap_fraction=self.overlap_fraction,
            test_fraction=self.test_fraction,
            augment_factor=self.augment_factor,
            augment_segments=self.augment_segments,
            model=self.model,
            train=self.train,
            ig=self.ig,
            n_random_sets=self.n_random_sets,
            voting_k=self.voting_k,
            model_seed=self.model_seed,
            split_seed=self.split_seed,
            subset_seed=self.subset_seed,
            fps_warmup=self.fps_warmup,
            fps_reps=self.fps_reps,
            jobs=self.jobs,
        )

    def echo(self) -> dict:
        """JSON-ready snapshot of every result-affecting setting.

        Output location and worker count are deliberately absent: two
        runs that differ only in those produce identical artifacts, and
        the echo is embedded in them.
        """
        return {
            "data": {
                "path": self.data_path,
                "synth": {
                    "n_channels": self.synth.n_channels,
                    "n_informative": self.synth.n_informative,
                    "n_subjects": self.synth.n_subjects,
                    "trials_per_subject": self.synth.trials_per_subject,
                    "fs": self.synth.fs,
                    "trial_seconds": self.synth.trial_seconds,
                    "n_classes": self.synth.n_classes,
                    "carrier_hz_per_class": list(self.synth.carrier_hz_per_class),
                    "signal_amplitude": self.synth.signal_amplitude,
                    "noise_amplitude": self.synth.noise_amplitude,
                },
            },
            "preprocess": {
                "filter_enabled": self.filter_enabled,
                "low_hz": self.filter_spec.low_hz,
                "high_hz": self.filter_spec.high_hz,
                "order": self.filter_spec.order,
                "ripple_db": self.filter_spec.ripple_db,
                "window_seconds": self.window_seconds,
                "overlap_fraction": self.overlap_fraction,
                "test_fraction": self.test_fraction,
                "augment_factor": self.augment_factor,
                "augment_segments": self.augment_segments,
            },
            "model": {
                "n_temporal": self.model.n_temporal,
                "temporal_width": self.model.temporal_width,
                "n_spatial": self.model.n_spatial,
                "pool_width": self.model.pool_width,
                "n_hidden": self.model.n_hidden,
                "activation": self.model.activation,
            },
            "train": {
                "epochs": self.train.epochs,
                "batch_size": self.train.batch_size,
                "learning_rate": self.train.learning_rate,
                "optimizer": self.train.optimizer,
                "momentum": self.train.momentum,
                "beta1": self.train.beta1,
                "beta2": self.train.beta2,
                "eps": self.train.eps,
            },
            "ig": {
                "steps": self.ig.steps,
                "target_rule": self.ig.target_rule,
                "normalize": self.ig.normalize,
                "correct_only": self.correct_only,
            },
            "ranking": {
                "strategy": self.strategy,
                "voting_k": self.voting_k,
                "n_random_sets": self.n_random_sets,
            },
            "evaluate": {
                "densities": list(self.densities),
                "fps_warmup": self.fps_warmup,
                "fps_reps": self.fps_reps,
            },
            "seeds": {
                "data": self.data_seed,
                "model": self.model_seed,
                "split": self.split_seed,
                "subset": self.subset_seed,
            },
        }


def _parse_bool(raw: str, where: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {raw!r}")


def _parse_float_list(raw: str, where: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in raw.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if not values:
        raise ConfigError(f"{where}: empty list")
    return values


def _typed(raw: str, kind, where: str):
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


# section -> key -> (target attribute path, parser kind)
_SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "data": {
        "path": ("data_path", str),
        "n_channels": ("synth.n_channels", int),
        "n_informative": ("synth.n_informative", int),
        "n_subjects": ("synth.n_subjects", int),
        "trials_per_subject": ("synth.trials_per_subject", int),
        "fs": ("synth.fs", float),
        "trial_seconds": ("synth.trial_seconds", float),
        "n_classes": ("synth.n_classes", int),
        "carrier_hz_per_class": ("synth.carrier_hz_per_class", "float_list"),
        "signal_amplitude": ("synth.signal_amplitude", float),
        "noise_amplitude": ("synth.noise_amplitude", float),
    },
    "preprocess": {
        "filter_enabled": ("filter_enabled", "bool"),
        "low_hz": ("filter_spec.low_hz", float),
        "high_hz": ("filter_spec.high_hz", float),
        "order": ("filter_spec.order", int),
        "ripple_db": ("filter_spec.ripple_db", float),
        "window_seconds": ("window_seconds", float),
        "overlap_fraction": ("overlap_fraction", float),
        "test_fraction": ("test_fraction", float),
        "augment_factor": ("augment_factor", int),
        "augment_segments": ("augment_segments", int),
    },
    "model": {
        "n_temporal": ("model.n_temporal", int),
        "temporal_width": ("model.temporal_width", int),
        "n_spatial": ("model.n_spatial", int),
        "pool_width": ("model.pool_width", int),
        "n_hidden": ("model.n_hidden", int),
        "activation": ("model.activation", str),
    },
    "train": {
        "epochs": ("train.epochs", int),
        "batch_size": ("train.batch_size", int),
        "learning_rate": ("train.learning_rate", float),
        "optimizer": ("train.optimizer", str),
        "momentum": ("train.momentum", float),
        "beta1": ("train.beta1", float),
        "beta2": ("train.beta2", float),
        "eps": ("train.eps", float),
    },
    "ig": {
        "steps": ("ig.steps", int),
        "target_rule": ("ig.target_rule", str),
        "normalize": ("ig.normalize", "bool"),
        "correct_only": ("correct_only", "bool"),
    },
    "ranking": {
        "strategy": ("strategy", str),
        "voting_k": ("voting_k", int),
        "n_random_sets": ("n_random_sets", int),
    },
    "evaluate": {
        "densities": ("densities", "float_list"),
        "fps_warmup": ("fps_warmup", int),
        "fps_reps": ("fps_reps", int),
        "jobs": ("jobs", int),
    },
    "seeds": {
        "data": ("data_seed", int),
        "model": ("model_seed", int),
        "split": ("split_seed", int),
        "subset": ("subset_seed", int),
    },
}


def read_config_file(path: str | Path) -> dict[str, object]:
    """Parse an INI config file into {attribute path: value} overrides."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    overrides: dict[str, object] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"{path}: unknown section [{section}]; known sections: "
                f"{sorted(_SCHEMA)}"
            )
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in [{section}]; known keys: "
                    f"{sorted(_SCHEMA[section])}"
                )
            target, kind = _SCHEMA[section][key]
            where = f"{path} [{section}] {key}"
            if kind == "bool":
                overrides[target] = _parse_bool(raw, where)
            elif kind == "float_list":
                overrides[target] = _parse_float_list(raw, where)
            else:
                overrides[target] = _typed(raw, kind, where)
    return overrides


def build_run_config(overrides: dict[str, object]) -> RunConfig:
    """Apply {attribute path: value} overrides on top of the defaults."""
    base = RunConfig()
    top: dict[str, object] = {}
    nested: dict[str, dict[str, object]] = {}
    for target, value in overrides.items():
        if "." in target:
            owner, attr = target.split(".", 1)
            nested.setdefault(owner, {})[attr] = value
        else:
            top[target] = value
    rebuilt: dict[str, object] = {}
    for owner, kwargs in nested.items():
        if owner == "synth":
            if "carrier_hz_per_class" in kwargs:
                kwargs["carrier_hz_per_class"] = tuple(
                    kwargs["carrier_hz_per_class"]
                )
            rebuilt["synth"] = replace(base.synth, **kwargs)
        elif owner == "filter_spec":
            rebuilt["filter_spec"] = replace(base.filter_spec, **kwargs)
        elif owner == "model":
            rebuilt["model"] = replace(base.model, **kwargs)
        elif owner == "train":
            rebuilt["train"] = replace(base.train, **kwargs)
        elif owner == "ig":
            rebuilt["ig"] = replace(base.ig, **kwargs)
        else:  # pragma: no cover - schema and this list are kept in sync
            raise ConfigError(f"unknown config group {owner!r}")
    return replace(base, **top, **rebuilt)
