"""Experiment configuration (JSON)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from ..errors import ConfigError, ParameterError
from ..learners import LEARNERS, LearnerConfig

EXPERIMENTS = ("correlation", "algo_compare", "spec_error", "empirical_pipeline")


@dataclass(frozen=True)
class FixtureConfig:
    """Parameters of the synthesized factorial dataset used when no files are given."""

    n_subjects: int = 1000
    n_treatments: int = 3
    n_outcomes: int = 3
    n_trials: int = 1
    covariate_levels: int = 3
    covariate_effect: float = 0.0
    effect_strength: float = 1.5


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    learners: tuple = ("pc", "ges", "mmhc")
    n_dags: int = 30
    n_vars: int = 14
    expected_neighbors: float = 2.0
    n_samples: int = 5000
    alpha_dirichlet: float = 1.0
    cardinality: int = 2
    beta: float = 1.0
    covariate: str = "C"
    bins: int = 3
    sample_mode: str = "single"
    friedman_alpha: float = 0.05
    learner_config: LearnerConfig = field(default_factory=LearnerConfig)
    fixture: FixtureConfig = field(default_factory=FixtureConfig)
    factorial_csv: Optional[str] = None
    factorial_roles: Optional[str] = None
    trials: int = 1
    master_seed: int = 0
    output_dir: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        unknown = [name for name in self.learners if name not in LEARNERS]
        if unknown:
            raise ConfigError(f"unknown learners {unknown}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.sample_mode not in ("single", "all_trials"):
            raise ConfigError(f"unknown sample_mode {self.sample_mode!r}")
        if (self.factorial_csv is None) != (self.factorial_roles is None):
            raise ConfigError("factorial_csv and factorial_roles must be given together")
        if self.n_dags < 0 or self.n_vars < 1 or self.n_samples < 0 or self.bins < 2:
            raise ConfigError("generator parameters out of range")
        if not 0 < self.friedman_alpha < 1:
            raise ConfigError("friedman_alpha must lie in (0, 1)")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "experiment" not in doc:
            raise ConfigError("config needs an 'experiment' key")
        try:
            if "learners" in doc:
                doc["learners"] = tuple(doc["learners"])
            if "learner_config" in doc:
                doc["learner_config"] = LearnerConfig(**doc["learner_config"])
            if "fixture" in doc:
                doc["fixture"] = FixtureConfig(**doc["fixture"])
            return cls(**doc)
        except (TypeError, ParameterError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["learners"] = list(self.learners)
        return doc
