"""Pipeline configuration and its JSON file form."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

from .errors import ConfigError
from .predictor import TrainConfig
from .spectral import StftConfig


@dataclass(frozen=True)
class PipelineConfig:
    image_size: int = 64
    block: int = 16
    hop: int = 8
    rank: int = 20
    scope: str = "corpus"            # where the PCA basis is fitted: corpus | subject
    mode: str | None = None          # where the MLP is trained; None follows scope
    window: int = 3
    hidden: tuple[int, ...] | None = None   # None: one layer of max(16, 2*n_in/3)
    learning_rate: float = 0.01
    epochs: int = 5000
    seed: int = 42
    refine_on_target: bool = False

    def __post_init__(self):
        if self.hidden is not None:
            object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.scope not in ("corpus", "subject"):
            raise ConfigError(f"scope must be corpus or subject, got {self.scope!r}")
        if self.train_mode not in ("corpus", "subject"):
            raise ConfigError(f"mode must be corpus or subject, got {self.mode!r}")
        if self.scope == "subject" and self.train_mode == "corpus":
            raise ConfigError("a pooled model needs a shared basis (scope=corpus)")
        if self.rank < 1 or self.window < 1 or self.epochs < 1:
            raise ConfigError("rank, window and epochs must be >= 1")
        if self.image_size < self.block:
            raise ConfigError(f"image_size {self.image_size} smaller than block {self.block}")
        try:
            self.stft
            self.train
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def train_mode(self) -> str:
        return self.mode or self.scope

    @property
    def stft(self) -> StftConfig:
        return StftConfig(self.block, self.hop)

    @property
    def train(self) -> TrainConfig:
        return TrainConfig(self.learning_rate, self.epochs, self.window, self.seed, self.train_mode)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden) if self.hidden is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    def updated(self, **overrides) -> "PipelineConfig":
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return PipelineConfig.from_dict(d)


def load_config(path: str | os.PathLike | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return PipelineConfig.from_dict(doc)


def save_config(cfg: PipelineConfig, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
