"""The "FPM1" artifact file: config, bases, models and normalization records.

JSON text; floats are written with Python's shortest round-trip repr, so a
load after a save reproduces every parameter bit for bit.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .config import PipelineConfig
from .errors import FpmError
from .features import PcaBasis
from .imageproc import NormParams
from .pipeline import FittedPipeline
from .predictor import LayerSpec, MlpModel, TrainReport

FORMAT_TAG = "FPM1"


def _basis_to_dict(b: PcaBasis) -> dict:
    return {
        "mean": b.mean.tolist(),
        "components": b.components.tolist(),
        "eigenvalues": b.eigenvalues.tolist(),
    }


def _basis_from_dict(d: dict) -> PcaBasis:
    mean = np.array(d["mean"], dtype=np.float64)
    comps = np.array(d["components"], dtype=np.float64).reshape(-1, mean.size)
    return PcaBasis(mean, comps, np.array(d["eigenvalues"], dtype=np.float64))


def _model_to_dict(m: MlpModel) -> dict:
    return {
        "sizes": list(m.spec.sizes),
        "seed": m.seed,
        "weights": [w.tolist() for w in m.weights],
        "biases": [b.tolist() for b in m.biases],
    }


def _model_from_dict(d: dict) -> MlpModel:
    spec = LayerSpec(tuple(d["sizes"]))
    weights = [np.array(w, dtype=np.float64).reshape(o, i)
               for w, i, o in zip(d["weights"], spec.sizes[:-1], spec.sizes[1:])]
    biases = [np.array(b, dtype=np.float64) for b in d["biases"]]
    return MlpModel(spec, weights, biases, int(d["seed"]))


def to_dict(fp: FittedPipeline) -> dict:
    return {
        "format": FORMAT_TAG,
        "config": fp.config.to_dict(),
        "bases": {k: _basis_to_dict(b) for k, b in sorted(fp.bases.items())},
        "gfv_scales": dict(sorted(fp.scales.items())),
        "models": {k: _model_to_dict(m) for k, m in sorted(fp.models.items())},
        "training": {
            k: {"initial_loss": r.initial_loss, "final_loss": r.final_loss, "epochs": r.epochs_run}
            for k, r in sorted(fp.reports.items())
        },
        "training_pairs": dict(sorted(fp.pair_counts.items())),
        "norm_params": {k: {"mean": p.mean, "std": p.std} for k, p in sorted(fp.norm_params.items())},
    }


def from_dict(doc: dict) -> FittedPipeline:
    if doc.get("format") != FORMAT_TAG:
        raise FpmError(f"not an {FORMAT_TAG} artifact (format={doc.get('format')!r})")
    reports = {
        k: TrainReport(r["initial_loss"], r["final_loss"], r["epochs"])
        for k, r in doc.get("training", {}).items()
    }
    return FittedPipeline(
        config=PipelineConfig.from_dict(doc["config"]),
        bases={k: _basis_from_dict(b) for k, b in doc["bases"].items()},
        scales={k: float(v) for k, v in doc["gfv_scales"].items()},
        models={k: _model_from_dict(m) for k, m in doc["models"].items()},
        reports=reports,
        norm_params={k: NormParams(p["mean"], p["std"]) for k, p in doc.get("norm_params", {}).items()},
        pair_counts={k: int(v) for k, v in doc.get("training_pairs", {}).items()},
    )


def save_artifact(fp: FittedPipeline, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(fp), fh, separators=(",", ":"), allow_nan=False)
        fh.write("\n")


def load_artifact(path: str | os.PathLike) -> FittedPipeline:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh))
