"""End-to-end chain: normalize -> STFT -> PCA (GFV) -> MLP -> back to an image.

GFVs are divided by a single per-basis scale (their RMS over the training
images) before they reach the MLP, keeping tanh units out of saturation; the
scale is undone on the prediction.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .dataset import Corpus, RawImage, SubjectSequence, load_pgm
from .errors import LengthMismatch, SequenceTooShort
from .features import PcaBasis, fit_pca, project, reconstruct
from .imageproc import NormParams, denormalize, prepare
from .predictor import (
    LayerSpec,
    MlpModel,
    TrainReport,
    build_training_pairs,
    mlp_init,
    mlp_train,
    predict_next,
)
from .spectral import GridMeta, image_to_vector, vector_to_image

log = logging.getLogger(__name__)

SHARED = "*"


@dataclass
class PreparedImage:
    key: str               # path relative to the corpus root
    path: Path
    age: int
    tensor: np.ndarray
    params: NormParams
    vector: np.ndarray


@dataclass
class PreparedSubject:
    subject_id: str
    images: list[PreparedImage]

    def __len__(self):
        return len(self.images)


def image_key(path: Path, root: Path) -> str:
    try:
        return Path(os.path.relpath(Path(path).resolve(), Path(root).resolve())).as_posix()
    except ValueError:  # different drive
        return Path(path).as_posix()


def prepare_image(raw: RawImage, cfg: PipelineConfig):
    tensor, params = prepare(raw, cfg.image_size)
    return tensor, params, image_to_vector(tensor, cfg.stft)


def prepare_sequence(seq: SubjectSequence, root: Path, cfg: PipelineConfig) -> PreparedSubject:
    images = []
    for rec in seq.records:
        tensor, params, vec = prepare_image(load_pgm(rec.path), cfg)
        images.append(PreparedImage(image_key(rec.path, root), rec.path, rec.age_years, tensor, params, vec))
    return PreparedSubject(seq.subject_id, images)


def prepare_corpus(corpus: Corpus, cfg: PipelineConfig) -> list[PreparedSubject]:
    return [prepare_sequence(s, corpus.root, cfg) for s in corpus.sequences]


@dataclass
class FittedPipeline:
    """Everything needed to predict: bases, GFV scales, models, normalization records.

    Keys of ``bases``/``scales``/``models`` are subject ids, or ``"*"`` when shared.
    """

    config: PipelineConfig
    bases: dict[str, PcaBasis]
    scales: dict[str, float]
    models: dict[str, MlpModel]
    reports: dict[str, TrainReport] = field(default_factory=dict)
    norm_params: dict[str, NormParams] = field(default_factory=dict)
    pair_counts: dict[str, int] = field(default_factory=dict)

    @property
    def meta(self) -> GridMeta:
        return GridMeta.for_image(self.config.image_size, self.config.image_size, self.config.stft)

    def _key(self, table: dict, subject_id: str | None) -> str:
        if SHARED in table:
            return SHARED
        if subject_id in table:
            return subject_id
        if subject_id is None and len(table) == 1:
            return next(iter(table))
        raise KeyError(f"no fitted entry for subject {subject_id!r}")

    def basis_for(self, subject_id: str | None = None) -> tuple[PcaBasis, float]:
        key = self._key(self.bases, subject_id)
        return self.bases[key], self.scales[key]

    def model_for(self, subject_id: str | None = None) -> MlpModel:
        return self.models[self._key(self.models, subject_id)]

    def has_model(self, subject_id: str) -> bool:
        return SHARED in self.models or subject_id in self.models


def _gfv_scale(gfvs: np.ndarray) -> float:
    rms = float(np.sqrt(np.mean(gfvs * gfvs))) if gfvs.size else 0.0
    return rms if rms > 0 else 1.0


def _train(pairs, rank: int, cfg: PipelineConfig, label: str) -> tuple[MlpModel, TrainReport]:
    spec = LayerSpec.default(cfg.window, rank, cfg.hidden)
    model = mlp_init(spec, cfg.seed)
    model, report = mlp_train(model, pairs, cfg.train)
    log.info("trained %s on %d pairs: loss %.4g -> %.4g", label, len(pairs),
             report.initial_loss, report.final_loss)
    return model, report


def fit_pipeline(subjects: list[PreparedSubject], cfg: PipelineConfig,
                 train_lengths: dict[str, int] | None = None,
                 extra_pairs: dict[str, int] | None = None) -> FittedPipeline:
    """Fit bases and predictors.

    Args:
        subjects: prepared image sequences.
        cfg: pipeline configuration.
        train_lengths: per subject, how many leading images may be used for
            fitting. Defaults to all of them.
        extra_pairs: per subject, a sequence length whose pairs are added to
            the training set (feeds held-out targets back when refining).
    """
    train_lengths = train_lengths or {}
    extra_pairs = extra_pairs or {}
    k = cfg.window
    used = {s.subject_id: s.images[:train_lengths.get(s.subject_id, len(s))] for s in subjects}

    bases, scales = {}, {}
    if cfg.scope == "corpus":
        vecs = np.stack([im.vector for imgs in used.values() for im in imgs])
        basis = fit_pca(vecs, min(cfg.rank, len(vecs) - 1))
        bases[SHARED] = basis
        scales[SHARED] = _gfv_scale(project(basis, vecs))
    else:
        for sid, imgs in used.items():
            if len(imgs) < 2:
                log.warning("subject %s: %d image(s), no per-subject basis", sid, len(imgs))
                continue
            vecs = np.stack([im.vector for im in imgs])
            bases[sid] = fit_pca(vecs, min(cfg.rank, len(vecs) - 1))
            scales[sid] = _gfv_scale(project(bases[sid], vecs))

    def basis_key(sid):
        return SHARED if SHARED in bases else sid

    pairs_by_subject = {}
    for s in subjects:
        key = basis_key(s.subject_id)
        if key not in bases:
            continue
        n = max(len(used[s.subject_id]), extra_pairs.get(s.subject_id, 0))
        if n < k + 1:
            continue
        g = project(bases[key], np.stack([im.vector for im in s.images[:n]])) / scales[key]
        pairs_by_subject[s.subject_id] = build_training_pairs(list(g), k)

    models, reports = {}, {}
    if cfg.train_mode == "corpus":
        pooled = [p for sid in sorted(pairs_by_subject) for p in pairs_by_subject[sid]]
        if not pooled:
            raise SequenceTooShort(f"no subject has the {k + 1} images needed for a training pair")
        models[SHARED], reports[SHARED] = _train(pooled, bases[SHARED].rank, cfg, "pooled model")
    else:
        for sid in sorted(pairs_by_subject):
            models[sid], reports[sid] = _train(
                pairs_by_subject[sid], bases[basis_key(sid)].rank, cfg, f"subject {sid}")

    norm = {im.key: im.params for imgs in used.values() for im in imgs}
    counts = {sid: len(p) for sid, p in pairs_by_subject.items()}
    return FittedPipeline(cfg, bases, scales, models, reports, norm, counts)


def predict_tensor(fp: FittedPipeline, window_vectors, subject_id: str | None = None) -> np.ndarray:
    """Predicted normalized image following a window of k spectral vectors."""
    if len(window_vectors) != fp.config.window:
        raise LengthMismatch(f"expected {fp.config.window} inputs, got {len(window_vectors)}")
    basis, scale = fp.basis_for(subject_id)
    g = project(basis, np.stack(window_vectors)) / scale
    nxt = predict_next(fp.model_for(subject_id), list(g)) * scale
    return vector_to_image(reconstruct(basis, nxt), fp.meta)


def predict_images(fp: FittedPipeline, images: list[RawImage],
                   subject_id: str | None = None) -> tuple[np.ndarray, RawImage]:
    """Predict the next face after ``images`` (oldest first).

    The 8-bit output borrows the brightness/contrast of the newest input.
    """
    if len(images) != fp.config.window:
        raise LengthMismatch(f"expected {fp.config.window} input images, got {len(images)}")
    prepared = [prepare_image(im, fp.config) for im in images]
    tensor = predict_tensor(fp, [p[2] for p in prepared], subject_id)
    return tensor, denormalize(tensor, prepared[-1][1])
