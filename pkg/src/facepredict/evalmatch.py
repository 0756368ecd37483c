"""Match scoring and the leave-last-out evaluation protocol.

Per subject with m images and window k:

* m >= k + 2: the last image is held out of basis fitting and training,
  predicted from the k images before it, and scored.
* m == k + 1: too short to both train on and hold out. All k + 1 images feed
  training (one pair) and the next, unobserved face is forecast. It is written
  out but not scored.
* m < k + 1: skipped.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .dataset import Corpus, write_pgm
from .errors import DimensionMismatch, NoEligibleSubjects, SequenceTooShort
from .imageproc import denormalize
from .pipeline import FittedPipeline, PreparedSubject, fit_pipeline, predict_tensor, prepare_corpus

REPORT_FORMAT = "FPM1-report"
PREDICTED_DIR = "predicted"


@dataclass(frozen=True)
class MatchScore:
    percent: float
    correlation: float
    rmse: float


def match_score(predicted, actual) -> MatchScore:
    """Pearson-correlation match percent, clamped at 0, plus pixel RMSE."""
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise DimensionMismatch(f"shapes differ: {p.shape} vs {a.shape}")
    pc = p.ravel() - p.mean()
    ac = a.ravel() - a.mean()
    denom = np.sqrt(np.dot(pc, pc)) * np.sqrt(np.dot(ac, ac))
    corr = float(np.dot(pc, ac) / denom) if denom > 0 else 0.0
    corr = min(1.0, max(-1.0, corr))
    rmse = float(np.sqrt(np.mean((p - a) ** 2)))
    return MatchScore(100.0 * max(0.0, corr), corr, rmse)


@dataclass
class SubjectReport:
    subject_id: str
    score: MatchScore
    predicted_path: str | None = None
    actual_path: str | None = None
    predicted: np.ndarray | None = field(default=None, repr=False)


@dataclass
class EvalReport:
    subjects: list[SubjectReport]
    config: PipelineConfig
    forecasts: dict[str, str | None] = field(default_factory=dict)
    skipped: dict[str, str] = field(default_factory=dict)
    training_pairs: dict[str, int] = field(default_factory=dict)
    training: dict[str, dict] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed

    def _percents(self):
        return [s.score.percent for s in self.subjects]

    @property
    def mean_percent(self):
        p = self._percents()
        return float(np.mean(p)) if p else None

    @property
    def min_percent(self):
        return min(self._percents(), default=None)

    @property
    def max_percent(self):
        return max(self._percents(), default=None)

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "mean_percent": self.mean_percent,
            "min_percent": self.min_percent,
            "max_percent": self.max_percent,
            "subjects": [
                {
                    "subject": s.subject_id,
                    "percent": s.score.percent,
                    "correlation": s.score.correlation,
                    "rmse": s.score.rmse,
                    "predicted_path": s.predicted_path,
                    "actual_path": s.actual_path,
                }
                for s in self.subjects
            ],
            "forecasts": [{"subject": k, "predicted_path": v} for k, v in sorted(self.forecasts.items())],
            "skipped": [{"subject": k, "reason": v} for k, v in sorted(self.skipped.items())],
            "training_pairs": dict(sorted(self.training_pairs.items())),
            "training": self.training,
        }

    def to_text(self) -> str:
        lines = ["face prediction evaluation", f"seed {self.seed}"]
        lines += [f"  {k} = {v}" for k, v in self.config.to_dict().items()]
        lines.append(f"{'subject':>10} {'percent':>8} {'corr':>8} {'rmse':>8}")
        for s in self.subjects:
            lines.append(f"{s.subject_id:>10} {s.score.percent:8.2f} {s.score.correlation:8.4f} {s.score.rmse:8.4f}")
        if self.subjects:
            lines.append(f"scored {len(self.subjects)}: mean {self.mean_percent:.2f}  "
                         f"min {self.min_percent:.2f}  max {self.max_percent:.2f}")
        else:
            lines.append("scored 0 subjects")
        for sid, path in sorted(self.forecasts.items()):
            lines.append(f"forecast {sid}: {path or '(not written)'}")
        for sid, why in sorted(self.skipped.items()):
            lines.append(f"skipped {sid}: {why}")
        return "\n".join(lines) + "\n"

    def write(self, path: str | os.PathLike) -> tuple[Path, Path]:
        """Write ``<path>`` (JSON) and ``<path>.txt``."""
        path = Path(path)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)
            fh.write("\n")
        text = path.with_name(path.name + ".txt")
        text.write_text(self.to_text(), encoding="utf-8")
        return path, text


def evaluate_subject(subject: PreparedSubject, fp: FittedPipeline) -> SubjectReport:
    """Predict the subject's last image from the k before it and score it."""
    k = fp.config.window
    if len(subject) < k + 1:
        raise SequenceTooShort(f"subject {subject.subject_id}: {len(subject)} images, need {k + 1}")
    window = subject.images[-k - 1:-1]
    target = subject.images[-1]
    pred = predict_tensor(fp, [im.vector for im in window], subject.subject_id)
    score = match_score(pred, target.tensor)
    return SubjectReport(subject.subject_id, score, actual_path=target.key, predicted=pred)


def _write_prediction(out_dir, sid, tensor, params) -> str | None:
    if out_dir is None:
        return None
    rel = Path(PREDICTED_DIR) / f"{sid}.pgm"
    dest = Path(out_dir) / rel
    dest.parent.mkdir(parents=True, exist_ok=True)
    write_pgm(dest, denormalize(tensor, params))
    return rel.as_posix()


def evaluate_prepared(subjects: list[PreparedSubject], cfg: PipelineConfig,
                      out_dir: str | os.PathLike | None = None) -> EvalReport:
    k = cfg.window
    subjects = sorted(subjects, key=lambda s: s.subject_id)
    scored = [s for s in subjects if len(s) >= k + 2]
    forecast = [s for s in subjects if len(s) == k + 1]
    skipped = {s.subject_id: f"{len(s)} image(s), need at least {k + 1}"
               for s in subjects if len(s) < k + 1}
    if not scored and not forecast:
        raise NoEligibleSubjects(f"no subject has the {k + 1} images the protocol needs")

    lengths = {s.subject_id: len(s) - 1 for s in scored}
    fp = fit_pipeline(subjects, cfg, lengths)
    if cfg.refine_on_target:
        # literal feedback reading: held-out targets join the training pairs
        fp = fit_pipeline(subjects, cfg, lengths, extra_pairs={s.subject_id: len(s) for s in scored})

    reports = []
    for s in scored:
        if not fp.has_model(s.subject_id):
            skipped[s.subject_id] = "no trained model"
            continue
        rep = evaluate_subject(s, fp)
        rep.predicted_path = _write_prediction(out_dir, s.subject_id, rep.predicted, s.images[-2].params)
        reports.append(rep)

    forecasts = {}
    for s in forecast:
        if not fp.has_model(s.subject_id):
            skipped[s.subject_id] = "no trained model"
            continue
        pred = predict_tensor(fp, [im.vector for im in s.images[-k:]], s.subject_id)
        forecasts[s.subject_id] = _write_prediction(out_dir, s.subject_id, pred, s.images[-1].params)

    if not reports and not forecasts:
        raise NoEligibleSubjects("no subject could be evaluated")
    training = {
        key: {"initial_loss": r.initial_loss, "final_loss": r.final_loss, "epochs": r.epochs_run}
        for key, r in sorted(fp.reports.items())
    }
    return EvalReport(reports, cfg, forecasts, skipped, dict(fp.pair_counts), training)


def evaluate_corpus(corpus: Corpus, cfg: PipelineConfig = PipelineConfig(),
                    out_dir: str | os.PathLike | None = None) -> EvalReport:
    """Fit, train and score a whole corpus. Predicted faces go under ``out_dir/predicted``."""
    if not corpus.sequences:
        raise NoEligibleSubjects("empty corpus")
    return evaluate_prepared(prepare_corpus(corpus, cfg), cfg, out_dir)
