"""Backpropagation MLP mapping a window of k GFVs to the next GFV."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, NonFiniteLoss, SequenceTooShort


@dataclass(frozen=True)
class LayerSpec:
    """Layer widths ``[n_in, h1, ..., n_out]``; tanh hidden, identity output."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise ValueError(f"invalid layer sizes {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def default(cls, window: int, rank: int, hidden=None) -> "LayerSpec":
        n_in = window * rank
        if hidden is None:
            hidden = [max(16, (2 * n_in) // 3)]
        return cls((n_in, *hidden, rank))

    @property
    def n_in(self) -> int:
        return self.sizes[0]

    @property
    def n_out(self) -> int:
        return self.sizes[-1]


@dataclass
class MlpModel:
    spec: LayerSpec
    weights: list[np.ndarray]  # (fan_out, fan_in)
    biases: list[np.ndarray]
    seed: int = 0

    def params(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def copy(self) -> "MlpModel":
        return MlpModel(self.spec, [w.copy() for w in self.weights],
                        [b.copy() for b in self.biases], self.seed)


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def scaled(self, c: float) -> "Gradients":
        return Gradients([c * w for w in self.weights], [c * b for b in self.biases])


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 5000
    window: int = 3
    seed: int = 42
    mode: str = "corpus"

    def __post_init__(self):
        if not 0 <= self.learning_rate <= 1:
            raise ValueError(f"learning_rate {self.learning_rate} outside (0, 1]")
        if self.epochs < 1 or self.window < 1:
            raise ValueError("epochs and window must be positive")
        if self.mode not in ("corpus", "subject"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class TrainReport:
    initial_loss: float
    final_loss: float
    epochs_run: int
    loss_curve: list[float] = field(default_factory=list)


def build_training_pairs(gfvs, k: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Slide a length-k window over age-ordered GFVs; each window predicts the next one."""
    gfvs = [np.asarray(g, dtype=np.float64) for g in gfvs]
    if len(gfvs) < k + 1:
        raise SequenceTooShort(f"need at least {k + 1} images, got {len(gfvs)}")
    return [(np.concatenate(gfvs[i:i + k]), gfvs[i + k]) for i in range(len(gfvs) - k)]


def mlp_init(spec: LayerSpec, seed: int) -> MlpModel:
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.sizes[:-1], spec.sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(spec, weights, biases, seed)


def _check_input(model: MlpModel, x: np.ndarray) -> None:
    if x.shape[-1] != model.spec.n_in:
        raise LengthMismatch(f"input length {x.shape[-1]} != {model.spec.n_in}")


def mlp_forward(model: MlpModel, x) -> tuple[np.ndarray, list[np.ndarray]]:
    """Forward pass. Works on one vector or a batch of rows.

    Returns the output and the activations of every layer (input first).
    """
    a = np.asarray(x, dtype=np.float64)
    _check_input(model, a)
    acts = [a]
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w.T + b
        a = z if i == last else np.tanh(z)
        acts.append(a)
    return a, acts


def _backward(model: MlpModel, acts: list[np.ndarray], delta: np.ndarray) -> Gradients:
    # delta: dLoss/dOutput, rows are samples (2-D)
    gw, gb = [], []
    for i in range(len(model.weights) - 1, -1, -1):
        gw.append(delta.T @ acts[i])
        gb.append(delta.sum(axis=0))
        if i > 0:
            delta = (delta @ model.weights[i]) * (1.0 - acts[i] ** 2)
    return Gradients(gw[::-1], gb[::-1])


def mlp_backprop(model: MlpModel, x, target) -> tuple[Gradients, float]:
    """Gradients of 0.5 * ||out - target||^2 for a single sample."""
    x = np.asarray(x, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if target.shape[-1] != model.spec.n_out:
        raise LengthMismatch(f"target length {target.shape[-1]} != {model.spec.n_out}")
    out, acts = mlp_forward(model, x[None, :])
    err = out - target[None, :]
    return _backward(model, acts, err), 0.5 * float(np.sum(err * err))


def _batch(pairs):
    xs = np.stack([np.asarray(p[0], dtype=np.float64) for p in pairs])
    ys = np.stack([np.asarray(p[1], dtype=np.float64) for p in pairs])
    return xs, ys


def batch_loss(model: MlpModel, pairs) -> float:
    xs, ys = _batch(pairs)
    out, _ = mlp_forward(model, xs)
    return 0.5 * float(np.sum((out - ys) ** 2)) / len(xs)


def mlp_train(model: MlpModel, pairs, cfg: TrainConfig) -> tuple[MlpModel, TrainReport]:
    """Full-batch gradient descent on the mean per-pair loss.

    The input model is not modified.
    """
    if not pairs:
        raise ValueError("no training pairs")
    xs, ys = _batch(pairs)
    _check_input(model, xs)
    model = model.copy()
    n = len(xs)
    curve = []
    for epoch in range(cfg.epochs):
        out, acts = mlp_forward(model, xs)
        err = out - ys
        with np.errstate(over="ignore", invalid="ignore"):
            loss = 0.5 * float(np.sum(err * err)) / n
        if not np.isfinite(loss):
            report = TrainReport(curve[0] if curve else loss, loss, epoch, curve)
            raise NonFiniteLoss(f"loss became non-finite at epoch {epoch}", report)
        curve.append(loss)
        grads = _backward(model, acts, err / n)
        for w, g in zip(model.weights, grads.weights):
            w -= cfg.learning_rate * g
        for b, g in zip(model.biases, grads.biases):
            b -= cfg.learning_rate * g
    final = batch_loss(model, pairs)
    if not np.isfinite(final):
        raise NonFiniteLoss("loss became non-finite after the last update",
                            TrainReport(curve[0], final, cfg.epochs, curve))
    return model, TrainReport(curve[0], final, cfg.epochs, curve)


def predict_next(model: MlpModel, window) -> np.ndarray:
    """Predict the GFV that follows ``window`` (k GFVs, oldest first)."""
    parts = [np.asarray(g, dtype=np.float64).ravel() for g in window]
    x = np.concatenate(parts) if parts else np.zeros(0)
    if x.size != model.spec.n_in:
        raise LengthMismatch(f"window gives {x.size} inputs, model expects {model.spec.n_in}")
    out, _ = mlp_forward(model, x)
    return out
