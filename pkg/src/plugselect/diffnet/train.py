"""Mini-batch softmax cross-entropy training for the decoder.

Everything is deterministic under ``TrainSpec.seed``: the shuffle order
comes from one seeded generator and gradient accumulation is sequential
in a fixed parameter order, so two runs with equal inputs produce
bit-identical parameters.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eegdata.dataset import Window
from ..errors import ConfigError, NumericError
from .model import _PARAM_FIELDS, Model

_OPTIMIZERS = ("adam", "sgd_momentum")


@dataclass(frozen=True)
class TrainSpec:
    epochs: int = 30
    batch_size: int = 16
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate < 0:
            raise ConfigError(
                f"learning_rate must be >= 0, got {self.learning_rate}"
            )
        if self.optimizer not in _OPTIMIZERS:
            raise ConfigError(
                f"optimizer must be one of {_OPTIMIZERS}, got {self.optimizer!r}"
            )


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def train(
    model: Model, train_windows: list[Window], spec: TrainSpec
) -> tuple[Model, list[float]]:
    """Train a copy of ``model``; returns it plus per-epoch mean loss."""
    if not train_windows:
        raise ConfigError("cannot train on zero windows")
    cfg = model.config
    x = np.stack([w.data for w in train_windows]).astype(np.float64)
    y = np.array([w.label for w in train_windows], dtype=np.int64)
    if x.shape[1:] != (cfg.n_channels, cfg.n_samples):
        raise ConfigError(
            f"windows of shape {x.shape[1:]} do not match model input "
            f"({cfg.n_channels}, {cfg.n_samples})"
        )
    if np.any(y < 0) or np.any(y >= cfg.n_classes):
        raise ConfigError(f"labels out of range [0, {cfg.n_classes})")

    params = {name: getattr(model, name).copy() for name in _PARAM_FIELDS}
    current = model.with_params_flat(
        np.concatenate([params[n].ravel() for n in _PARAM_FIELDS])
    )
    if spec.optimizer == "adam":
        m_state = {n: np.zeros_like(params[n]) for n in _PARAM_FIELDS}
        v_state = {n: np.zeros_like(params[n]) for n in _PARAM_FIELDS}
        t_step = 0
    else:
        velocity = {n: np.zeros_like(params[n]) for n in _PARAM_FIELDS}

    rng = np.random.default_rng(spec.seed)
    n = x.shape[0]
    history: list[float] = []
    for epoch in range(spec.epochs):
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, spec.batch_size):
            idx = order[start : start + spec.batch_size]
            xb, yb = x[idx], y[idx]
            cache = current._forward_cached(xb)
            probs = _softmax(cache["logits"])
            picked = probs[np.arange(len(idx)), yb]
            batch_loss = float(-np.sum(np.log(np.maximum(picked, 1e-300))))
            if not np.isfinite(batch_loss):
                raise NumericError(
                    f"training diverged at epoch {epoch}: non-finite batch loss"
                )
            loss_sum += batch_loss
            dlogits = probs
            dlogits[np.arange(len(idx)), yb] -= 1.0
            dlogits /= len(idx)
            grads = current._backward_params(cache, dlogits)
            if spec.optimizer == "adam":
                t_step += 1
                for name in _PARAM_FIELDS:
                    g = grads[name]
                    m_state[name] = spec.beta1 * m_state[name] + (1 - spec.beta1) * g
                    v_state[name] = spec.beta2 * v_state[name] + (1 - spec.beta2) * g * g
                    m_hat = m_state[name] / (1 - spec.beta1**t_step)
                    v_hat = v_state[name] / (1 - spec.beta2**t_step)
                    params[name] = params[name] - spec.learning_rate * m_hat / (
                        np.sqrt(v_hat) + spec.eps
                    )
            else:
                for name in _PARAM_FIELDS:
                    velocity[name] = (
                        spec.momentum * velocity[name]
                        - spec.learning_rate * grads[name]
                    )
                    params[name] = params[name] + velocity[name]
            try:
                current = current.with_params_flat(
                    np.concatenate([params[f].ravel() for f in _PARAM_FIELDS])
                )
            except ConfigError as exc:
                raise NumericError(
                    f"training diverged at epoch {epoch}: {exc}"
                ) from exc
        epoch_loss = loss_sum / n
        if not np.isfinite(epoch_loss):
            raise NumericError(
                f"training diverged at epoch {epoch}: mean loss {epoch_loss}"
            )
        history.append(epoch_loss)
    return current, history


def training_accuracy(model: Model, windows: list[Window]) -> float:
    """Fraction of windows whose argmax logit matches the label."""
    if not windows:
        raise ConfigError("no windows to score")
    x = np.stack([w.data for w in windows])
    y = np.array([w.label for w in windows])
    pred = np.argmax(model.forward_batch(x), axis=1)
    return float(np.mean(pred == y))
