"""A small differentiable EEG decoder with exact hand-derived gradients.

Architecture: per-channel temporal convolution -> activation ->
full-height spatial convolution (kernel spans every channel) ->
activation -> average pooling over time -> dense hidden layer ->
activation -> dense output layer producing one logit per class.

Forward and gradient passes are built from the kernels package, so the
decoder runs on either the compiled or the numpy backend unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigError

_ACTIVATIONS = ("tanh", "relu", "identity")


@dataclass(frozen=True)
class ModelConfig:
    n_channels: int
    n_samples: int
    n_temporal: int = 8
    temporal_width: int = 9
    n_spatial: int = 8
    pool_width: int = 4
    n_hidden: int = 32
    n_classes: int = 2
    activation: str = "tanh"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_channels < 1 or self.n_samples < 1:
            raise ConfigError(
                f"need positive input dims, got C={self.n_channels}, "
                f"T={self.n_samples}"
            )
        if self.temporal_width < 1 or self.temporal_width > self.n_samples:
            raise ConfigError(
                f"temporal kernel width {self.temporal_width} must lie in "
                f"[1, {self.n_samples}]"
            )
        if self.n_temporal < 1 or self.n_spatial < 1 or self.n_hidden < 1:
            raise ConfigError("layer sizes must be positive")
        if self.n_classes < 2:
            raise ConfigError(f"need >= 2 classes, got {self.n_classes}")
        if self.pool_width < 1 or self.pool_width > self.conv_len:
            raise ConfigError(
                f"pool width {self.pool_width} invalid for conv length "
                f"{self.conv_len}"
            )
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(
                f"activation must be one of {_ACTIVATIONS}, got "
                f"{self.activation!r}"
            )

    @property
    def conv_len(self) -> int:
        return self.n_samples - self.temporal_width + 1

    @property
    def pooled_len(self) -> int:
        return self.conv_len // self.pool_width

    @property
    def n_features(self) -> int:
        return self.n_spatial * self.pooled_len

    @property
    def parameter_count(self) -> int:
        return (
            self.n_temporal * self.temporal_width
            + self.n_temporal
            + self.n_spatial * self.n_temporal * self.n_channels
            + self.n_spatial
            + self.n_hidden * self.n_features
            + self.n_hidden
            + self.n_classes * self.n_hidden
            + self.n_classes
        )


def _act(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    return z


def _act_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    # derivative of the activation, written in terms of pre/post values
    if name == "tanh":
        return 1.0 - a * a
    if name == "relu":
        return (z > 0.0).astype(np.float64)
    return np.ones_like(z)


# flat parameter vector layout, in serialization order
_PARAM_FIELDS = (
    "temporal_w",
    "temporal_b",
    "spatial_w",
    "spatial_b",
    "hidden_w",
    "output_w",
    "hidden_b",
    "output_b",
)


@dataclass(frozen=True)
class Model:
    """Immutable decoder: config plus one array per parameter group."""

    config: ModelConfig
    temporal_w: np.ndarray  # (K, W)
    temporal_b: np.ndarray  # (K,)
    spatial_w: np.ndarray  # (S, K, C)
    spatial_b: np.ndarray  # (S,)
    hidden_w: np.ndarray  # (H, F)
    hidden_b: np.ndarray  # (H,)
    output_w: np.ndarray  # (n_classes, H)
    output_b: np.ndarray  # (n_classes,)

    def __post_init__(self) -> None:
        cfg = self.config
        expected = {
            "temporal_w": (cfg.n_temporal, cfg.temporal_width),
            "temporal_b": (cfg.n_temporal,),
            "spatial_w": (cfg.n_spatial, cfg.n_temporal, cfg.n_channels),
            "spatial_b": (cfg.n_spatial,),
            "hidden_w": (cfg.n_hidden, cfg.n_features),
            "hidden_b": (cfg.n_hidden,),
            "output_w": (cfg.n_classes, cfg.n_hidden),
            "output_b": (cfg.n_classes,),
        }
        for name, shape in expected.items():
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise ConfigError(
                    f"parameter {name} has shape {arr.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ConfigError(f"parameter {name} contains non-finite values")
            object.__setattr__(self, name, arr)

    # -- forward ---------------------------------------------------------

    def _check_batch(self, x: np.ndarray) -> np.ndarray:
        arr = np.ascontiguousarray(x, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[1:] != (
            self.config.n_channels,
            self.config.n_samples,
        ):
            raise ConfigError(
                f"input shape {np.shape(x)} does not match model input "
                f"({self.config.n_channels}, {self.config.n_samples})"
            )
        return arr

    def _forward_cached(self, xb: np.ndarray) -> dict[str, np.ndarray]:
        """Run the batched forward pass, keeping every intermediate."""
        cfg = self.config
        act = cfg.activation
        z1 = kernels.temporal_forward(xb, self.temporal_w, self.temporal_b)
        a1 = _act(act, z1)
        z2 = kernels.spatial_forward(a1, self.spatial_w, self.spatial_b)
        a2 = _act(act, z2)
        pooled = kernels.avgpool_forward(a2, cfg.pool_width)
        feats = pooled.reshape(xb.shape[0], cfg.n_features)
        z3 = feats @ self.hidden_w.T + self.hidden_b
        a3 = _act(act, z3)
        logits = a3 @ self.output_w.T + self.output_b
        return {
            "x": xb, "z1": z1, "a1": a1, "z2": z2, "a2": a2,
            "pooled": pooled, "feats": feats, "z3": z3, "a3": a3,
            "logits": logits,
        }

    def forward_batch(self, x: np.ndarray) -> np.ndarray:
        """Logits for a (B, C, T) batch -> (B, n_classes)."""
        return self._forward_cached(self._check_batch(x))["logits"]

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Logits for one (C, T) window -> (n_classes,)."""
        return self.forward_batch(x)[0]

    def predict(self, x: np.ndarray) -> int:
        """Class index with the largest logit; ties go to the lower index."""
        return int(np.argmax(self.forward(x)))

    # -- gradients -------------------------------------------------------

    def _backward_input(
        self, cache: dict[str, np.ndarray], dlogits: np.ndarray
    ) -> np.ndarray:
        cfg = self.config
        act = cfg.activation
        da3 = dlogits @ self.output_w
        dz3 = da3 * _act_grad(act, cache["z3"], cache["a3"])
        dfeats = dz3 @ self.hidden_w
        dpooled = dfeats.reshape(cache["pooled"].shape)
        da2 = kernels.avgpool_backward(
            dpooled, cfg.pool_width, cfg.conv_len
        )
        dz2 = da2 * _act_grad(act, cache["z2"], cache["a2"])
        da1 = kernels.spatial_backward_input(dz2, self.spatial_w)
        dz1 = da1 * _act_grad(act, cache["z1"], cache["a1"])
        return kernels.temporal_backward_input(dz1, self.temporal_w)

    def input_gradient_batch(
        self, x: np.ndarray, target: int | np.ndarray
    ) -> np.ndarray:
        """d logits[target] / d x for every batch element -> (B, C, T)."""
        xb = self._check_batch(x)
        targets = np.broadcast_to(np.asarray(target, dtype=np.int64), xb.shape[:1])
        if np.any(targets < 0) or np.any(targets >= self.config.n_classes):
            raise ConfigError(
                f"target class out of range [0, {self.config.n_classes})"
            )
        cache = self._forward_cached(xb)
        dlogits = np.zeros_like(cache["logits"])
        dlogits[np.arange(xb.shape[0]), targets] = 1.0
        return self._backward_input(cache, dlogits)

    def input_gradient(self, x: np.ndarray, target: int) -> np.ndarray:
        """d logits[target] / d x for one (C, T) window."""
        return self.input_gradient_batch(x, target)[0]

    def _backward_params(
        self, cache: dict[str, np.ndarray], dlogits: np.ndarray
    ) -> dict[str, np.ndarray]:
        """Parameter gradients for a batch, summed over batch elements."""
        cfg = self.config
        act = cfg.activation
        a3, z3 = cache["a3"], cache["z3"]
        g_output_w = dlogits.T @ a3
        g_output_b = dlogits.sum(axis=0)
        da3 = dlogits @ self.output_w
        dz3 = da3 * _act_grad(act, z3, a3)
        g_hidden_w = dz3.T @ cache["feats"]
        g_hidden_b = dz3.sum(axis=0)
        dfeats = dz3 @ self.hidden_w
        dpooled = dfeats.reshape(cache["pooled"].shape)
        da2 = kernels.avgpool_backward(dpooled, cfg.pool_width, cfg.conv_len)
        dz2 = da2 * _act_grad(act, cache["z2"], cache["a2"])
        g_spatial_w, g_spatial_b = kernels.spatial_backward_params(dz2, cache["a1"])
        da1 = kernels.spatial_backward_input(dz2, self.spatial_w)
        dz1 = da1 * _act_grad(act, cache["z1"], cache["a1"])
        g_temporal_w, g_temporal_b = kernels.temporal_backward_params(
            dz1, cache["x"], cfg.temporal_width
        )
        return {
            "temporal_w": g_temporal_w,
            "temporal_b": g_temporal_b,
            "spatial_w": g_spatial_w,
            "spatial_b": g_spatial_b,
            "hidden_w": g_hidden_w,
            "hidden_b": g_hidden_b,
            "output_w": g_output_w,
            "output_b": g_output_b,
        }

    # -- parameter vector ------------------------------------------------

    def params_flat(self) -> np.ndarray:
        """All parameters as one float64 vector in serialization order."""
        return np.concatenate(
            [getattr(self, name).ravel() for name in _PARAM_FIELDS]
        )

    def with_params_flat(self, flat: np.ndarray) -> "Model":
        """A new model with parameters taken from a flat vector."""
        flat = np.asarray(flat, dtype=np.float64).ravel()
        if flat.shape[0] != self.config.parameter_count:
            raise ConfigError(
                f"expected {self.config.parameter_count} parameters, got "
                f"{flat.shape[0]}"
            )
        parts = {}
        pos = 0
        for name in _PARAM_FIELDS:
            shape = getattr(self, name).shape
            size = int(np.prod(shape))
            parts[name] = flat[pos : pos + size].reshape(shape).copy()
            pos += size
        return Model(config=self.config, **parts)


def build_model(config: ModelConfig) -> Model:
    """Initialize a model with scaled-uniform fan-in weights, zero biases."""
    rng = np.random.default_rng(config.seed)

    def init(shape: tuple[int, ...], fan_in: int) -> np.ndarray:
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return Model(
        config=config,
        temporal_w=init(
            (config.n_temporal, config.temporal_width), config.temporal_width
        ),
        temporal_b=np.zeros(config.n_temporal),
        spatial_w=init(
            (config.n_spatial, config.n_temporal, config.n_channels),
            config.n_temporal * config.n_channels,
        ),
        spatial_b=np.zeros(config.n_spatial),
        hidden_w=init((config.n_hidden, config.n_features), config.n_features),
        hidden_b=np.zeros(config.n_hidden),
        output_w=init((config.n_classes, config.n_hidden), config.n_hidden),
        output_b=np.zeros(config.n_classes),
    )


def finite_diff_input_gradient(
    model: Model, x: np.ndarray, target: int, step: float = 1e-5
) -> np.ndarray:
    """Central-difference approximation of input_gradient, one entry at a time."""
    if step <= 0:
        raise ConfigError(f"finite-difference step must be positive, got {step}")
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        bumped = x.copy()
        bumped[idx] = x[idx] + step
        hi = model.forward(bumped)[target]
        bumped[idx] = x[idx] - step
        lo = model.forward(bumped)[target]
        grad[idx] = (hi - lo) / (2.0 * step)
    return grad
