"""Differentiable decoder family: model, trainer, checkpoints."""
from .checkpoint import load_checkpoint, load_training_meta, save_checkpoint
from .model import Model, ModelConfig, build_model, finite_diff_input_gradient
from .train import TrainSpec, train, training_accuracy

__all__ = [
    "Model",
    "ModelConfig",
    "TrainSpec",
    "build_model",
    "finite_diff_input_gradient",
    "load_checkpoint",
    "load_training_meta",
    "save_checkpoint",
    "train",
    "training_accuracy",
]
