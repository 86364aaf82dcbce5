"""Dataset model, file I/O, preprocessing, augmentation, and synthesis."""
from .augment import sr_augment
from .dataset import EegDataset, EegTrial, Window, load_dataset, save_dataset
from .preprocess import (
    FilterSpec,
    NormStats,
    bandpass_dataset,
    bandpass_trial,
    design_bandpass,
    segment_windows,
    zscore_apply,
    zscore_apply_all,
    zscore_fit,
)
from .synth import SynthSpec, split_train_test, synth_generate

__all__ = [
    "EegDataset",
    "EegTrial",
    "FilterSpec",
    "NormStats",
    "SynthSpec",
    "Window",
    "bandpass_dataset",
    "bandpass_trial",
    "design_bandpass",
    "load_dataset",
    "save_dataset",
    "segment_windows",
    "split_train_test",
    "sr_augment",
    "synth_generate",
    "zscore_apply",
    "zscore_apply_all",
    "zscore_fit",
]
