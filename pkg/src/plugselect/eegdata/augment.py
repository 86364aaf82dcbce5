"""Trial augmentation by same-class segment recombination.

Each synthetic trial keeps its class: segment position p is copied from
position p of a donor trial drawn uniformly (with replacement) from the
same class, so within-trial temporal structure at each position is
preserved while cross-trial variety increases.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..errors import ConfigError
from .dataset import EegTrial


def sr_augment(
    trials: list[EegTrial], n_segments: int, factor: int, seed: int
) -> list[EegTrial]:
    """Return the input trials plus ``(factor - 1) * len(trials)`` synthetic ones.

    ``factor=1`` is the identity.  Segment length is ``floor(T / n_segments)``;
    the final segment absorbs any remainder.
    """
    if factor < 1:
        raise ConfigError(f"augmentation factor must be >= 1, got {factor}")
    if n_segments < 1:
        raise ConfigError(f"n_segments must be >= 1, got {n_segments}")
    trials = list(trials)
    if factor == 1:
        return trials
    if not trials:
        raise ConfigError("cannot augment an empty trial list")
    n_samples = trials[0].n_samples
    for t in trials:
        if t.n_samples != n_samples:
            raise ConfigError("all trials must share the same sample count")
    if n_segments > n_samples:
        raise ConfigError(
            f"n_segments={n_segments} exceeds trial length {n_samples}"
        )
    by_class: dict[int, list[int]] = {}
    for i, t in enumerate(trials):
        by_class.setdefault(t.label, []).append(i)
    for label, members in sorted(by_class.items()):
        if len(members) < 2:
            raise ConfigError(
                f"class {label} has {len(members)} trial(s); at least 2 are "
                f"needed to recombine"
            )
    seg_len = n_samples // n_segments
    # segment p spans [bounds[p], bounds[p+1]); the last one absorbs the remainder
    bounds = [p * seg_len for p in range(n_segments)] + [n_samples]

    rng = np.random.default_rng(seed)
    next_id = max(t.trial_id for t in trials) + 1
    out = list(trials)
    for _ in range(factor - 1):
        for template in trials:
            pool = by_class[template.label]
            data = np.empty_like(template.data)
            for p in range(n_segments):
                donor = trials[pool[rng.integers(len(pool))]]
                lo, hi = bounds[p], bounds[p + 1]
                data[:, lo:hi] = donor.data[:, lo:hi]
            out.append(
                replace(template, data=data, trial_id=next_id)
            )
            next_id += 1
    return out
