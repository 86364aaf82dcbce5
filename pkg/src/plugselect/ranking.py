"""Task-level channel rankings from per-subject attributions.

Two strategies plus a baseline:

* averaging — mean |score| across subjects, ranked descending;
* voting — count how often each channel lands in a subject's top-k;
* random — uniform channel subsets, the control condition.

Both strategies rank by absolute value by default (a strongly negative
contribution still marks an informative channel); pass
``absolute=False`` for signed ranking.  Every tie-break ends at the
lower channel index, so rankings are total orders and deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attribution import SubjectAttribution
from .errors import ConfigError

_STRATEGIES = ("averaging", "voting", "random")


@dataclass(frozen=True, eq=False)
class ChannelRanking:
    order: tuple[int, ...]  # best channel first
    scores: np.ndarray  # per-channel score under the strategy's comparator
    strategy: str
    n_subjects: int
    k: int | None = None  # top-k used per subject (voting only)

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        n = scores.shape[0]
        if sorted(self.order) != list(range(n)):
            raise ConfigError("order must be a permutation of all channel indices")
        if self.strategy not in _STRATEGIES:
            raise ConfigError(
                f"strategy must be one of {_STRATEGIES}, got {self.strategy!r}"
            )
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))
        object.__setattr__(self, "scores", scores)

    @property
    def n_channels(self) -> int:
        return len(self.order)


@dataclass(frozen=True, eq=False)
class VoteTally:
    counts: np.ndarray  # per-channel occurrence count in subjects' top-k
    k: int

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1 or np.any(counts < 0):
            raise ConfigError("counts must be a 1-D non-negative vector")
        object.__setattr__(self, "counts", counts)


def _check_attrs(subject_attrs: list[SubjectAttribution]) -> int:
    if not subject_attrs:
        raise ConfigError("need at least one subject attribution")
    n_ch = subject_attrs[0].n_channels
    for a in subject_attrs:
        if a.n_channels != n_ch:
            raise ConfigError("subject attributions disagree on channel count")
        if not a.normalized:
            raise ConfigError(
                f"subject {a.subject_id} attribution is unnormalized; rank "
                f"only normalized attributions"
            )
    return n_ch


def _descending(scores: np.ndarray) -> tuple[int, ...]:
    # stable sort on negated scores: ties resolve to the lower index
    return tuple(int(i) for i in np.argsort(-scores, kind="stable"))


def rank_averaging(
    subject_attrs: list[SubjectAttribution], absolute: bool = True
) -> ChannelRanking:
    """Mean attribution across subjects, ranked from highest to lowest."""
    _check_attrs(subject_attrs)
    mat = np.stack([a.values for a in subject_attrs])
    if absolute:
        mat = np.abs(mat)
    scores = mat.mean(axis=0)
    return ChannelRanking(
        order=_descending(scores),
        scores=scores,
        strategy="averaging",
        n_subjects=len(subject_attrs),
    )


def vote_tally(
    subject_attrs: list[SubjectAttribution], k: int, absolute: bool = True
) -> VoteTally:
    """Count every channel's occurrences in the subjects' top-k sets."""
    n_ch = _check_attrs(subject_attrs)
    if not 1 <= k <= n_ch:
        raise ConfigError(f"k must lie in [1, {n_ch}], got {k}")
    counts = np.zeros(n_ch, dtype=np.int64)
    for a in subject_attrs:
        values = np.abs(a.values) if absolute else a.values
        top = np.argsort(-values, kind="stable")[:k]
        counts[top] += 1
    return VoteTally(counts=counts, k=k)


def rank_voting(
    subject_attrs: list[SubjectAttribution], k: int, absolute: bool = True
) -> ChannelRanking:
    """Rank by top-k occurrence count; break count ties by mean |score|."""
    tally = vote_tally(subject_attrs, k, absolute=absolute)
    mat = np.stack([a.values for a in subject_attrs])
    mean_mag = np.abs(mat).mean(axis=0) if absolute else mat.mean(axis=0)
    n_ch = tally.counts.shape[0]
    # lexsort: last key is primary -> counts desc, then mean magnitude desc,
    # then channel index asc
    order = np.lexsort((np.arange(n_ch), -mean_mag, -tally.counts))
    return ChannelRanking(
        order=tuple(int(i) for i in order),
        scores=tally.counts.astype(np.float64),
        strategy="voting",
        n_subjects=len(subject_attrs),
        k=k,
    )


def select_top(ranking: ChannelRanking, c: int) -> tuple[set[int], float]:
    """The first c ranked channels, plus the density c / C."""
    if not 1 <= c <= ranking.n_channels:
        raise ConfigError(
            f"c must lie in [1, {ranking.n_channels}], got {c}"
        )
    return set(ranking.order[:c]), c / ranking.n_channels


def random_subsets(
    n_channels: int, c: int, n_sets: int = 5, seed: int = 0
) -> list[set[int]]:
    """Uniform without-replacement channel subsets, one per set."""
    if not 1 <= c <= n_channels:
        raise ConfigError(f"c must lie in [1, {n_channels}], got {c}")
    if n_sets < 1:
        raise ConfigError(f"n_sets must be >= 1, got {n_sets}")
    rng = np.random.default_rng(seed)
    return [
        set(int(i) for i in rng.choice(n_channels, size=c, replace=False))
        for _ in range(n_sets)
    ]


def ranking_to_dict(
    ranking: ChannelRanking, channel_labels: list[str] | tuple[str, ...]
) -> dict:
    """JSON-ready export of a ranking."""
    if len(channel_labels) != ranking.n_channels:
        raise ConfigError(
            f"{len(channel_labels)} labels for {ranking.n_channels} channels"
        )
    payload = {
        "strategy": ranking.strategy,
        "n_subjects": ranking.n_subjects,
        "channel_labels": list(channel_labels),
        "order": list(ranking.order),
        "scores": [float(s) for s in ranking.scores],
    }
    if ranking.strategy == "voting":
        payload["k"] = ranking.k
    return payload
