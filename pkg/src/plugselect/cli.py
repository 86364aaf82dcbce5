"""Command-line pipeline: synth -> train -> attribute -> rank -> evaluate.

Subcommands share one declarative config (INI file + flag overrides)
and four named seeds, so every stage recomputes identical splits and
windows instead of passing state through hidden files.  Outputs under
``--out`` are byte-deterministic given a config, except ``run_meta.json``
(it records wall-clock stage timings) and any measured throughput.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
error, 4 I/O error.  ``PLUGSELECT_LOG={error|info|debug}`` controls
verbosity on stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .attribution import (
    attribute_subject,
    subject_attribution_from_dict,
    subject_attribution_to_dict,
)
from .config import RunConfig, build_run_config, read_config_file
from .diffnet.checkpoint import load_checkpoint, save_checkpoint
from .eegdata.dataset import EegDataset, load_dataset, save_dataset
from .eegdata.preprocess import bandpass_dataset
from .eegdata.synth import synth_generate
from .errors import ConfigError, NumericError, PlugselectError
from .evalharness.report import emit_balance_csv, emit_report
from .evalharness.sweep import (
    balance_curve,
    prepare_subjects,
    prune_and_evaluate,
    ranking_for_density,
    subject_windows,
    train_subject_model,
)
from .evalharness.topomap import emit_topomap_svg
from .ranking import ChannelRanking, ranking_to_dict, select_top

log = logging.getLogger("plugselect")

_COMMANDS = ("synth", "train", "attribute", "rank", "evaluate", "run-all")


def _configure_logging() -> None:
    level_name = os.environ.get("PLUGSELECT_LOG", "info").strip().lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        raise ConfigError(
            f"PLUGSELECT_LOG must be one of {sorted(levels)}, got {level_name!r}"
        )
    logging.basicConfig(
        level=levels[level_name],
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="INI config file (flags override it)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--seed",
        type=int,
        help="base seed; sets data/model/split/subset seeds to N..N+3",
    )
    parser.add_argument("--jobs", type=int, help="subject-level worker count")
    parser.add_argument("--steps", type=int, help="quadrature steps M")
    parser.add_argument(
        "--strategy", choices=("averaging", "voting", "random"),
        help="ranking strategy",
    )
    parser.add_argument(
        "--channels", type=int, help="top-k channel count (voting strategies)"
    )
    parser.add_argument(
        "--densities", help="comma-separated channel densities in (0, 1]"
    )
    parser.add_argument(
        "--data", help="existing dataset directory (overrides [data] path)"
    )
    parser.add_argument(
        "--dry-run", action="store_true",
        help="validate configuration and exit without computing",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plugselect",
        description="attribution-guided EEG channel pruning pipeline",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "synth": "generate a synthetic dataset with planted informative channels",
        "train": "train one full-channel decoder per subject",
        "attribute": "attribute trained decoders to channels",
        "rank": "aggregate per-subject attributions into a channel ranking",
        "evaluate": "sweep channel density and report metrics/throughput",
        "run-all": "run synth/train/attribute/rank/evaluate in sequence",
    }
    for name in _COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        _add_shared_flags(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, object] = {}
    if args.config:
        overrides.update(read_config_file(args.config))
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    if args.steps is not None:
        overrides["ig.steps"] = args.steps
    if args.strategy is not None:
        overrides["strategy"] = args.strategy
    if args.channels is not None:
        overrides["voting_k"] = args.channels
    if args.densities is not None:
        parts = [p for p in args.densities.replace(",", " ").split() if p]
        try:
            overrides["densities"] = tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"--densities: {exc}") from exc
    if args.data is not None:
        overrides["data_path"] = args.data
    if args.seed is not None:
        overrides["data_seed"] = args.seed
        overrides["model_seed"] = args.seed + 1
        overrides["split_seed"] = args.seed + 2
        overrides["subset_seed"] = args.seed + 3
    return build_run_config(overrides)


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_run_meta(
    cfg: RunConfig, command: str, timings: dict[str, float], outputs: list[str]
) -> None:
    _write_json(
        Path(cfg.out_dir) / "run_meta.json",
        {
            "command": command,
            "version": __version__,
            "kernel_backend": kernels.backend_name(),
            "config": cfg.echo(),
            "stage_seconds": {k: round(v, 3) for k, v in timings.items()},
            "outputs": sorted(outputs),
        },
    )


def _dataset_dir(cfg: RunConfig) -> Path:
    return Path(cfg.out_dir) / "dataset"


def _load_input_dataset(cfg: RunConfig) -> EegDataset:
    """The raw (unfiltered) dataset a pipeline stage should consume."""
    if cfg.data_path is not None:
        return load_dataset(cfg.data_path)
    generated = _dataset_dir(cfg)
    if (generated / "manifest.json").is_file():
        return load_dataset(generated)
    raise ConfigError(
        f"no dataset: pass --data/[data] path or generate one first "
        f"(looked for {generated / 'manifest.json'})"
    )


def _preprocessed(cfg: RunConfig, dataset: EegDataset) -> EegDataset:
    if cfg.filter_enabled:
        log.info(
            "band-pass %.1f-%.1f Hz (order %d)",
            cfg.filter_spec.low_hz,
            cfg.filter_spec.high_hz,
            cfg.filter_spec.order,
        )
        return bandpass_dataset(dataset, cfg.filter_spec)
    return dataset


def _checkpoint_path(cfg: RunConfig, subject_id: int) -> Path:
    return Path(cfg.out_dir) / "checkpoints" / f"subject_{subject_id:03d}.psck"


def _attribution_path(cfg: RunConfig, subject_id: int) -> Path:
    return Path(cfg.out_dir) / "attributions" / f"subject_{subject_id:03d}.json"


def cmd_synth(cfg: RunConfig) -> list[str]:
    if cfg.data_path is not None:
        raise ConfigError(
            "synth generates data; drop the dataset path from the config"
        )
    dataset, planted = synth_generate(cfg.synth, cfg.data_seed)
    out = _dataset_dir(cfg)
    save_dataset(dataset, out)
    _write_json(
        out / "ground_truth.json",
        {
            "planted_channels": sorted(planted),
            "planted_labels": [dataset.channel_labels[i] for i in sorted(planted)],
            "data_seed": cfg.data_seed,
            "synth": cfg.echo()["data"]["synth"],
        },
    )
    log.info(
        "wrote %d trials (%d subjects) to %s",
        len(dataset.trials),
        len(dataset.subject_ids),
        out,
    )
    return [str(out)]


def cmd_train(cfg: RunConfig) -> list[str]:
    dataset = _preprocessed(cfg, _load_input_dataset(cfg))
    sweep = cfg.sweep_config()
    outputs = []
    losses = {}
    for sid in dataset.subject_ids:
        train_w, _ = subject_windows(dataset, sweep, sid)
        model, history = train_subject_model(dataset, sweep, sid, train_w)
        path = _checkpoint_path(cfg, sid)
        save_checkpoint(
            model,
            path,
            training_meta={
                "epochs": sweep.train.epochs,
                "final_loss": history[-1],
                "n_windows": len(train_w),
            },
        )
        losses[str(sid)] = history
        outputs.append(str(path))
        log.info("subject %d: final loss %.4f -> %s", sid, history[-1], path.name)
    loss_path = Path(cfg.out_dir) / "training_log.json"
    _write_json(loss_path, {"loss_history": losses})
    outputs.append(str(loss_path))
    return outputs


def cmd_attribute(cfg: RunConfig) -> list[str]:
    dataset = _preprocessed(cfg, _load_input_dataset(cfg))
    sweep = cfg.sweep_config()
    outputs = []
    for sid in dataset.subject_ids:
        ckpt = _checkpoint_path(cfg, sid)
        if not ckpt.is_file():
            raise ConfigError(
                f"no checkpoint for subject {sid} at {ckpt}; run train first"
            )
        model = load_checkpoint(ckpt)
        if model.config.n_channels != dataset.n_channels:
            raise ConfigError(
                f"checkpoint {ckpt.name} expects {model.config.n_channels} "
                f"channels, dataset has {dataset.n_channels}"
            )
        train_w, _ = subject_windows(dataset, sweep, sid)
        attr, gap_mean = attribute_subject(
            model, train_w, cfg.ig, correct_only=cfg.correct_only
        )
        path = _attribution_path(cfg, sid)
        _write_json(
            path,
            subject_attribution_to_dict(
                attr, list(dataset.channel_labels), cfg.ig, gap_mean
            ),
        )
        outputs.append(str(path))
        log.info(
            "subject %d: attribution written (mean completeness gap %.2e)",
            sid,
            gap_mean,
        )
    return outputs


def _load_attributions(cfg: RunConfig) -> tuple[list, list[str]]:
    adir = Path(cfg.out_dir) / "attributions"
    files = sorted(adir.glob("subject_*.json"))
    if not files:
        raise ConfigError(f"no attributions under {adir}; run attribute first")
    attrs = []
    labels: list[str] = []
    for f in files:
        payload = json.loads(f.read_text(encoding="utf-8"))
        attrs.append(subject_attribution_from_dict(payload))
        labels = payload["channel_labels"]
    return attrs, labels


def cmd_rank(cfg: RunConfig) -> list[str]:
    from .ranking import rank_averaging, rank_voting

    if cfg.strategy == "random":
        dataset = _load_input_dataset(cfg)
        labels = list(dataset.channel_labels)
        rng = np.random.default_rng(cfg.subset_seed)
        order = tuple(int(i) for i in rng.permutation(len(labels)))
        ranking = ChannelRanking(
            order=order,
            scores=np.zeros(len(labels)),
            strategy="random",
            n_subjects=0,
        )
    else:
        attrs, labels = _load_attributions(cfg)
        if cfg.strategy == "averaging":
            ranking = rank_averaging(attrs)
        else:
            if cfg.voting_k is None:
                raise ConfigError(
                    "voting needs a top-k: pass --channels or set "
                    "[ranking] voting_k"
                )
            ranking = rank_voting(attrs, cfg.voting_k)
    path = Path(cfg.out_dir) / f"ranking_{cfg.strategy}.json"
    _write_json(path, ranking_to_dict(ranking, labels))
    log.info("ranking (%s): best channels %s", cfg.strategy, ranking.order[:8])
    return [str(path)]


def cmd_evaluate(cfg: RunConfig) -> list[str]:
    dataset = _preprocessed(cfg, _load_input_dataset(cfg))
    sweep = cfg.sweep_config()
    runs = prepare_subjects(dataset, sweep)
    results = prune_and_evaluate(
        dataset, cfg.strategy, list(cfg.densities), sweep, runs=runs
    )
    labels = list(dataset.channel_labels)
    attrs = [r.attribution for r in runs]

    rankings: list[tuple[ChannelRanking, list[str]]] = []
    seen_k: set[int | None] = set()
    for result in results:
        ranking = ranking_for_density(cfg.strategy, attrs, result.c, sweep)
        if ranking is not None and ranking.k not in seen_k:
            rankings.append((ranking, labels))
            seen_k.add(ranking.k)

    meta = {"config": cfg.echo(), "kernel_backend": kernels.backend_name()}
    csv_path, json_path = emit_report(results, rankings, cfg.out_dir, meta=meta)
    outputs = [str(csv_path), str(json_path)]

    if all(r.fps is not None for r in results):
        curve = balance_curve(results)
        outputs.append(
            str(emit_balance_csv(curve, Path(cfg.out_dir) / "balance.csv"))
        )

    smallest = min(results, key=lambda r: r.eta)
    if rankings:
        map_ranking = ranking_for_density(cfg.strategy, attrs, smallest.c, sweep)
        scores = map_ranking.scores
        selected, _ = select_top(map_ranking, smallest.c)
    else:  # random baseline: no scores, just show the first drawn set
        scores = np.zeros(len(labels))
        selected = set(smallest.channel_sets[0])
    svg_path = emit_topomap_svg(
        scores, labels, Path(cfg.out_dir) / "topomap.svg", selected=selected
    )
    outputs.append(str(svg_path))
    for r in results:
        log.info(
            "eta=%.3f c=%d acc=%.3f±%.3f%s",
            r.eta,
            r.c,
            r.metrics.acc_mean,
            r.metrics.acc_std,
            "" if r.fps is None else f" fps={r.fps:.0f}",
        )
    return outputs


def cmd_run_all(cfg: RunConfig) -> tuple[list[str], dict[str, float]]:
    outputs: list[str] = []
    timings: dict[str, float] = {}
    stages = []
    if cfg.data_path is None:
        stages.append(("synth", cmd_synth))
    stages += [
        ("train", cmd_train),
        ("attribute", cmd_attribute),
        ("rank", cmd_rank),
        ("evaluate", cmd_evaluate),
    ]
    for name, fn in stages:
        if name == "rank" and cfg.strategy == "voting" and cfg.voting_k is None:
            # the sweep recomputes k per density; export skipped without a k
            log.info("skipping rank export: voting without a fixed --channels k")
            continue
        log.info("stage %s", name)
        t0 = time.perf_counter()
        try:
            outputs.extend(fn(cfg))
        except PlugselectError as exc:
            raise type(exc)(f"stage {name}: {exc}") from exc
        timings[name] = time.perf_counter() - t0
    return outputs, timings


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        _configure_logging()
        cfg = _config_from_args(args)
        if args.dry_run:
            print(json.dumps(cfg.echo(), indent=2, sort_keys=True))
            return 0
        t0 = time.perf_counter()
        if args.command == "run-all":
            outputs, timings = cmd_run_all(cfg)
        else:
            fn = {
                "synth": cmd_synth,
                "train": cmd_train,
                "attribute": cmd_attribute,
                "rank": cmd_rank,
                "evaluate": cmd_evaluate,
            }[args.command]
            outputs = fn(cfg)
            timings = {args.command: time.perf_counter() - t0}
        _write_run_meta(cfg, args.command, timings, outputs)
        return 0
    except ConfigError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        log.error("%s", exc)
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        log.error("%s", exc)
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except PlugselectError as exc:  # unexpected package error
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
