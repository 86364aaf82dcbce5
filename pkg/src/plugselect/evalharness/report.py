"""Report files for a sweep: CSV table, JSON detail, balance-curve CSV.

Output is byte-deterministic for identical inputs: fixed column order,
fixed float formatting in the CSV, sorted keys and repr-based floats in
the JSON, and "\n" line endings everywhere.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import ConfigError
from ..ranking import ChannelRanking, ranking_to_dict
from .sweep import BalanceCurve, PruneResult

CSV_COLUMNS = (
    "strategy",
    "eta",
    "c",
    "acc_mean",
    "acc_std",
    "auc_mean",
    "auc_std",
    "f1_mean",
    "f1_std",
    "spe_mean",
    "spe_std",
    "sen_mean",
    "sen_std",
    "fps",
    "effective",
)


def _fmt(value: float | None, spec: str = ".6f") -> str:
    return "" if value is None else format(value, spec)


def _result_row(r: PruneResult) -> list[str]:
    m = r.metrics
    return [
        r.strategy,
        format(r.eta, ".3f"),
        str(r.c),
        _fmt(m.acc_mean),
        _fmt(m.acc_std),
        _fmt(m.auc_mean),
        _fmt(m.auc_std),
        _fmt(m.f1_mean),
        _fmt(m.f1_std),
        _fmt(m.spe_mean),
        _fmt(m.spe_std),
        _fmt(m.sen_mean),
        _fmt(m.sen_std),
        _fmt(r.fps, ".3f"),
        "true" if r.effective else "false",
    ]


def _result_dict(r: PruneResult) -> dict:
    m = r.metrics
    return {
        "strategy": r.strategy,
        "eta": r.eta,
        "c": r.c,
        "channel_sets": [list(s) for s in r.channel_sets],
        "metrics": {
            "n_subjects": m.n_subjects,
            "acc_mean": m.acc_mean,
            "acc_std": m.acc_std,
            "auc_mean": m.auc_mean,
            "auc_std": m.auc_std,
            "f1_mean": m.f1_mean,
            "f1_std": m.f1_std,
            "spe_mean": m.spe_mean,
            "spe_std": m.spe_std,
            "sen_mean": m.sen_mean,
            "sen_std": m.sen_std,
        },
        "fps": r.fps,
        "effective": r.effective,
        "per_subject": [dict(d) for d in r.per_subject],
    }


def emit_report(
    results: list[PruneResult],
    rankings: list[tuple[ChannelRanking, list[str]]],
    out_dir: str | Path,
    meta: dict | None = None,
) -> tuple[Path, Path]:
    """Write ``report.csv`` and ``report.json`` under ``out_dir``.

    ``rankings`` pairs each exported ranking with its channel labels.
    ``meta`` (seeds, config echo) is embedded in the JSON verbatim.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "report.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in results:
            writer.writerow(_result_row(r))
    payload = {
        "rows": [_result_dict(r) for r in results],
        "rankings": [
            ranking_to_dict(rk, labels) for rk, labels in rankings
        ],
        "meta": dict(meta or {}),
    }
    json_path = out / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def emit_balance_csv(curve: BalanceCurve, path: str | Path) -> Path:
    """One row per density: eta, relative_acc, relative_ce."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("eta", "relative_acc", "relative_ce"))
        for eta, racc, rce in zip(curve.etas, curve.relative_acc, curve.relative_ce):
            writer.writerow(
                (format(eta, ".3f"), format(racc, ".6f"), format(rce, ".6f"))
            )
    return path


def load_report_rows(csv_path: str | Path) -> list[dict]:
    """Parse a report.csv back into dictionaries (strings preserved)."""
    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError(
                f"{csv_path} does not look like a sweep report "
                f"(columns {reader.fieldnames})"
            )
        return list(reader)
