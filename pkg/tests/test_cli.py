"""Command-line interface: argument handling, artifacts, determinism.

These tests drive ``plugselect.cli.main`` in-process (fast, and exit
codes are its return value) plus one subprocess check that the installed
console script wires up to the same entry point.  A module-scoped
pipeline run keeps the artifact/determinism assertions cheap: the
configuration is tiny (8 channels, 3 subjects) and throughput
measurement is disabled so outputs are byte-reproducible.
"""
from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from plugselect.cli import main

CONFIG_TEXT = """
[data]
n_channels = 8
n_informative = 2
n_subjects = 3
trials_per_subject = 16

[train]
epochs = 12

[ig]
steps = 8

[ranking]
n_random_sets = 2

[evaluate]
densities = 0.25, 0.5, 1.0
fps_reps = 0
"""


@pytest.fixture(scope="module")
def config_path(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("cfg") / "tiny.ini"
    path.write_text(CONFIG_TEXT, encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def pipeline_out(config_path, tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("run")
    code = main(["run-all", "--config", str(config_path), "--out", str(out)])
    assert code == 0
    return out


def _tree(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "run_meta.json"
    }


# ------------------------------------------------------------- arg parsing


def test_version_and_help_exit_zero(capsys):
    assert main(["--version"]) == 0
    assert main(["--help"]) == 0
    out = capsys.readouterr().out
    assert "run-all" in out


def test_missing_command_and_unknown_command_exit_two(capsys):
    assert main([]) == 2
    assert main(["optimize"]) == 2
    capsys.readouterr()  # swallow argparse usage noise


def test_dry_run_prints_the_config_echo(tmp_path, capsys):
    code = main(["run-all", "--dry-run", "--out", str(tmp_path), "--seed", "9"])
    assert code == 0
    echo = json.loads(capsys.readouterr().out)
    assert echo["seeds"] == {"data": 9, "model": 10, "split": 11, "subset": 12}
    assert str(tmp_path) not in json.dumps(echo)
    assert echo["ranking"]["strategy"] == "averaging"


def test_flag_overrides_reach_the_config(tmp_path, capsys):
    code = main(
        [
            "evaluate",
            "--dry-run",
            "--out",
            str(tmp_path),
            "--steps",
            "48",
            "--strategy",
            "voting",
            "--channels",
            "3",
            "--densities",
            "0.5 1.0",
        ]
    )
    assert code == 0
    echo = json.loads(capsys.readouterr().out)
    assert echo["ig"]["steps"] == 48
    assert echo["ranking"] == {
        "strategy": "voting",
        "voting_k": 3,
        "n_random_sets": 5,
    }
    assert echo["evaluate"]["densities"] == [0.5, 1.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["evaluate", "--densities", "0.5,huge"],
        ["evaluate", "--densities", "0.25,0.5"],  # missing the 1.0 row
        ["evaluate", "--strategy", "blorp"],
        ["run-all", "--config", "/nonexistent/file.ini"],
    ],
)
def test_invalid_invocations_exit_two(argv, capsys):
    assert main(argv) == 2
    capsys.readouterr()


def test_bad_log_level_is_a_config_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PLUGSELECT_LOG", "loud")
    assert main(["synth", "--out", str(tmp_path)]) == 2
    assert "PLUGSELECT_LOG" in capsys.readouterr().err


# ---------------------------------------------------------- stage ordering


def test_stages_demand_their_inputs(tmp_path, capsys):
    out = ["--out", str(tmp_path)]
    assert main(["train", *out]) == 2
    assert "no dataset" in capsys.readouterr().err
    assert main(["rank", *out]) == 2
    assert "attribute" in capsys.readouterr().err


def test_attribute_requires_checkpoints(tmp_path, config_path, capsys):
    assert main(["synth", "--config", str(config_path), "--out", str(tmp_path)]) == 0
    assert (
        main(["attribute", "--config", str(config_path), "--out", str(tmp_path)])
        == 2
    )
    assert "run train first" in capsys.readouterr().err


def test_synth_rejects_an_external_dataset_path(tmp_path, capsys):
    assert main(["synth", "--out", str(tmp_path), "--data", "somewhere"]) == 2
    capsys.readouterr()


def test_voting_rank_requires_a_channel_count(pipeline_out, capsys):
    code = main(["rank", "--out", str(pipeline_out), "--strategy", "voting"])
    assert code == 2
    assert "--channels" in capsys.readouterr().err


def test_unwritable_output_directory_exits_four(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory", encoding="utf-8")
    code = main(["synth", "--out", str(blocker / "sub")])
    assert code == 4
    assert "i/o error" in capsys.readouterr().err


# --------------------------------------------------------------- artifacts


def test_run_all_produces_the_full_artifact_set(pipeline_out):
    expected = [
        "dataset/manifest.json",
        "dataset/ground_truth.json",
        "checkpoints/subject_000.psck",
        "checkpoints/subject_000.psck.json",
        "attributions/subject_000.json",
        "ranking_averaging.json",
        "report.csv",
        "report.json",
        "topomap.svg",
        "training_log.json",
        "run_meta.json",
    ]
    for rel in expected:
        assert (pipeline_out / rel).is_file(), rel


def test_ground_truth_names_the_planted_channels(pipeline_out):
    truth = json.loads(
        (pipeline_out / "dataset" / "ground_truth.json").read_text()
    )
    assert len(truth["planted_channels"]) == 2
    assert all(0 <= c < 8 for c in truth["planted_channels"])
    assert len(truth["planted_labels"]) == 2


def test_run_meta_records_stages_and_config(pipeline_out):
    meta = json.loads((pipeline_out / "run_meta.json").read_text())
    assert meta["command"] == "run-all"
    assert set(meta["stage_seconds"]) == {
        "synth",
        "train",
        "attribute",
        "rank",
        "evaluate",
    }
    assert meta["config"]["evaluate"]["fps_reps"] == 0
    assert meta["kernel_backend"] in ("cython", "numpy")
    assert meta["outputs"] == sorted(meta["outputs"])


def test_report_embeds_the_config_echo(pipeline_out):
    payload = json.loads((pipeline_out / "report.json").read_text())
    assert payload["meta"]["config"]["seeds"]["data"] == 0
    assert [row["eta"] for row in payload["rows"]] == [0.25, 0.5, 1.0]


def test_training_log_has_one_history_per_subject(pipeline_out):
    log = json.loads((pipeline_out / "training_log.json").read_text())
    assert sorted(log["loss_history"]) == ["0", "1", "2"]
    assert all(len(v) == 12 for v in log["loss_history"].values())


def test_random_rank_subcommand_writes_a_permutation(pipeline_out, tmp_path):
    # own output directory: the shared fixture tree must stay pristine
    # for the byte-determinism comparisons below
    code = main(
        [
            "rank",
            "--out",
            str(tmp_path),
            "--data",
            str(pipeline_out / "dataset"),
            "--strategy",
            "random",
        ]
    )
    assert code == 0
    payload = json.loads((tmp_path / "ranking_random.json").read_text())
    assert sorted(payload["order"]) == list(range(8))
    assert payload["strategy"] == "random"
    assert payload["n_subjects"] == 0
    assert all(s == 0.0 for s in payload["scores"])


def test_train_accepts_an_external_dataset(pipeline_out, config_path, tmp_path):
    code = main(
        [
            "train",
            "--config",
            str(config_path),
            "--out",
            str(tmp_path),
            "--data",
            str(pipeline_out / "dataset"),
        ]
    )
    assert code == 0
    fresh = (tmp_path / "checkpoints" / "subject_000.psck").read_bytes()
    original = (pipeline_out / "checkpoints" / "subject_000.psck").read_bytes()
    assert fresh == original  # same data + seeds -> same parameters


# ------------------------------------------------------------- determinism


def test_run_all_is_byte_deterministic(pipeline_out, config_path, tmp_path):
    code = main(["run-all", "--config", str(config_path), "--out", str(tmp_path)])
    assert code == 0
    assert _tree(tmp_path) == _tree(pipeline_out)


def test_staged_run_matches_run_all(pipeline_out, config_path, tmp_path):
    base = ["--config", str(config_path), "--out", str(tmp_path)]
    for stage in ("synth", "train", "attribute", "rank", "evaluate"):
        assert main([stage, *base]) == 0, stage
    assert _tree(tmp_path) == _tree(pipeline_out)


# ---------------------------------------------------------- console script


def test_installed_console_script_reports_the_version():
    proc = subprocess.run(
        ["plugselect", "--version"], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    import plugselect

    assert proc.stdout.strip() == plugselect.__version__


def test_module_invocation_matches_the_script():
    proc = subprocess.run(
        [sys.executable, "-m", "plugselect.cli", "--version"],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
