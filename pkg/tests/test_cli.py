import filecmp
import hashlib
import os
import shutil

import pytest
from click.testing import CliRunner

from fireseverity.cli import main
from fireseverity.pipeline import read_metrics

from conftest import GOLDEN, MINI

ALL_OUTPUTS = [
    "staged/events.csv", "staged/rejections.csv", "staged/stack_2019.tif", "staged/post_2019.tif",
    "features/stack_2019.tif", "features/stack_2020.tif", "features/matrix.bin",
    "fsi_monthly.csv", "fsi_annual.csv", "model.gbt", "scaler.txt", "metrics.csv",
    "actual_vs_predicted.csv", "importance.csv", "correlation.csv", "correlation_constant.csv",
    "residual_histogram.csv", "residual_moments.csv", "sensitivity.csv", "sensitivity_spread.csv",
    "priority.csv", "priority_report.txt", "figures/importance.png", "figures/fsi_monthly_counts.png",
    "figures/fsi_annual_mean.png", "figures/residuals.png",
]


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def tree_digest(root):
    out = {}
    for d, _, files in os.walk(root):
        for f in files:
            p = os.path.join(d, f)
            with open(p, "rb") as fh:
                out[os.path.relpath(p, root)] = hashlib.sha256(fh.read()).hexdigest()
    return out


@pytest.fixture(scope="module")
def ran(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli") / "mini"
    shutil.copytree(MINI, root, ignore=shutil.ignore_patterns("out"))
    cfg = str(root / "pipeline.cfg")
    before = tree_digest(root)
    res = invoke("run", "--config", cfg, "--quiet")
    assert res.exit_code == 0, res.output
    return cfg, root / "out", before


def test_run_writes_everything(ran):
    _, out, _ = ran
    missing = [p for p in ALL_OUTPUTS if not (out / p).is_file()]
    assert missing == []


def test_inputs_not_mutated(ran):
    cfg, out, before = ran
    after = {k: v for k, v in tree_digest(os.path.dirname(cfg)).items() if not k.startswith("out")}
    assert after == before


def test_metrics_reasonable(ran):
    m = read_metrics(str(ran[1] / "metrics.csv"))
    assert m["seed"] == 11
    assert m["n_train"] > m["n_test"] > 0
    assert 0.3 < m["test_r2"] <= 1.0
    assert abs(m["mean_fold_r2"] - m["test_r2"]) < 0.3


def test_correlate_square_with_header(ran):
    lines = (ran[1] / "correlation.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "" and header[-1] == "dNBR" and len(header) == 37
    assert len(lines) == 37
    assert all(len(line.split(",")) == 37 for line in lines)
    assert [line.split(",")[0] for line in lines[1:]] == header[1:]


def test_priority_matches_golden(ran):
    for name in ("priority.csv", "priority_report.txt"):
        assert filecmp.cmp(ran[1] / name, os.path.join(GOLDEN, name), shallow=False)


def test_rerun_is_byte_identical(ran, tmp_path):
    cfg, out, _ = ran
    res = invoke("run", "--config", cfg, "--out", str(tmp_path / "again"), "--quiet")
    assert res.exit_code == 0, res.output
    assert tree_digest(tmp_path / "again") == tree_digest(out)


def test_seed_override_changes_model(ran, tmp_path):
    cfg, out, _ = ran
    alt = tmp_path / "alt"
    shutil.copytree(out / "staged", alt / "staged")
    shutil.copytree(out / "features", alt / "features")
    res = invoke("train", "--config", cfg, "--out", str(alt), "--seed", "3")
    assert res.exit_code == 0, res.output
    assert read_metrics(str(alt / "metrics.csv"))["seed"] == 3
    assert (alt / "model.gbt").read_bytes() != (out / "model.gbt").read_bytes()
    assert str(alt / "model.gbt") in res.stdout.splitlines()


def test_stage_by_stage(mini):
    out = os.path.join(os.path.dirname(mini), "out")
    for stage in ("ingest", "features", "fsi", "train", "importance", "correlate",
                  "residuals", "sensitivity", "priority"):
        res = invoke(stage, "--config", mini, "--quiet")
        assert res.exit_code == 0, (stage, res.output)
    assert os.path.isfile(os.path.join(out, "sensitivity.csv"))


def test_ingest_outputs(mini):
    res = invoke("ingest", "--config", mini, "--quiet")
    assert res.exit_code == 0
    staged = os.path.join(os.path.dirname(mini), "out", "staged")
    with open(os.path.join(staged, "events.csv")) as fh:
        n_events = sum(1 for _ in fh) - 1
    assert n_events == 400  # 15 exact duplicates removed
    assert os.path.isfile(os.path.join(staged, "stack_2020.tif"))


def test_stage_before_prerequisite(mini):
    res = invoke("train", "--config", mini)
    assert res.exit_code == 3
    assert "features" in res.stderr


def test_empty_scenarios_baseline_only(mini):
    d = os.path.dirname(mini)
    with open(os.path.join(d, "scen.cfg"), "w") as fh:
        fh.write("")
    with open(mini) as fh:
        text = fh.read()
    with open(mini, "w") as fh:
        fh.write(text.replace("smi = smi.tif", "smi = smi.tif\nscenarios = scen.cfg"))
    assert invoke("run", "--config", mini, "--quiet").exit_code == 0
    with open(os.path.join(d, "out", "sensitivity.csv")) as fh:
        rows = fh.read().splitlines()
    assert len(rows) == 2 and rows[1].startswith("baseline,")


def _edit(mini, old, new):
    with open(mini) as fh:
        text = fh.read()
    assert old in text
    with open(mini, "w") as fh:
        fh.write(text.replace(old, new))


@pytest.mark.parametrize(
    "old, new",
    [("version = 1", "version = 7"), ("[model]", "[modle]"), ("max_depth = 4", "max_depth = four"),
     ("subsample = 0.8", "subsample = 0"), ("2019.pre", "1999.pre"), ("[meta]", "[meta")],
)
def test_config_errors_exit_2(mini, old, new):
    _edit(mini, old, new)
    res = invoke("ingest", "--config", mini)
    assert res.exit_code == 2
    lines = res.stderr.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith("fireseverity: error code=2 kind=config:")


def test_missing_config_exit(tmp_path):
    res = invoke("ingest", "--config", str(tmp_path / "none.cfg"))
    assert res.exit_code in (2, 3)
    assert "none.cfg" in res.stderr


def test_missing_dem_exit_3(mini):
    os.remove(os.path.join(os.path.dirname(mini), "dem.tif"))
    res = invoke("ingest", "--config", mini)
    assert res.exit_code == 3
    lines = res.stderr.strip().splitlines()
    assert len(lines) == 1 and "dem.tif" in lines[0]
    assert lines[0].startswith("fireseverity: error code=3 kind=input:")


def test_corrupt_raster_exit_3(mini):
    with open(os.path.join(os.path.dirname(mini), "dem.tif"), "wb") as fh:
        fh.write(b"not a tiff")
    res = invoke("ingest", "--config", mini)
    assert res.exit_code == 3
    assert "dem.tif" in res.stderr


def test_help_lists_subcommands():
    res = invoke("--help")
    assert res.exit_code == 0
    for name in ("ingest", "features", "fsi", "train", "importance", "correlate",
                 "residuals", "sensitivity", "priority"):
        assert name in res.output


def test_config_required():
    res = invoke("train")
    assert res.exit_code != 0 and "--config" in res.output
