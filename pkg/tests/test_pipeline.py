import json
import os
import subprocess
import sys
import warnings
from pathlib import Path

import pytest

from rftopo import cli, pipeline
from rftopo.pipeline import ExperimentConfig, load_config

GOLDEN = Path(__file__).parent / "golden"
TINY = ("tiny_symmetric_dumbbell", "tiny_dimpled_sphere")


def tree(root):
    root = Path(root)
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file() and p.name != "manifest.json"}


def rows(path):
    lines = Path(path).read_text().splitlines()
    head = lines[0].split(",")
    return [dict(zip(head, ln.split(","))) for ln in lines[1:]]


@pytest.mark.parametrize("name", TINY)
def test_golden_bit_exact(tmp_path, name):
    pipeline.run(load_config(name), tmp_path / name)
    want = {k: v for k, v in tree(GOLDEN / name).items()}
    got = tree(tmp_path / name)
    assert sorted(got) == sorted(want)
    for k in want:
        assert got[k] == want[k], k


def test_golden_with_pure_python_backend(tmp_path):
    code = ("import sys; from rftopo import pipeline, kernels;"
            "assert kernels.BACKEND == 'python';"
            "pipeline.run(pipeline.load_config(sys.argv[1]), sys.argv[2])")
    env = dict(os.environ, RFTOPO_PURE_PYTHON="1")
    out = tmp_path / "py"
    subprocess.run([sys.executable, "-c", code, TINY[0], str(out)], check=True, env=env)
    assert tree(out) == tree(GOLDEN / TINY[0])


def test_parallel_topology_identical(tmp_path):
    cfg = load_config(TINY[1])
    pipeline.run(cfg, tmp_path / "a", jobs=1)
    pipeline.run(cfg, tmp_path / "b", jobs=2)
    assert tree(tmp_path / "a") == tree(tmp_path / "b")


def test_manifest_records_stages(tmp_path):
    pipeline.run(load_config(TINY[0]), tmp_path)
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert set(man["stages"]) == set(pipeline.STAGES)
    assert man["partial"] is False
    assert man["config"]["model"] == "SymmetricDumbbell"


def test_failure_marks_partial(tmp_path):
    cfg = load_config(TINY[0])
    with pytest.raises(Exception):
        pipeline.run_stages(cfg, tmp_path, ("topology",))  # nothing simulated yet
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["partial"] is True
    assert man["stages"]["topology"]["status"] == "failed"


def test_max_time_zero(tmp_path):
    cfg = load_config(TINY[0])
    cfg.schedule.max_time = 0.0
    pipeline.run(cfg, tmp_path)
    assert len(list((tmp_path / "snapshots").glob("*.csv"))) == 1
    assert {r["snapshot_index"] for r in rows(tmp_path / "diagrams.csv")} == {"0"}
    assert rows(tmp_path / "distances.csv") == []


def test_round_sphere_betti(tmp_path):
    cfg = load_config("round_sphere")
    cfg.schedule.max_time = 0.02
    cfg.schedule.cadence = 500
    cfg.mesh.n_theta = cfg.mesh.n_phi = 12
    pipeline.run(cfg, tmp_path)
    table = rows(tmp_path / "betti.csv")
    last = {}
    for r in table:
        last[r["snapshot_index"]] = r
    assert len(last) == 5
    for r in last.values():
        assert (r["beta0"], r["beta1"]) == ("1", "0")


def test_compare_self_is_zero():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = pipeline.compare(GOLDEN / TINY[0], GOLDEN / TINY[0])
    assert out and all(r["d_bottleneck"] == r["d_wasserstein1"] == 0 for r in out)


def test_compare_corrupt_warns(tmp_path):
    (tmp_path / "diagrams.csv").write_text("garbage\n1,2\n")
    with pytest.warns(UserWarning, match="alignment"):
        out = pipeline.compare(GOLDEN / TINY[0], tmp_path)
    assert out == []


def test_compare_prefix(tmp_path):
    src = (GOLDEN / TINY[0] / "diagrams.csv").read_text().splitlines()
    keep = [src[0]] + [ln for ln in src[1:] if ln.split(",")[0] in ("0", "1")]
    (tmp_path / "diagrams.csv").write_text("\n".join(keep) + "\n")
    with pytest.warns(UserWarning, match="common prefix"):
        out = pipeline.compare(GOLDEN / TINY[0], tmp_path)
    assert {r["snapshot_index"] for r in out} == {0, 1}


def test_config_round_trip():
    for name in pipeline.shipped_configs():
        cfg = load_config(name)
        assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_unknown_config_key_rejected():
    d = load_config(TINY[0]).to_dict()
    d["bogus"] = 1
    with pytest.raises((ValueError, KeyError)):
        ExperimentConfig.from_dict(d)


def test_cli_run_and_compare(tmp_path, capsys):
    out = tmp_path / "r"
    assert cli.main(["run", "--config", TINY[0], "--out", str(out)]) == 0
    assert tree(out) == tree(GOLDEN / TINY[0])
    capsys.readouterr()
    assert cli.main(["compare", str(out), str(GOLDEN / TINY[0])]) == 0
    text = capsys.readouterr().out.splitlines()
    assert text[0].startswith("snapshot_index,dim")
    assert len(text) == 1 + 5 * 2


def test_cli_stagewise_matches_run(tmp_path):
    out = tmp_path / "s"
    for stage in pipeline.STAGES:
        assert cli.main([stage, "--config", TINY[1], "--out", str(out)]) == 0
    assert tree(out) == tree(GOLDEN / TINY[1])


def test_cli_seed_override_changes_dimples(tmp_path):
    out = tmp_path / "seed"
    assert cli.main(["simulate", "--config", TINY[1], "--out", str(out), "--seed", "2"]) == 0
    a = (out / "snapshots" / "snapshot_0000.csv").read_bytes()
    assert a != (GOLDEN / TINY[1] / "snapshots" / "snapshot_0000.csv").read_bytes()


def test_cli_errors_exit_nonzero(tmp_path, capsys):
    assert cli.main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "rftopo", "configs"],
                         capture_output=True, text=True, check=True)
    assert "symmetric_dumbbell" in res.stdout.split()
