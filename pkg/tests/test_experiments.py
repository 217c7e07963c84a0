import numpy as np
import pytest

import sawsle
from sawsle.cli import main
from sawsle.experiments import (ConfigError, ExperimentConfig,
                                OUTPUT_ROOT_ENV, _run_saw_stage,
                                list_experiments, run_experiment)

TINY = {
    "saw_n": 300, "saw_n_prime": 300, "samples": 40, "observe_every": 5,
    "checkpoint_every": 16, "batches": 8, "dts": "0.1 0.2", "seed": 5,
}


def tiny_config(tmp_path, name="saw_fvar", **extra):
    params = dict(TINY)
    params.update(extra)
    valid = ExperimentConfig(name).params
    lines = [f"[{name}]"] + [f"{k} = {v}" for k, v in params.items()
                             if k in valid]
    path = tmp_path / "config.ini"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_list_experiments():
    names = list_experiments()
    assert len(names) == 8
    assert "fix_time" in names and "saw_cp_fvar" in names


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig("no_such_experiment")
    with pytest.raises(ConfigError):
        ExperimentConfig("fix_time", {"bogus_key": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig("fix_time", {"kappa": 6.0})
    with pytest.raises(ConfigError):
        ExperimentConfig("fix_time", {"nu": 0.5})  # nu*p != 1
    with pytest.raises(ConfigError):
        ExperimentConfig("fix_time", {"samples": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig("saw_fvar", {"dts": "0.1 0.1"})
    with pytest.raises(ConfigError):
        ExperimentConfig("fix_time", {"saw_n": 100, "saw_n_prime": 200})


def test_config_nu_p_pair_accepted():
    cfg = ExperimentConfig("saw_fvar", {"nu": 0.5, "p": 2.0})
    assert cfg["nu"] * cfg["p"] == 1.0
    assert cfg.dts == [0.01, 0.02, 0.04]


def test_config_iterations_alias():
    cfg = ExperimentConfig("saw_fvar", {"observe_every": 10,
                                        "iterations": 500})
    assert cfg["samples"] == 50


def test_run_writes_artifacts_and_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "a"))
    cfg_path = tiny_config(tmp_path)
    rc = main(["run", str(cfg_path)])
    assert rc == 0
    out = tmp_path / "a" / "saw_fvar-seed5"
    for name in ("manifest.txt", "summary.txt", "config.echo", "samples.csv"):
        assert (out / name).exists()
    manifest = (out / "manifest.txt").read_text()
    assert "seed = 5" in manifest
    assert "version.numpy" in manifest
    assert "statistical only" in manifest

    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "b"))
    assert main(["run", str(cfg_path)]) == 0
    out2 = tmp_path / "b" / "saw_fvar-seed5"
    for csv in out.glob("*.csv"):
        assert csv.read_bytes() == (out2 / csv.name).read_bytes()


def test_interrupted_stage_resumes_bit_identically(tmp_path):
    cfg = ExperimentConfig("saw_fvar", {k: str(v) for k, v in TINY.items()})

    def record(walk, i, store):
        store["end"][i] = walk.x[-1] + 1j * walk.y[-1]

    clean = {"end": np.zeros(TINY["samples"], dtype=complex)}
    clean_dir = tmp_path / "clean"
    clean_dir.mkdir()
    _run_saw_stage(cfg, clean_dir, "saw", clean, record)

    # same stage, interrupted mid-run after the second checkpoint
    class Boom(RuntimeError):
        pass

    count = 0

    def exploding(walk, i, store):
        nonlocal count
        count += 1
        if count == 37:
            raise Boom()
        record(walk, i, store)

    outdir = tmp_path / "resumed"
    outdir.mkdir()
    partial = {"end": np.zeros(TINY["samples"], dtype=complex)}
    with pytest.raises(Boom):
        _run_saw_stage(cfg, outdir, "saw", partial, exploding)
    resumed = {"end": np.zeros(TINY["samples"], dtype=complex)}
    _run_saw_stage(cfg, outdir, "saw", resumed, record)
    assert np.array_equal(resumed["end"], clean["end"])


def test_cli_resume_completes_run(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path))
    cfg_path = tiny_config(tmp_path)
    assert main(["run", str(cfg_path)]) == 0
    out = tmp_path / "saw_fvar-seed5"
    reference = {c.name: c.read_bytes() for c in out.glob("*.csv")}
    for stale in list(out.glob("*.csv")) + [out / "summary.txt",
                                            out / "manifest.txt"]:
        stale.unlink()
    assert main(["resume", str(out)]) == 0
    assert (out / "summary.txt").exists()
    for name, blob in reference.items():
        assert (out / name).read_bytes() == blob


def test_cli_list():
    assert main(["list"]) == 0


def test_cli_config_errors_exit_1(tmp_path):
    assert main(["run", str(tmp_path / "missing.ini")]) == 1
    bad = tmp_path / "bad.ini"
    bad.write_text("[saw_fvar]\nbogus = 3\n")
    assert main(["run", str(bad)]) == 1
    kap = tmp_path / "kappa.ini"
    kap.write_text("[fix_time]\nkappa = 6\n")
    assert main(["run", str(kap)]) == 1
    assert main(["resume", str(tmp_path)]) == 1  # no config.echo


def test_cli_runtime_errors_exit_2(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path))
    # a capacity budget this walk can never reach
    cfg_path = tiny_config(tmp_path, name="fix_cap", cap_prefix=50.0,
                           samples=4)
    assert main(["run", str(cfg_path)]) == 2


def test_default_section_applies_where_relevant(tmp_path):
    path = tmp_path / "multi.ini"
    path.write_text("[DEFAULT]\nseed = 9\nsle_maps = 600\n"
                    "[saw_fvar]\nsamples = 50\n"
                    "[fix_time]\nsamples = 60\n")
    cfgs = ExperimentConfig.sections_from_file(path)
    by_name = {c.name: c for c in cfgs}
    assert by_name["saw_fvar"]["seed"] == 9
    assert by_name["fix_time"]["sle_maps"] == 600
    assert by_name["saw_fvar"]["samples"] == 50


def test_run_experiment_summary_keys(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path))
    cfg = ExperimentConfig("fix_time", {
        "saw_n": 300, "saw_n_prime": 200, "samples": 60, "observe_every": 5,
        "sle_maps": 150, "sle_samples": 300, "checkpoint_every": 30,
        "batches": 10, "seed": 2})
    out = run_experiment(cfg)
    summary = dict(line.split(" = ") for line in
                   (out / "summary.txt").read_text().splitlines())
    for key in ("a", "b", "c", "sup_diff_R", "sup_diff_Theta"):
        assert key in summary
    assert float(summary["a"]) > 0
