import hashlib
import json
import math
import warnings
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from rotorlab.config import RunConfig
from rotorlab.errors import ConfigError, DataError, RotorlabWarning, UsageError
from rotorlab.harness import (MANIFEST_NAME, emit_plotdata, load_manifest, manifest_digest, run_experiment, sweep,
                              to_jsonable)

RESONANCE = {"k": 2.0, "L": 256, "steps": 40}


def _config(tmp_path, experiment="resonance", params=None, name="run", seed=0):
    return RunConfig(experiment, dict(RESONANCE if params is None else params), seed, str(tmp_path / name))


class TestJson:
    def test_non_finite(self):
        assert to_jsonable([math.nan, math.inf, -math.inf, 1.5]) == ["nan", "inf", "-inf", 1.5]

    def test_numpy(self):
        value = to_jsonable({"a": np.float64(0.5), "b": np.int64(3), "c": np.array([1, 2]), "d": np.bool_(True),
                             "e": (1, None)})
        assert value == {"a": 0.5, "b": 3, "c": [1, 2], "d": True, "e": [1, None]}
        assert type(value["b"]) is int
        json.dumps(value)

    def test_digest_ignores_wall_time_and_out(self):
        a = {"config": {"experiment": "x", "out": "a"}, "wall_time": 1.0, "files": {}}
        b = {"config": {"experiment": "x", "out": "b"}, "wall_time": 2.0, "files": {}}
        assert manifest_digest(a) == manifest_digest(b)
        b["files"] = {"series": {}}
        assert manifest_digest(a) != manifest_digest(b)


class TestRun:
    def test_manifest(self, tmp_path):
        manifest = run_experiment(_config(tmp_path))
        out = tmp_path / "run"
        assert Path(manifest.path) == out / MANIFEST_NAME
        assert set(manifest.files) == {"series", "final"}
        for entry in manifest.files.values():
            assert hashlib.sha256((out / entry["path"]).read_bytes()).hexdigest() == entry["sha256"]
        assert manifest.config["params"]["r"] == 1
        assert manifest.diagnostics["max_relative_error"] < 1e-8

        data = json.loads((out / MANIFEST_NAME).read_text())
        assert data["digest"] == manifest.digest
        assert load_manifest(out).digest == manifest.digest

    def test_deterministic(self, tmp_path):
        a = run_experiment(_config(tmp_path, name="a"))
        b = run_experiment(_config(tmp_path, name="b"))
        assert a.digest == b.digest
        assert {k: v["sha256"] for k, v in a.files.items()} == {k: v["sha256"] for k, v in b.files.items()}

    def test_seeded_ensemble_repeats(self, tmp_path):
        params = {"K": 5.0, "n_traj": 200, "steps": 100}
        a = run_experiment(_config(tmp_path, "classical-diffusion", params, "a", seed=4))
        b = run_experiment(_config(tmp_path, "classical-diffusion", params, "b", seed=4))
        c = run_experiment(_config(tmp_path, "classical-diffusion", params, "c", seed=5))
        assert a.files["series"]["sha256"] == b.files["series"]["sha256"]
        assert a.files["series"]["sha256"] != c.files["series"]["sha256"]

    def test_warnings_recorded(self, tmp_path):
        params = {"k": 20.0, "T": 0.25, "L": 8, "steps": 5}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RotorlabWarning)
            manifest = run_experiment(_config(tmp_path, "qkr-localization", params))
        assert manifest.warnings
        assert manifest.diagnostics["spill_events"]

    def test_unknown_experiment(self, tmp_path):
        with pytest.raises(ConfigError):
            run_experiment(_config(tmp_path, "no-such-thing", {}))

    def test_unknown_param(self, tmp_path):
        with pytest.raises(ConfigError):
            run_experiment(_config(tmp_path, params={"kick": 1.0}))

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DataError):
            load_manifest(tmp_path)


class TestSweep:
    def test_table(self, tmp_path):
        result = sweep(_config(tmp_path, "gauss-sums", {"r": 1}), "s", [3, 5], workers=1)
        assert result.ok
        assert [m.diagnostics["bands"] for m in result.manifests] == [3, 5]
        table = pd.read_csv(result.table_path)
        assert table["s"].tolist() == [3, 5]
        assert (table["status"] == "ok").all()
        assert (tmp_path / "run" / "s=3" / MANIFEST_NAME).exists()

    def test_failure_recorded(self, tmp_path):
        result = sweep(_config(tmp_path, "gauss-sums", {"r": 2}), "s", [3, 4, 5], workers=1)
        assert not result.ok
        assert list(result.failures) == [4]
        assert "UsageError" in result.failures[4]
        assert result.table["status"].tolist() == ["ok", "failed", "ok"]
        assert len(result.manifests) == 2

    def test_process_pool_matches_serial(self, tmp_path):
        serial = sweep(_config(tmp_path, "gauss-sums", {"r": 1}, "serial"), "s", [3, 7], workers=1)
        pooled = sweep(_config(tmp_path, "gauss-sums", {"r": 1}, "pooled"), "s", [3, 7], workers=2)
        assert [m.digest for m in serial.manifests] == [m.digest for m in pooled.manifests]

    def test_empty(self, tmp_path):
        with pytest.raises(UsageError):
            sweep(_config(tmp_path, "gauss-sums", {}), "s", [])

    def test_unknown_axis(self, tmp_path):
        with pytest.raises(ConfigError):
            sweep(_config(tmp_path, "gauss-sums", {}), "k", [1.0])

    def test_invalid_child_rejected_up_front(self, tmp_path):
        with pytest.raises(ConfigError):
            sweep(_config(tmp_path, "gauss-sums", {}), "s", [3, 2.5])
        assert not (tmp_path / "run" / "s=3").exists()


class TestPlotData:
    def test_bundle(self, tmp_path):
        manifest = run_experiment(_config(tmp_path))
        bundle = emit_plotdata(manifest.path, "energy")
        out = tmp_path / "run"
        assert bundle.data_files == {"series": "energy.series.csv"}
        description = json.loads(Path(bundle.description).read_text())
        assert description["axes"] == {"x": "t", "y": "E"}
        assert description["plotly"]["data"][0]["type"] == "scatter"
        series = pd.read_csv(out / "energy.series.csv")
        assert list(series.columns) == ["t", "energy"]
        assert len(series) == RESONANCE["steps"] + 1

    def test_separate_out(self, tmp_path):
        manifest = run_experiment(_config(tmp_path))
        bundle = emit_plotdata(manifest, "energy", tmp_path / "plots")
        assert Path(bundle.description).parent == tmp_path / "plots"

    def test_missing_series(self, tmp_path):
        manifest = run_experiment(_config(tmp_path))
        with pytest.raises(DataError) as info:
            emit_plotdata(manifest, "localization")
        assert info.value.detail["series"] == "distribution"

    def test_unknown_figure(self, tmp_path):
        manifest = run_experiment(_config(tmp_path))
        with pytest.raises(ConfigError):
            emit_plotdata(manifest, "heatmap")
