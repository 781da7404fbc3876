"""Running experiments, sweeps and plot bundles; every run ends in a manifest."""

import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from rotorlab import __version__
from rotorlab.charts import FIGURES
from rotorlab.config import RunConfig, thread_limit, validate_params
from rotorlab.data import load_frame, sha256_hex, write_bytes_atomic, write_frame
from rotorlab.errors import ConfigError, DataError, RotorlabWarning, UsageError
from rotorlab.experiments import get_experiment

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    config: dict
    version: str
    wall_time: float
    diagnostics: dict
    warnings: list
    files: dict
    path: str = ""

    def to_dict(self):
        data = asdict(self)
        data.pop("path")
        data["digest"] = manifest_digest(data)
        return data

    @classmethod
    def from_dict(cls, data, path=""):
        return cls(data["config"], data["version"], data["wall_time"], data["diagnostics"], data["warnings"],
                   data["files"], str(path))

    @property
    def digest(self):
        return manifest_digest(self.to_dict())


@dataclass
class SweepResult:
    axis: str
    manifests: list
    failures: dict
    table: pd.DataFrame
    table_path: str = ""

    @property
    def ok(self):
        return not self.failures


@dataclass
class PlotBundle:
    figure: str
    data_files: dict
    description: str
    scales: dict = field(default_factory=dict)


def to_jsonable(value):
    """Plain JSON types; non-finite floats become the strings nan, inf and -inf."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def canonical_json(value):
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def manifest_digest(manifest):
    """sha256 of the manifest without wall time, output directory or a previous digest."""
    body = {k: v for k, v in manifest.items() if k not in ("wall_time", "digest")}
    if "config" in body:
        body["config"] = {k: v for k, v in body["config"].items() if k != "out"}
    return sha256_hex(canonical_json(body).encode("utf-8"))


def write_manifest(manifest, out):
    path = Path(out) / MANIFEST_NAME
    payload = json.dumps(manifest.to_dict(), indent=2, sort_keys=True).encode("utf-8")
    write_bytes_atomic(path, payload)
    manifest.path = str(path)
    return path


def load_manifest(path):
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"manifest not found: {path}", manifest=str(path))
    return RunManifest.from_dict(data, path)


def resolve(config):
    """Validated copy of ``config`` with every schema default filled in."""
    experiment = get_experiment(config.experiment)
    params = validate_params(experiment.params, config.params)
    return experiment, RunConfig(config.experiment, params, config.seed, config.out)


def run_experiment(config, progress=False, workers=None):
    experiment, config = resolve(config)
    workers = thread_limit() if workers is None else workers
    out = Path(config.out)
    logger.info("Running %s (seed %d) into %s", experiment.name, config.seed, out)

    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RotorlabWarning)
        outcome = experiment.runner(config.params, config.seed, workers, progress)
    wall_time = time.perf_counter() - start

    messages = list(outcome.warnings)
    for w in caught:
        if issubclass(w.category, RotorlabWarning) and str(w.message) not in messages:
            messages.append(str(w.message))
    for message in messages:
        logger.warning("%s: %s", experiment.name, message)

    files = {}
    for name, frame in outcome.frames.items():
        filename = f"{name}.csv"
        digest = write_frame(frame, out / filename)
        files[name] = {"path": filename, "sha256": digest, "rows": int(len(frame)), "columns": list(frame.columns)}
        logger.info("Wrote %s (%d rows, sha256 %s)", out / filename, len(frame), digest[:12])

    manifest = RunManifest(to_jsonable(config.to_dict()), __version__, wall_time,
                           to_jsonable(outcome.diagnostics), messages, files)
    path = write_manifest(manifest, out)
    logger.info("Finished %s in %.2fs, manifest %s", experiment.name, wall_time, path)
    return manifest


def _run_child(config_dict):
    manifest = run_experiment(RunConfig.from_dict(config_dict), workers=1)
    return manifest.to_dict(), manifest.path


def _child_dir(base, axis, value):
    label = repr(value) if isinstance(value, float) else str(value)
    return str(Path(base.out) / f"{axis}={label}")


def _scalar_diagnostics(diagnostics):
    return {k: v for k, v in diagnostics.items() if isinstance(v, (int, float, str, bool)) or v is None}


def sweep(base, axis, values, workers=None, progress=False):
    """Run ``base`` once per value of ``axis``; failed children are recorded and skipped."""
    values = list(values)
    if not values:
        raise UsageError("sweep needs at least one value", axis=axis)
    experiment = get_experiment(base.experiment)
    if axis not in experiment.param_names():
        raise ConfigError(f"{axis!r} is not a parameter of {experiment.name}", key=axis)
    children = [base.with_param(axis, value, out=_child_dir(base, axis, value)) for value in values]
    for child in children:
        resolve(child)

    limit = thread_limit()
    if workers is None:
        workers = min(len(children), limit or os.cpu_count() or 1)
    elif limit is not None:
        workers = min(workers, limit)

    results, failures = {}, {}
    if workers <= 1:
        for index, child in enumerate(tqdm(children, desc="sweep", disable=not progress)):
            try:
                results[index] = _run_child(child.to_dict())
            except Exception as exc:
                failures[index] = f"{type(exc).__name__}: {exc}"
                logger.warning("sweep child %s=%r failed: %s", axis, values[index], exc)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_child, child.to_dict()): index for index, child in enumerate(children)}
            for future in tqdm(as_completed(futures), total=len(futures), desc="sweep", disable=not progress):
                index = futures[future]
                try:
                    results[index] = future.result()
                except Exception as exc:
                    failures[index] = f"{type(exc).__name__}: {exc}"
                    logger.warning("sweep child %s=%r failed: %s", axis, values[index], exc)

    rows, manifests = [], []
    for index, value in enumerate(values):
        row = {axis: repr(value) if isinstance(value, list) else value}
        if index in results:
            data, path = results[index]
            manifests.append(RunManifest.from_dict(data, path))
            row.update(status="ok", manifest=path, **_scalar_diagnostics(data["diagnostics"]))
        else:
            row.update(status="failed", error=failures[index])
        rows.append(row)
    table = pd.DataFrame(rows)
    table_path = Path(base.out) / "sweep.csv"
    write_frame(table, table_path)
    failed = {values[i] if not isinstance(values[i], list) else repr(values[i]): msg for i, msg in failures.items()}
    if failed:
        logger.warning("sweep over %s: %d of %d children failed", axis, len(failed), len(values))
    return SweepResult(axis, manifests, failed, table, str(table_path))


def emit_plotdata(manifest, figure, out=None):
    """Columnar files plus a plotly JSON description for ``figure`` from a finished run."""
    if not isinstance(manifest, RunManifest):
        manifest = load_manifest(manifest)
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}", figure=figure)
    spec = FIGURES[figure]
    root = Path(manifest.path).parent
    out = root if out is None else Path(out)

    frames, data_files = {}, {}
    for source, columns in spec.sources.items():
        entry = manifest.files.get(source)
        if entry is None:
            raise DataError(f"figure {figure} needs the {source!r} series, which this run did not write",
                            series=source, figure=figure)
        frame = load_frame(root / entry["path"])
        missing = [c for c in columns if c not in frame.columns]
        if missing:
            raise DataError(f"series {source!r} lacks columns {missing}", series=source, columns=missing)
        frames[source] = frame[list(columns)]
        filename = f"{figure}.{source}.csv"
        write_frame(frames[source], out / filename)
        data_files[source] = filename

    fig = spec.builder(frames)
    layout = fig.layout
    description = {
        "figure": figure,
        "data": data_files,
        "axes": {"x": layout.xaxis.title.text, "y": layout.yaxis.title.text},
        "scales": spec.scales,
        "plotly": json.loads(fig.to_json()),
    }
    description_path = out / f"{figure}.json"
    write_bytes_atomic(description_path, json.dumps(description, indent=2, sort_keys=True).encode("utf-8"))
    logger.info("Wrote plot bundle %s", description_path)
    return PlotBundle(figure, data_files, str(description_path), dict(spec.scales))
