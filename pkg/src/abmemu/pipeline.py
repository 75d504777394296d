"""Batch orchestration, CSV/JSON persistence, and study reports.

The study shape: generate a design, simulate every row, train the
configured surrogates on the outputs, then write comparison, spider,
predicted-vs-actual, PCA, and main-effect artifacts. Per-run seeds
derive from (baseSeed, runIndex) with a splittable 64-bit mix, so a
batch gives the same records at any parallelism.
"""

import concurrent.futures
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .abm import run_simulation
from .analysis import (main_effects, mse, pca_decompose, relative_scores,
                       split_dataset)
from .design import ParamRanges, generate_design, scale_design
from .errors import DataError
from .params import PARAM_NAMES, SimParams, _parse_kv_file
from .surrogates import METHOD_NAMES, METHOD_ORDER, Dataset, fit_method

RUN_HEADER_TAIL = ("seed", "output", "sim_time_s", "extinct")

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x):
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def run_seed(base_seed, run_index):
    """Per-run seed: a 64-bit hash of (baseSeed, runIndex)."""
    return _splitmix64((int(base_seed) + (run_index + 1) * _GOLDEN) & _MASK64)


@dataclass(frozen=True)
class RunRecord:
    """One simulated design row."""

    runIndex: int
    values: tuple        # the ten parameter values, canonical order
    seed: int
    output: float        # per-capita cost of care in the final year
    simTime: float       # wall seconds spent simulating
    extinct: bool


def _simulate_row(job):
    index, values, seed = job
    start = time.perf_counter()
    try:
        result = run_simulation(SimParams.from_vector(values), seed)
        output, extinct = result.finalCostPerCapita, result.extinct
    except Exception as exc:  # a failed row must not abort the batch
        print("run %d failed: %s" % (index, exc), file=sys.stderr)
        output, extinct = 0.0, True
    return RunRecord(index, tuple(float(v) for v in values), seed,
                     float(output), time.perf_counter() - start, extinct)


def run_batch(design, base_seed=0, parallelism=1, progress=False):
    """Simulate every row of a scaled design; records ordered by row.

    Outputs are identical at any parallelism level; only the measured
    sim_time_s values depend on the machine.
    """
    design = np.asarray(design, dtype=float)
    if design.ndim != 2 or design.shape[0] < 1:
        raise DataError("design must be a non-empty 2-D matrix")
    if parallelism < 1:
        raise DataError("parallelism must be >= 1")
    jobs = [(i, design[i], run_seed(base_seed, i))
            for i in range(design.shape[0])]
    records = [None] * len(jobs)
    if parallelism == 1:
        for job in jobs:
            records[job[0]] = _simulate_row(job)
            if progress:
                print("simulated run %d/%d" % (job[0] + 1, len(jobs)),
                      file=sys.stderr)
    else:
        with concurrent.futures.ProcessPoolExecutor(parallelism) as pool:
            done = 0
            for record in pool.map(_simulate_row, jobs, chunksize=1):
                records[record.runIndex] = record
                done += 1
                if progress:
                    print("simulated run %d/%d" % (done, len(jobs)),
                          file=sys.stderr)
    return records


def _format_value(value):
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_runs_csv(path, records, names=PARAM_NAMES):
    header = tuple(names) + RUN_HEADER_TAIL
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in records:
            row = [_format_value(v) for v in r.values]
            row += [str(r.seed), _format_value(r.output),
                    _format_value(r.simTime), str(int(r.extinct))]
            fh.write(",".join(row) + "\n")


def read_runs_csv(path):
    """Read a runs CSV back into (parameter names, records)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise DataError("%s: empty runs file" % path)
    header = tuple(lines[0].split(","))
    if len(header) < 5 or header[-4:] != RUN_HEADER_TAIL:
        raise DataError("%s: header must end with %s"
                        % (path, ",".join(RUN_HEADER_TAIL)))
    names = header[:-4]
    records = []
    for index, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != len(header):
            raise DataError("%s: row %d has %d cells, expected %d"
                            % (path, index, len(cells), len(header)))
        try:
            values = tuple(float(c) for c in cells[:len(names)])
            seed = int(cells[-4])
            output = float(cells[-3])
            sim_time = float(cells[-2])
            extinct = bool(int(cells[-1]))
        except ValueError as exc:
            raise DataError("%s: row %d: %s" % (path, index, exc)) from None
        records.append(RunRecord(index, values, seed, output, sim_time,
                                 extinct))
    return names, records


def records_to_dataset(records, names=PARAM_NAMES):
    X = np.array([r.values for r in records], dtype=float)
    y = np.array([r.output for r in records], dtype=float)
    return Dataset(X, y, tuple(names))


def write_design_csv(path, matrix, names=PARAM_NAMES):
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_design_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise DataError("%s: empty design file" % path)
    names = tuple(lines[0].split(","))
    try:
        matrix = np.array([[float(c) for c in line.split(",")]
                           for line in lines[1:]], dtype=float)
    except ValueError as exc:
        raise DataError("%s: %s" % (path, exc)) from None
    if matrix.ndim != 2 or matrix.shape[1] != len(names):
        raise DataError("%s: ragged design rows" % path)
    return names, matrix


@dataclass(frozen=True)
class ScenarioConfig:
    """Study settings parsed from a plain-text key = value file.

    Recognised keys (all optional): sizes, baseSeed, designMethod,
    ranges, methods, parallelism, lhsIterations, mainEffectsGrid,
    mainEffectsSamples, plus dotted per-method hyperparameter
    overrides such as ``gbt.n_stages = 500``.
    """

    sizes: tuple = (200, 400, 800, 1600)
    baseSeed: int = 0
    designMethod: str = "lptau"
    rangesFile: str = None
    methods: tuple = METHOD_ORDER
    hyper: dict = None
    parallelism: int = 1
    lhsIterations: int = 10000
    mainEffectsGrid: int = 21
    mainEffectsSamples: int = 1000

    def __post_init__(self):
        if any(int(s) < 5 for s in self.sizes):
            raise DataError("every scenario size must be >= 5")
        unknown = [m for m in self.methods if m not in METHOD_NAMES]
        if unknown:
            raise DataError("unknown methods: %s" % ", ".join(unknown))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "hyper", dict(self.hyper or {}))

    def ranges(self):
        if self.rangesFile is None:
            return ParamRanges.defaults()
        return ParamRanges.from_file(self.rangesFile)

    @classmethod
    def from_text(cls, text, path="<string>"):
        pairs = _parse_kv_file(text, path)
        kwargs = {}
        hyper = {}
        for key, value in pairs.items():
            if "." in key:
                method, _, option = key.partition(".")
                if method not in METHOD_NAMES:
                    raise DataError("%s: unknown method %r in override %r"
                                    % (path, method, key))
                hyper.setdefault(method, {})[option] = _parse_scalar(value)
            elif key == "sizes":
                kwargs["sizes"] = tuple(int(v) for v in value.split(","))
            elif key == "methods":
                kwargs["methods"] = tuple(v.strip()
                                          for v in value.split(","))
            elif key == "baseSeed":
                kwargs["baseSeed"] = int(value)
            elif key == "designMethod":
                kwargs["designMethod"] = value
            elif key == "ranges":
                kwargs["rangesFile"] = value
            elif key == "parallelism":
                kwargs["parallelism"] = int(value)
            elif key == "lhsIterations":
                kwargs["lhsIterations"] = int(value)
            elif key == "mainEffectsGrid":
                kwargs["mainEffectsGrid"] = int(value)
            elif key == "mainEffectsSamples":
                kwargs["mainEffectsSamples"] = int(value)
            else:
                raise DataError("%s: unknown config key %r" % (path, key))
        return cls(hyper=hyper, **kwargs)

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read(), path=str(path))


def _parse_scalar(text):
    """int if it looks integral, bool for true/false, tuple for commas,
    float otherwise, falling back to the raw string."""
    text = text.strip()
    if "," in text:
        return tuple(_parse_scalar(part) for part in text.split(","))
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


@dataclass(frozen=True)
class MethodResult:
    """One method's outcome on one scenario."""

    key: str
    displayName: str
    trainTime: float = None
    testMse: float = None
    valMse: float = None
    predicted: np.ndarray = None   # test-set predictions
    actual: np.ndarray = None      # test-set targets
    model: object = None
    error: str = None

    @property
    def failed(self):
        return self.error is not None


@dataclass(frozen=True)
class ScenarioReport:
    """All method results plus the PCA for one scenario."""

    label: int
    split: object
    results: tuple
    pca: object = None
    speedScores: dict = None
    accuracyScores: dict = None


@dataclass(frozen=True)
class AnalysisReport:
    """One or more scenario reports plus study-level main effects."""

    scenarios: tuple
    mainEffects: dict = None       # method key -> (curves, mean, variance)
    mainEffectsScenario: int = None


def compare_methods(records, config=None, label=None, progress=False):
    """Fixed-split comparison of the configured methods on one batch.

    All methods share one split; wall time is measured around the fit
    call only. A method that raises is reported failed and skipped in
    the score columns; the others are unaffected.
    """
    config = config if config is not None else ScenarioConfig()
    data = records_to_dataset(records)
    label = int(label if label is not None else data.n)
    split = split_dataset(data.n, seed=config.baseSeed)
    train = data.subset(split.trainIdx)
    val = data.subset(split.valIdx)
    test = data.subset(split.testIdx)
    results = []
    for key in config.methods:
        if progress:
            print("fitting %s (%s)" % (key, METHOD_NAMES[key]),
                  file=sys.stderr)
        overrides = config.hyper.get(key)
        start = time.perf_counter()
        try:
            model = fit_method(key, train, val, seed=config.baseSeed,
                               hyper=overrides)
        except Exception as exc:
            results.append(MethodResult(key, METHOD_NAMES[key],
                                        error=str(exc) or repr(exc)))
            print("method %s failed: %s" % (key, exc), file=sys.stderr)
            continue
        elapsed = time.perf_counter() - start
        predicted = model.predict(test.X)
        results.append(MethodResult(
            key, METHOD_NAMES[key], trainTime=elapsed,
            testMse=mse(test.y, predicted),
            valMse=mse(val.y, model.predict(val.X)),
            predicted=predicted, actual=test.y.copy(), model=model))
    ok = [r for r in results if not r.failed]
    speed = accuracy = {}
    if len(ok) >= 2:
        speed = dict(zip((r.key for r in ok), relative_scores(
            [max(r.trainTime, 1e-9) for r in ok])))
        accuracy = dict(zip((r.key for r in ok), relative_scores(
            [max(r.testMse, 1e-300) for r in ok])))
    pca = None
    try:
        matrix = np.column_stack([data.X, data.y])
        pca = pca_decompose(matrix)
    except DataError as exc:
        print("PCA skipped for scenario %s: %s" % (label, exc),
              file=sys.stderr)
    return ScenarioReport(label, split, tuple(results), pca, speed, accuracy)


def run_study(config, out_dir, progress=False):
    """design -> simulate -> compare -> analyse for every scenario size.

    Writes runs_<n>.csv per scenario plus the full report artifact set.
    Main effects come from the largest scenario's fitted models.
    """
    os.makedirs(out_dir, exist_ok=True)
    ranges = config.ranges()
    scenarios = []
    for size in config.sizes:
        if progress:
            print("scenario %d: generating %s design" %
                  (size, config.designMethod), file=sys.stderr)
        design = generate_design(config.designMethod, size, ranges,
                                 seed=_splitmix64(config.baseSeed ^ size),
                                 lhs_iterations=config.lhsIterations)
        scaled = scale_design(design, ranges)
        records = run_batch(scaled, config.baseSeed, config.parallelism,
                            progress=progress)
        write_runs_csv(os.path.join(out_dir, "runs_%d.csv" % size),
                       records, ranges.names)
        scenarios.append(compare_methods(records, config, label=size,
                                         progress=progress))
    report = AnalysisReport(tuple(scenarios))
    return emit_report(report, out_dir, config=config, ranges=ranges,
                       progress=progress)


def _attach_main_effects(report, config, ranges, progress=False):
    """Main-effect curves for every fitted model of the largest scenario."""
    biggest = max(report.scenarios, key=lambda s: s.label)
    effects = {}
    for result in biggest.results:
        if result.failed or result.model is None:
            continue
        if progress:
            print("main effects for %s" % result.key, file=sys.stderr)
        effects[result.key] = main_effects(
            result.model, ranges, grid_size=config.mainEffectsGrid,
            n_mc=config.mainEffectsSamples, seed=config.baseSeed)
    return AnalysisReport(report.scenarios, effects, biggest.label)


def write_pca_csv(path, pca, names):
    """component, eigenvalue, cumulative fraction, then one loading
    column per variable."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("component,eigenvalue,cumulative_fraction,"
                 + ",".join("loading_%s" % n for n in names) + "\n")
        for k in range(pca.eigenvalues.size):
            row = [str(k + 1), repr(float(pca.eigenvalues[k])),
                   repr(float(pca.cumulativeVarianceFraction[k]))]
            row += [repr(float(v)) for v in pca.loadings[:, k]]
            fh.write(",".join(row) + "\n")


def write_main_effects_csv(path, curves):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("parameter,grid_value,effect\n")
        for curve in curves:
            for g, e in zip(curve.gridValues, curve.effectValues):
                fh.write("%s,%s,%s\n"
                         % (curve.parameterName, repr(float(g)),
                            repr(float(e))))


def emit_report(report, out_dir, config=None, ranges=None, progress=False):
    """Write comparison.csv, spider.csv, per-method prediction files,
    per-scenario PCA files, main-effect files, and report.json."""
    os.makedirs(out_dir, exist_ok=True)
    config = config if config is not None else ScenarioConfig()
    if report.mainEffects is None and ranges is not None \
            and any(r.model is not None
                    for s in report.scenarios for r in s.results):
        report = _attach_main_effects(report, config, ranges, progress)

    with open(os.path.join(out_dir, "comparison.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("scenario,method,runtime_s,mse\n")
        for scenario in report.scenarios:
            for r in scenario.results:
                if r.failed:
                    continue
                fh.write("%d,%s,%s,%s\n" % (scenario.label, r.displayName,
                                            _format_value(r.trainTime),
                                            _format_value(r.testMse)))

    biggest = (max(report.scenarios, key=lambda s: s.label)
               if report.scenarios else None)
    with open(os.path.join(out_dir, "spider.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("method,speed_score,accuracy_score\n")
        if biggest is not None:
            for r in biggest.results:
                if r.key in (biggest.speedScores or {}):
                    fh.write("%s,%s,%s\n"
                             % (r.displayName,
                                repr(float(biggest.speedScores[r.key])),
                                repr(float(biggest.accuracyScores[r.key]))))

    seen = {}
    for scenario in report.scenarios:
        for r in scenario.results:
            if r.failed or r.predicted is None:
                continue
            seen.setdefault(r.key, []).append((scenario.label, r))
    for key, entries in seen.items():
        path = os.path.join(out_dir, "pred_vs_actual_%s.csv" % key)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("scenario,predicted,actual\n")
            for label, r in entries:
                for p, a in zip(r.predicted, r.actual):
                    fh.write("%d,%s,%s\n" % (label, repr(float(p)),
                                             repr(float(a))))

    names = tuple(ranges.names) if ranges is not None else PARAM_NAMES
    for scenario in report.scenarios:
        if scenario.pca is not None:
            write_pca_csv(
                os.path.join(out_dir, "pca_%d.csv" % scenario.label),
                scenario.pca, tuple(names) + ("output",))

    for key, (curves, _, _) in (report.mainEffects or {}).items():
        write_main_effects_csv(
            os.path.join(out_dir, "main_effects_%s.csv" % key), curves)

    with open(os.path.join(out_dir, "report.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(_report_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report


def _report_json(report):
    scenarios = []
    for scenario in report.scenarios:
        methods = []
        for r in scenario.results:
            entry = {"key": r.key, "method": r.displayName,
                     "failed": r.failed}
            if r.failed:
                entry["error"] = r.error
            else:
                entry.update(
                    runtime_s=r.trainTime, mse=r.testMse,
                    validation_mse=r.valMse,
                    speed_score=(scenario.speedScores or {}).get(r.key),
                    accuracy_score=(scenario.accuracyScores or {}).get(r.key),
                    predicted=[float(v) for v in r.predicted],
                    actual=[float(v) for v in r.actual])
            methods.append(entry)
        entry = {"scenario": scenario.label,
                 "split_sizes": {
                     "train": int(scenario.split.trainIdx.size),
                     "validation": int(scenario.split.valIdx.size),
                     "test": int(scenario.split.testIdx.size)},
                 "methods": methods}
        if scenario.pca is not None:
            entry["pca"] = {
                "eigenvalues": [float(v) for v in scenario.pca.eigenvalues],
                "cumulative_fraction": [
                    float(v)
                    for v in scenario.pca.cumulativeVarianceFraction],
                "retained": int(scenario.pca.retainedCount),
                "loadings": [[float(v) for v in row]
                             for row in scenario.pca.loadings],
            }
        scenarios.append(entry)
    out = {"scenarios": scenarios}
    if report.mainEffects:
        out["main_effects_scenario"] = report.mainEffectsScenario
        out["main_effects"] = {
            key: {
                "overall_mean": float(mean),
                "overall_variance": float(var),
                "curves": [{
                    "parameter": c.parameterName,
                    "grid": [float(v) for v in c.gridValues],
                    "effect": [float(v) for v in c.effectValues],
                } for c in curves],
            }
            for key, (curves, mean, var) in report.mainEffects.items()}
    return out
