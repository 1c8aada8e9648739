"""Randomized-trial experiment protocol and reporting.

A run repeats every configured debiasing condition over seeded trials
(default 30). Each trial samples a fresh pair subset (default 8 pairs)
per bias dimension, debiases a copy of the vanilla embedding, and
measures coherence/quality per evaluation attribute (always against the
attribute's full pair list) plus optional utility benchmarks. Per-metric
aggregates carry the mean, sample standard deviation and a Student-t
confidence interval; the vanilla embedding is evaluated once as the
baseline column.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import __version__
from .bias_metrics import SynonymLexicon, ect, eqt, filter_professions, load_professions
from .debias import METHODS, DebiasSpec, load_token_set, run_pipeline
from .embedding_store import EmbeddingMatrix, load_embeddings
from .errors import DataError, DebiasError, UsageError
from .quality_bench import (
    analogy_accuracy,
    load_analogy_dataset,
    load_similarity_dataset,
    similarity_score,
)
from .resources import BUILTIN_PAIR_SETS, builtin_lexicon, builtin_pair_set, builtin_professions
from .subspace import load_pair_set, restrict_to_vocabulary

TSV_HEADER = "method\tattribute\tmetric\tmean\tstd\tci_lo\tci_hi\tn"
BENCH_ATTRIBUTE = "all"  # attribute label for whole-embedding utility rows


def confidence_interval(values, level: float = 0.95) -> tuple[float, float]:
    """Student-t confidence interval: mean +/- t_{n-1} * s / sqrt(n)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) < 2:
        raise DataError("confidence interval needs at least 2 values")
    if not 0.0 < level < 1.0:
        raise UsageError(f"confidence level must be in (0, 1), got {level}")
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    if sd == 0.0:
        return (mean, mean)
    half = float(stats.t.ppf((1.0 + level) / 2.0, len(values) - 1)) * sd / math.sqrt(len(values))
    return (mean - half, mean + half)


@dataclass(frozen=True)
class MethodCondition:
    """One column of the method matrix.

    ``dimensions`` is either the literal string "same" (debias each
    evaluation attribute with its own pair list) or an ordered list of
    pair-set names applied as one pipeline. ``attributes`` optionally
    restricts which evaluation attributes the condition covers (the
    hard-debias column is typically restricted to gender, which is the
    only attribute with usable equality sets).
    """

    name: str
    method: str
    dimensions: str | tuple[str, ...]
    sigma: float = 1.0
    attributes: tuple[str, ...] | None = None
    benchmarks: bool = True
    hd_neutral_file: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise UsageError(f"method condition {self.name!r}: unknown method {self.method!r}")
        if isinstance(self.dimensions, str):
            if self.dimensions != "same":
                raise UsageError(
                    f"method condition {self.name!r}: dimensions must be \"same\" or a list"
                )
        else:
            object.__setattr__(self, "dimensions", tuple(self.dimensions))
            if not self.dimensions:
                raise UsageError(f"method condition {self.name!r}: empty dimension list")
        if self.attributes is not None:
            object.__setattr__(self, "attributes", tuple(self.attributes))


@dataclass(frozen=True)
class ExperimentConfig:
    embedding: str
    methods: tuple[MethodCondition, ...]
    attributes: tuple[str, ...] = ("gender", "race", "age")
    trials: int = 30
    sample_size: int = 8
    base_seed: int = 0
    professions: str | None = None  # None -> shipped default list
    lexicon: str | None = None
    pair_files: dict = field(default_factory=dict)  # name -> path overrides
    analogy_benchmarks: dict = field(default_factory=dict)  # name -> path
    similarity_benchmarks: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        if not self.embedding:
            raise UsageError("config is missing the embedding path")
        if self.trials < 1:
            raise UsageError(f"trials must be >= 1, got {self.trials}")
        if self.sample_size < 1:
            raise UsageError(f"sample_size must be >= 1, got {self.sample_size}")
        if self.base_seed < 0:
            raise UsageError("base_seed must be nonnegative")
        if not self.methods:
            raise UsageError("config must list at least one method condition")
        if not self.attributes:
            raise UsageError("config must list at least one evaluation attribute")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate method condition names: {names}")
        if "vanilla" in names:
            raise UsageError('"vanilla" is reserved for the baseline column')
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "attributes", tuple(self.attributes))


def load_config(path) -> ExperimentConfig:
    """Parse a JSON experiment config; relative paths are resolved
    against the config file's directory."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: config must be a JSON object")
    base = path.parent

    def resolve(p):
        return str((base / p).resolve()) if p is not None else None

    methods = []
    for entry in raw.get("methods", []):
        if not isinstance(entry, dict):
            raise DataError(f"{path}: each method entry must be an object")
        dims = entry.get("dimensions", "same")
        methods.append(
            MethodCondition(
                name=entry.get("name") or entry.get("method", ""),
                method=entry.get("method", ""),
                dimensions=dims if isinstance(dims, str) else tuple(dims),
                sigma=float(entry.get("sigma", 1.0)),
                attributes=tuple(entry["attributes"]) if "attributes" in entry else None,
                benchmarks=bool(entry.get("benchmarks", True)),
                hd_neutral_file=resolve(entry.get("hd_neutral_file")),
            )
        )
    benchmarks = raw.get("benchmarks", {})
    return ExperimentConfig(
        embedding=resolve(raw.get("embedding")),
        methods=tuple(methods),
        attributes=tuple(raw.get("attributes", ("gender", "race", "age"))),
        trials=int(raw.get("trials", 30)),
        sample_size=int(raw.get("sample_size", 8)),
        base_seed=int(raw.get("base_seed", 0)),
        professions=resolve(raw.get("professions")),
        lexicon=resolve(raw.get("lexicon")),
        pair_files={k: resolve(v) for k, v in raw.get("pair_files", {}).items()},
        analogy_benchmarks={k: resolve(v) for k, v in benchmarks.get("analogy", {}).items()},
        similarity_benchmarks={k: resolve(v) for k, v in benchmarks.get("similarity", {}).items()},
        output=resolve(raw.get("output")),
    )


@dataclass(frozen=True)
class MetricSeries:
    method: str
    attribute: str
    metric: str
    values: tuple[float, ...]
    mean: float
    std: float
    ci_lower: float
    ci_upper: float
    n: int


@dataclass(frozen=True)
class ExperimentReport:
    tool: str
    version: str
    base_seed: int
    ci_level: float
    ci_method: str
    config: dict
    baseline: dict
    series: tuple[MetricSeries, ...]

    def to_json_bytes(self) -> bytes:
        payload = {
            "tool": self.tool,
            "version": self.version,
            "base_seed": self.base_seed,
            "ci_level": self.ci_level,
            "ci_method": self.ci_method,
            "config": self.config,
            "baseline": self.baseline,
            "results": [asdict(s) for s in self.series],
        }
        return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")

    def to_tsv(self) -> str:
        lines = [TSV_HEADER]
        for attribute, metrics in sorted(self.baseline.items()):
            for metric, value in sorted(metrics.items()):
                lines.append(
                    f"vanilla\t{attribute}\t{metric}\t{value!r}\t0.0\t{value!r}\t{value!r}\t1"
                )
        for s in self.series:
            lines.append(
                f"{s.method}\t{s.attribute}\t{s.metric}\t{s.mean!r}\t{s.std!r}"
                f"\t{s.ci_lower!r}\t{s.ci_upper!r}\t{s.n}"
            )
        return "\n".join(lines) + "\n"


def report_from_json(data: bytes | str) -> ExperimentReport:
    payload = json.loads(data)
    series = tuple(
        MetricSeries(
            method=s["method"],
            attribute=s["attribute"],
            metric=s["metric"],
            values=tuple(s["values"]),
            mean=s["mean"],
            std=s["std"],
            ci_lower=s["ci_lower"],
            ci_upper=s["ci_upper"],
            n=s["n"],
        )
        for s in payload["results"]
    )
    return ExperimentReport(
        tool=payload["tool"],
        version=payload["version"],
        base_seed=payload["base_seed"],
        ci_level=payload["ci_level"],
        ci_method=payload["ci_method"],
        config=payload["config"],
        baseline=payload["baseline"],
        series=series,
    )


def emit_report(report: ExperimentReport, fmt: str, path) -> None:
    if fmt == "json":
        Path(path).write_bytes(report.to_json_bytes())
    elif fmt == "tsv":
        Path(path).write_text(report.to_tsv(), encoding="utf-8")
    else:
        raise UsageError(f"unknown report format {fmt!r}; expected json or tsv")


class _Workspace:
    """Everything loaded and vocabulary-filtered once per run."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.embedding = load_embeddings(config.embedding)

        needed = set(config.attributes)
        for m in config.methods:
            if not isinstance(m.dimensions, str):
                needed.update(m.dimensions)
        self.pair_sets = {}
        for name in sorted(needed):
            if name in config.pair_files:
                loaded = load_pair_set(config.pair_files[name], name)
            elif name in BUILTIN_PAIR_SETS:
                loaded = builtin_pair_set(name)
            else:
                raise UsageError(
                    f"pair set {name!r} is not built in and has no pair_files entry"
                )
            self.pair_sets[name] = restrict_to_vocabulary(loaded, self.embedding)

        professions = (
            load_professions(config.professions) if config.professions else builtin_professions()
        )
        self.professions = filter_professions(professions, self.embedding)
        self.lexicon = SynonymLexicon.load(config.lexicon) if config.lexicon else builtin_lexicon()

        self.analogy_sets = {
            name: load_analogy_dataset(p, name) for name, p in sorted(config.analogy_benchmarks.items())
        }
        self.similarity_sets = {
            name: load_similarity_dataset(p, name)
            for name, p in sorted(config.similarity_benchmarks.items())
        }
        self.neutral_overrides = {
            m.name: load_token_set(m.hd_neutral_file)
            for m in config.methods
            if m.hd_neutral_file is not None
        }

    def eval_attributes(self, condition: MethodCondition) -> tuple[str, ...]:
        if condition.attributes is None:
            return self.config.attributes
        return tuple(a for a in self.config.attributes if a in condition.attributes)

    def debias_spec(self, condition: MethodCondition, attribute: str | None) -> DebiasSpec:
        if isinstance(condition.dimensions, str):  # "same"
            dims = (self.pair_sets[attribute],)
        else:
            dims = tuple(self.pair_sets[d] for d in condition.dimensions)
        return DebiasSpec(
            method=condition.method,
            dimensions=dims,
            pp_sigma=condition.sigma,
            hd_neutral_tokens=self.neutral_overrides.get(condition.name),
        )

    def bias_metrics(self, emb: EmbeddingMatrix, attribute: str) -> dict[str, float]:
        pairs = self.pair_sets[attribute]
        return {
            "ect": ect(emb, pairs, self.professions),
            "eqt": eqt(emb, pairs, self.professions, self.lexicon),
        }

    def utility_metrics(self, emb: EmbeddingMatrix) -> dict[str, float]:
        out = {}
        for name, ds in self.analogy_sets.items():
            out[f"analogy_{name}"] = analogy_accuracy(emb, ds).accuracy
        for name, ds in self.similarity_sets.items():
            out[f"similarity_{name}"] = similarity_score(emb, ds).rho
        return out


def _with_context(exc: Exception, context: str) -> Exception:
    exc.args = (f"{context}: {exc}",)
    return exc


def _run_trial(ws: _Workspace, trial: int) -> dict[tuple[str, str, str], float]:
    """One seeded trial: debias and measure every condition."""
    seed = ws.config.base_seed + trial
    out: dict[tuple[str, str, str], float] = {}
    for condition in ws.config.methods:
        is_same = isinstance(condition.dimensions, str)
        try:
            if is_same:
                for attribute in ws.eval_attributes(condition):
                    spec = ws.debias_spec(condition, attribute)
                    debiased = run_pipeline(ws.embedding, spec, seed, ws.config.sample_size)
                    for metric, value in ws.bias_metrics(debiased, attribute).items():
                        out[(condition.name, attribute, metric)] = value
                    if condition.benchmarks:
                        for metric, value in ws.utility_metrics(debiased).items():
                            out[(condition.name, attribute, metric)] = value
            else:
                spec = ws.debias_spec(condition, None)
                debiased = run_pipeline(ws.embedding, spec, seed, ws.config.sample_size)
                for attribute in ws.eval_attributes(condition):
                    for metric, value in ws.bias_metrics(debiased, attribute).items():
                        out[(condition.name, attribute, metric)] = value
                if condition.benchmarks:
                    for metric, value in ws.utility_metrics(debiased).items():
                        out[(condition.name, BENCH_ATTRIBUTE, metric)] = value
        except DebiasError as exc:
            raise _with_context(exc, f"trial {trial}, method {condition.name!r}")
    return out


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentReport:
    """Execute the full protocol and aggregate per-metric series.

    Trials are independent given their seeds (base_seed + trial index),
    so they may run in a thread pool; aggregation always happens in
    trial order and the report is identical for any worker count.
    """
    ws = _Workspace(config)

    baseline: dict[str, dict[str, float]] = {}
    for attribute in config.attributes:
        baseline[attribute] = ws.bias_metrics(ws.embedding, attribute)
    utility = ws.utility_metrics(ws.embedding)
    if utility:
        baseline[BENCH_ATTRIBUTE] = utility

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trial_results = list(pool.map(lambda t: _run_trial(ws, t), range(config.trials)))
    else:
        trial_results = [_run_trial(ws, t) for t in range(config.trials)]

    # every trial produces the same key set; keep first-trial order
    series = []
    for key in trial_results[0]:
        method, attribute, metric = key
        values = tuple(result[key] for result in trial_results)
        if len(values) >= 2:
            ci_lower, ci_upper = confidence_interval(values, 0.95)
            std = float(np.std(values, ddof=1))
        else:
            ci_lower = ci_upper = values[0]
            std = 0.0
        series.append(
            MetricSeries(
                method=method,
                attribute=attribute,
                metric=metric,
                values=values,
                mean=float(np.mean(values)),
                std=std,
                ci_lower=ci_lower,
                ci_upper=ci_upper,
                n=len(values),
            )
        )

    return ExperimentReport(
        tool="debiaskit",
        version=__version__,
        base_seed=config.base_seed,
        ci_level=0.95,
        ci_method="student-t",
        config=_config_echo(config),
        baseline=baseline,
        series=tuple(series),
    )


def _config_echo(config: ExperimentConfig) -> dict:
    # normalized to plain JSON types so a report round-trips to equality
    return json.loads(json.dumps(asdict(config), sort_keys=True))
