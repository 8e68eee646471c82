"""Monte Carlo experiment runner and result serialization.

Each trial draws a signal matrix, shuffles its columns with a uniformly
random permutation, adds Gaussian noise and scores every requested
estimator against the shuffle, up to reversal.  Scoring happens after
relabeling, ``inverse(truth) o estimate`` against the identity, which is
exactly the loss the same estimator would incur on the unshuffled matrix.  Trial seeds are a
splitmix64 mix of ``(seed, grid_index, replication)``, so results do not
depend on how trials are scheduled across worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .core import Permutation, apply_columns, compose, inverse
from .errors import ConfigError, DegenerateInputError, MonopermError
from .estimators import Method, estimate
from .metrics import Metric, loss_up_to_reversal
from .models import LinearGrowthSpec, RegimeSpec, add_noise, generate_linear, generate_regime, hard_instance

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "AggregateRow",
    "TrialResult",
    "resolve_source",
    "run_trial",
    "run_experiment",
    "emit",
    "trial_seed",
]

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def trial_seed(seed: int, grid_index: int, replication: int) -> int:
    h = _splitmix64(seed & _MASK64)
    h = _splitmix64(h ^ grid_index)
    return _splitmix64(h ^ replication)


# ---------------------------------------------------------------------------
# signal sources

_SOURCE_KEYS = {
    "regime": {"kind", "regime", "alpha", "n", "p", "sigma2", "sigma", "intercept_in_log"},
    "linear": {"kind", "a", "b", "eta", "eta_gap", "n", "p", "sigma2", "sigma"},
    "hard_instance": {"kind", "hard_kind", "p", "n", "sigma", "t", "gap_scale"},
}


@dataclass(frozen=True)
class _Source:
    kind: str
    params: dict
    sigma2: float
    spec: Any

    def signal(self, seed) -> np.ndarray:
        if self.kind == "regime":
            return generate_regime(self.spec, seed)[0]
        if self.kind == "linear":
            return generate_linear(self.spec)
        return self.spec


def _as_vector(value, length, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        if length is None:
            raise ConfigError(f"scalar {name!r} needs 'n' to set its length")
        return np.full(int(length), float(arr))
    return arr


def _noise_variance(params: dict) -> float:
    """Noise variance from exactly one of ``sigma2`` (variance) or ``sigma`` (standard deviation)."""
    if ("sigma2" in params) == ("sigma" in params):
        raise ConfigError("give exactly one of 'sigma2' (variance) or 'sigma' (standard deviation)")
    if "sigma" in params:
        return float(params["sigma"]) ** 2
    return float(params["sigma2"])


def resolve_source(params: dict) -> _Source:
    """Validate one (possibly grid-overridden) source description."""
    kind = params.get("kind")
    if kind not in _SOURCE_KEYS:
        raise ConfigError(f"source 'kind' must be one of {sorted(_SOURCE_KEYS)}, got {kind!r}")
    unknown = set(params) - _SOURCE_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown keys for {kind} source: {sorted(unknown)}")
    try:
        if kind == "regime":
            missing = {"regime", "alpha", "n", "p"} - set(params)
            if missing:
                raise ConfigError(f"regime source missing keys: {sorted(missing)}")
            in_log = params.get("intercept_in_log", True)
            if not isinstance(in_log, bool):
                raise ConfigError("'intercept_in_log' must be true or false")
            spec = RegimeSpec(params["regime"], float(params["alpha"]), params["n"],
                              params["p"], _noise_variance(params), in_log)
            return _Source(kind, dict(params), spec.sigma2, spec)
        if kind == "linear":
            n, p = params.get("n"), params.get("p")
            a = _as_vector(params.get("a", 1.0), n, "a")
            b = _as_vector(params.get("b", 0.0), a.size, "b")
            if "eta" in params and "eta_gap" in params:
                raise ConfigError("give either 'eta' or 'eta_gap', not both")
            if "eta" in params:
                eta = np.asarray(params["eta"], dtype=float)
            else:
                if p is None or "eta_gap" not in params:
                    raise ConfigError("linear source needs 'eta', or 'eta_gap' together with 'p'")
                eta = float(params["eta_gap"]) * np.arange(1, int(p) + 1, dtype=float)
            spec = LinearGrowthSpec(a, b, eta)
            if n is not None and spec.n != n or p is not None and spec.p != p:
                raise ConfigError("linear source: 'n'/'p' disagree with the vector lengths")
            sigma2 = _noise_variance(params)
            if sigma2 < 0:
                raise ConfigError("sigma2 must be nonnegative")
            return _Source(kind, dict(params), sigma2, spec)
        for key in ("hard_kind", "p", "n", "sigma"):
            if key not in params:
                raise ConfigError(f"hard_instance source missing {key!r}")
        sigma = float(params["sigma"])
        theta, _ = hard_instance(int(params["p"]), int(params["n"]), sigma, params["hard_kind"],
                                 t=params.get("t"), gap_scale=float(params.get("gap_scale", 1.0)))
        return _Source(kind, dict(params), sigma * sigma, theta)
    except ConfigError:
        raise
    except (MonopermError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {kind} source: {exc}") from exc


# ---------------------------------------------------------------------------
# configuration

_CONFIG_KEYS = {"regime", "estimators", "replications", "seed", "metrics", "grid", "keep_raw"}


@dataclass
class ExperimentConfig:
    regime: dict
    estimators: list
    replications: int
    seed: int
    metrics: list = field(default_factory=lambda: ["zero_one", "kendall"])
    grid: Optional[list] = None
    keep_raw: bool = False

    def __post_init__(self):
        if not isinstance(self.regime, dict):
            raise ConfigError("'regime' must be an object describing the signal source")
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError("'replications' must be a positive integer")
        if not isinstance(self.seed, int):
            raise ConfigError("'seed' must be an integer")
        if not self.estimators or not self.metrics:
            raise ConfigError("need at least one estimator and one metric")
        try:
            self.estimators = [Method(e).value for e in self.estimators]
            self.metrics = [Metric(m).value for m in self.metrics]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if len(set(self.estimators)) != len(self.estimators) or len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("duplicate estimator or metric")
        if self.grid is not None:
            if not isinstance(self.grid, list) or not self.grid:
                raise ConfigError("'grid' must be a non-empty list of override objects")
            if not all(isinstance(g, dict) for g in self.grid):
                raise ConfigError("every grid entry must be an object")
        # fail early on any malformed grid point
        self.sources()

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"regime", "estimators", "replications", "seed"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def grid_points(self) -> list[dict]:
        overrides = self.grid or [{}]
        return [{**self.regime, **o} for o in overrides]

    def sources(self) -> list[_Source]:
        return [resolve_source(pt) for pt in self.grid_points()]

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "estimators": list(self.estimators),
            "replications": self.replications,
            "seed": self.seed,
            "metrics": list(self.metrics),
            "grid": self.grid,
            "keep_raw": self.keep_raw,
        }


# ---------------------------------------------------------------------------
# trials


@dataclass(frozen=True)
class TrialResult:
    losses: dict  # (estimator, metric) -> loss
    flagged: dict  # estimator -> bool
    errors: dict  # estimator -> message, only for failed estimators


def run_trial(source, estimators, metrics, seed: int) -> TrialResult:
    """One replication: signal, random column shuffle, noise, estimate, score."""
    if isinstance(source, dict):
        source = resolve_source(source)
    seed = int(seed) & _MASK64
    theta = source.signal([seed, 0])
    p = theta.shape[1]
    truth = Permutation(np.random.default_rng([seed, 1]).permutation(p))
    y = add_noise(apply_columns(theta, truth), source.sigma2, [seed, 2])

    identity = Permutation.identity(p)
    losses, flagged, errors = {}, {}, {}
    for name in estimators:
        try:
            out = estimate(y, name)
        except (DegenerateInputError, ArithmeticError) as exc:
            flagged[name] = True
            errors[name] = f"{type(exc).__name__}: {exc}"
            for m in metrics:
                losses[(name, m)] = 1.0
            continue
        flagged[name] = out.degenerate
        # relabel so the truth becomes the identity; raw losses against a
        # shuffled truth are not invariant to the shuffle
        relative = compose(inverse(truth), out.permutation)
        for m in metrics:
            losses[(name, m)] = float(loss_up_to_reversal(relative, identity, m)[0])
    return TrialResult(losses, flagged, errors)


def _run_chunk(args):
    params, estimators, metrics, tasks = args
    source = resolve_source(params)
    return [run_trial(source, estimators, metrics, s) for s in tasks]


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class AggregateRow:
    grid_index: int
    params: dict
    estimator: str
    metric: str
    mean: float
    se: float
    reps: int
    flagged: int


@dataclass
class ExperimentResult:
    rows: list
    raw: Optional[dict] = None  # "g|estimator|metric" -> list of losses
    errors: dict = field(default_factory=dict)  # grid_index -> messages

    def lookup(self, grid_index: int, estimator: str, metric: str) -> AggregateRow:
        for r in self.rows:
            if (r.grid_index, r.estimator, r.metric) == (grid_index, estimator, metric):
                return r
        raise KeyError((grid_index, estimator, metric))

    def to_dict(self) -> dict:
        out = {
            "rows": [
                {"grid_index": r.grid_index, "params": r.params, "estimator": r.estimator,
                 "metric": r.metric, "mean": r.mean, "se": r.se, "reps": r.reps,
                 "flagged": r.flagged}
                for r in self.rows
            ],
            "errors": {str(k): v for k, v in self.errors.items()},
        }
        if self.raw is not None:
            out["raw"] = self.raw
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentResult":
        rows = [AggregateRow(**r) for r in data["rows"]]
        errors = {int(k): v for k, v in data.get("errors", {}).items()}
        return cls(rows=rows, raw=data.get("raw"), errors=errors)


def _aggregate(values: np.ndarray) -> tuple[float, float]:
    r = values.size
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(r)) if r > 1 else 0.0
    return mean, se


def run_experiment(config: ExperimentConfig, parallelism: int = 1) -> ExperimentResult:
    """Run every (grid point, replication) trial and aggregate per estimator and metric."""
    if parallelism < 1:
        raise ConfigError("parallelism must be at least 1")
    points = config.grid_points()
    sources = config.sources()
    reps = config.replications
    jobs = []
    # chunks keep per-task overhead low while still spreading work over workers
    chunk = max(1, min(reps, math.ceil(reps * len(points) / (4 * parallelism))))
    for g, params in enumerate(points):
        seeds = [trial_seed(config.seed, g, r) for r in range(reps)]
        for lo in range(0, reps, chunk):
            jobs.append((g, (params, config.estimators, config.metrics, seeds[lo:lo + chunk])))

    if parallelism == 1:
        chunks = [
            [run_trial(sources[g], config.estimators, config.metrics, s) for s in args[3]]
            for g, args in jobs
        ]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            chunks = list(pool.map(_run_chunk, [args for _, args in jobs]))

    per_point: list[list[TrialResult]] = [[] for _ in points]
    for (g, _), trials in zip(jobs, chunks):
        per_point[g].extend(trials)

    rows, raw, errors = [], ({} if config.keep_raw else None), {}
    for g, trials in enumerate(per_point):
        msgs = sorted({msg for t in trials for msg in t.errors.values()})
        if msgs:
            errors[g] = msgs
        for est in config.estimators:
            n_flagged = sum(bool(t.flagged.get(est)) for t in trials)
            for m in config.metrics:
                values = np.array([t.losses[(est, m)] for t in trials])
                mean, se = _aggregate(values)
                rows.append(AggregateRow(g, dict(points[g]), est, m, mean, se, len(trials), n_flagged))
                if raw is not None:
                    raw[f"{g}|{est}|{m}"] = values.tolist()
    return ExperimentResult(rows=rows, raw=raw, errors=errors)


# ---------------------------------------------------------------------------
# emitters


def _param_columns(rows) -> list[str]:
    keys = set()
    for r in rows:
        keys.update(r.params)
    keys.discard("kind")
    return ["kind"] + sorted(keys)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return json.dumps(value)
    return str(value)


def _emit_csv(result: ExperimentResult) -> str:
    cols = _param_columns(result.rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["grid_index", *cols, "estimator", "metric", "mean", "se", "reps", "flagged"])
    for r in result.rows:
        w.writerow([r.grid_index, *(_cell(r.params.get(c)) for c in cols), r.estimator, r.metric,
                    repr(r.mean), repr(r.se), r.reps, r.flagged])
    return buf.getvalue()


def emit_raw_csv(result: ExperimentResult) -> str:
    """Per-replication losses, one row per (grid point, replication, estimator, metric)."""
    if result.raw is None:
        raise ConfigError("result holds no raw losses (set keep_raw)")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["grid_index", "replication", "estimator", "metric", "loss"])
    for key, values in result.raw.items():
        g, est, m = key.split("|")
        for i, v in enumerate(values):
            w.writerow([g, i, est, m, repr(float(v))])
    return buf.getvalue()


def _emit_json(result: ExperimentResult) -> str:
    return json.dumps(result.to_dict(), sort_keys=True, indent=2) + "\n"


def _column_label(params: dict, varying: list[str]) -> str:
    if params.get("kind") == "regime":
        noise = f"σ²={params['sigma2']}" if "sigma2" in params else f"σ={params['sigma']}"
        head = f"{params['regime']}({noise})"
        rest = [k for k in varying if k not in ("regime", "sigma2", "sigma", "intercept_in_log")]
    else:
        head = params.get("kind", "")
        rest = varying
    return " ".join([head, *(f"{k}={params[k]}" for k in rest)]).strip()


def _emit_markdown(result: ExperimentResult, metric: str = "zero_one") -> str:
    rows = [r for r in result.rows if r.metric == metric]
    if not rows:
        raise ConfigError(f"no rows for metric {metric!r}")
    grid = sorted({r.grid_index for r in rows})
    params = {r.grid_index: r.params for r in rows}
    keys = sorted({k for p in params.values() for k in p if k != "kind"})
    varying = [k for k in keys if len({_cell(params[g].get(k)) for g in grid}) > 1]
    estimators = list(dict.fromkeys(r.estimator for r in rows))
    table = {(r.grid_index, r.estimator): r.mean for r in rows}
    lines = [
        "| estimator | " + " | ".join(_column_label(params[g], varying) for g in grid) + " |",
        "|---|" + "---:|" * len(grid),
    ]
    for est in estimators:
        lines.append(f"| {est} | " + " | ".join(f"{table[(g, est)]:.3f}" for g in grid) + " |")
    return "\n".join(lines) + "\n"


def emit(result: ExperimentResult, format: str = "csv") -> str:
    if not result.rows:
        raise ConfigError("cannot emit an empty result")
    if format == "csv":
        return _emit_csv(result)
    if format == "json":
        return _emit_json(result)
    if format in ("markdown", "markdown_table"):
        return _emit_markdown(result)
    raise ConfigError(f"unknown format {format!r}")
