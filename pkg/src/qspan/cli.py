"""Reproducible experiment runner.

One entry point (``qspan`` on the command line, :func:`run_experiment`
from code) drives every survey the package supports: walk critical
strides, percolation thresholds, overlap concentration, device
accessibility, and the fitted scaling laws on top of the first two.

Reproducibility contract: every trial draws from its own substream,
keyed by (master seed, experiment kind, qubit count, step count, trial
index), so results are identical however trials are scheduled across
workers.  Outputs embed the full configuration and seed; rereading an
emitted file with :func:`read_result` reproduces the result set exactly,
value for value.  Floating-point values are printed with 17 significant
digits, which round-trips float64.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .accessibility import DeviceParams, assess
from .analysis import (
    FitError,
    empirical_concentration,
    fit_exponent_scaling,
    fit_power_law,
    fit_saturating_power_law,
)
from .percolation import (
    ExperimentFailureError,
    InsufficientPointsError,
    critical_threshold_sample,
)
from .walk import critical_step_for_trial

__all__ = [
    "EXPERIMENT_KINDS",
    "UsageError",
    "FileError",
    "ExperimentConfig",
    "ResultSet",
    "run_experiment",
    "emit",
    "render",
    "read_result",
    "main",
]

EXPERIMENT_KINDS = (
    "walk-critical",
    "percolation-critical",
    "concentration",
    "accessibility",
    "fit",
)

# Stable per-kind integers entering the substream keys.  The fit
# experiment reuses the code of the survey it runs, so a fit over a
# given grid and seed sees exactly the rows of the plain survey.
_KIND_CODES = {
    "walk-critical": 1,
    "percolation-critical": 2,
    "concentration": 3,
    "accessibility": 4,
}

#: Walk-stride fits drop step counts below this (the shortest walks sit
#: visibly off the power law).
_WALK_FIT_MIN_STEPS = 3


class UsageError(ValueError):
    """The supplied configuration cannot be run."""


class FileError(RuntimeError):
    """An output file could not be written or an input file read."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path


def _int_tuple(value, field: str) -> tuple[int, ...]:
    try:
        items = tuple(int(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{field}: expected integers, got {value!r}") from exc
    if not items:
        raise UsageError(f"{field}: list must not be empty")
    return items


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one experiment run.

    ``steps`` is the step-count list M for walk experiments and doubles
    as the cloud-size list for percolation experiments (one threshold
    survey per (qubits, size) pair).  ``epsilon_mode`` is "paper" for
    the dimension-tied success margin or "fixed" with an explicit
    ``epsilon``; concentration always needs an explicit epsilon (there
    it is the overlap deviation, not a span margin).  Device parameters
    are only read by the accessibility experiment.
    """

    kind: str
    qubits: tuple = (1,)
    steps: tuple = (10,)
    trials: int | None = None
    samples: int | None = None
    epsilon_mode: str = "paper"
    epsilon: float | None = None
    exact_step: bool = False
    seed: int = 0
    workers: int = 1
    out: str | None = None
    format: str = "csv"
    j_over_h_hz: float = 5.0e9
    t_decoherence_s: float = 10.0e-9
    t_evolution_s: float = 5.0e-6
    c_constant: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise UsageError(
                f"kind: unknown experiment {self.kind!r}; "
                f"expected one of {', '.join(EXPERIMENT_KINDS)}"
            )
        object.__setattr__(self, "qubits", _int_tuple(self.qubits, "qubits"))
        object.__setattr__(self, "steps", _int_tuple(self.steps, "steps"))
        if any(q < 1 for q in self.qubits):
            raise UsageError(f"qubits: counts must be >= 1, got {list(self.qubits)}")
        if any(m < 1 for m in self.steps):
            raise UsageError(f"steps: counts must be >= 1, got {list(self.steps)}")
        for name in ("trials", "samples"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name}: must be >= 1, got {v}")
        if self.epsilon_mode not in ("paper", "fixed"):
            raise UsageError(f"epsilon_mode: expected paper or fixed, got {self.epsilon_mode!r}")
        if self.epsilon_mode == "fixed" and self.epsilon is None:
            raise UsageError("epsilon: fixed mode needs a numeric value")
        if self.epsilon_mode == "paper" and self.epsilon is not None:
            raise UsageError("epsilon: paper mode derives the margin; drop the numeric value")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise UsageError(f"seed: must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError(f"seed: must fit in 64 bits, got {self.seed}")
        if self.workers < 1:
            raise UsageError(f"workers: must be >= 1, got {self.workers}")
        if self.format not in ("csv", "json"):
            raise UsageError(f"format: expected csv or json, got {self.format!r}")
        for name in ("j_over_h_hz", "t_decoherence_s", "t_evolution_s", "c_constant"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name}: must be positive, got {getattr(self, name)}")

        if self.kind == "walk-critical" and self.trials is None:
            raise UsageError("trials: walk-critical needs --trials")
        if self.kind == "percolation-critical" and self.samples is None:
            raise UsageError("samples: percolation-critical needs --samples")
        if self.kind == "concentration":
            if self.samples is None:
                raise UsageError("samples: concentration needs --samples")
            if self.epsilon is None:
                raise UsageError("epsilon: concentration needs a numeric --epsilon")
        if self.kind == "fit" and (self.trials is None) == (self.samples is None):
            raise UsageError(
                "fit: give exactly one of --trials (walk strides) or "
                "--samples (percolation thresholds)"
            )

    def as_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            d[f.name] = list(v) if isinstance(v, tuple) else v
        return d


@dataclass(frozen=True)
class ResultSet:
    """Rows plus the metadata needed to regenerate them.

    ``metadata`` carries the experiment kind, artifact version, master
    seed, wall-clock seconds, and a full echo of the configuration.
    ``rows`` are plain dicts with an experiment-specific fixed key
    order; ``fits`` are summary dicts, empty unless a fit was requested.
    """

    metadata: dict
    rows: tuple
    fits: tuple = ()


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _map_tasks(fn, tasks: list, workers: int) -> list:
    """Order-preserving map, fanned out over processes when asked."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _walk_trial_task(task):
    qubits, steps, seed_seq, epsilon_mode, epsilon, exact_step = task
    t = critical_step_for_trial(
        qubits,
        steps,
        seed_seq,
        epsilon_mode=epsilon_mode,
        epsilon=epsilon,
        exact_step=exact_step,
    )
    return t.value, t.censored


def _percolation_sample_task(task):
    qubits, n_points, seed_seq = task
    return critical_threshold_sample(qubits, n_points, seed_seq)


def _walk_rows(config: ExperimentConfig) -> list:
    code = _KIND_CODES["walk-critical"]
    tasks = []
    keys = []
    for n in config.qubits:
        for m in config.steps:
            base = np.random.SeedSequence([config.seed, code, n, m])
            for i, ss in enumerate(base.spawn(config.trials)):
                tasks.append((n, m, ss, config.epsilon_mode, config.epsilon, config.exact_step))
                keys.append((n, m, i))
    outcomes = _map_tasks(_walk_trial_task, tasks, config.workers)
    return [
        {
            "qubits": n,
            "steps": m,
            "trial": i,
            "critical_delta_s": float(value),
            "censored": bool(censored),
        }
        for (n, m, i), (value, censored) in zip(keys, outcomes)
    ]


def _percolation_rows(config: ExperimentConfig) -> list:
    code = _KIND_CODES["percolation-critical"]
    tasks = []
    keys = []
    for n in config.qubits:
        for p in config.steps:
            base = np.random.SeedSequence([config.seed, code, n, p])
            for i, ss in enumerate(base.spawn(config.samples)):
                tasks.append((n, p, ss))
                keys.append((n, p, i))
    thresholds = _map_tasks(_percolation_sample_task, tasks, config.workers)
    rows = []
    found: dict = {}
    for (n, p, i), value in zip(keys, thresholds):
        rows.append(
            {
                "qubits": n,
                "points": p,
                "sample": i,
                "critical_delta_s": None if value is None else float(value),
                "is_none": value is None,
            }
        )
        found[(n, p)] = found.get((n, p), False) or value is not None
    for (n, p), any_found in found.items():
        if not any_found:
            raise ExperimentFailureError(
                f"no percolating threshold in any of {config.samples} samples "
                f"(qubits={n}, points={p})"
            )
    return rows


def _concentration_rows(config: ExperimentConfig) -> list:
    code = _KIND_CODES["concentration"]
    rows = []
    for n in config.qubits:
        report = empirical_concentration(
            2**n,
            config.epsilon,
            config.samples,
            np.random.SeedSequence([config.seed, code, n]),
        )
        rows.append(
            {
                "dimension": report.dim,
                "epsilon": report.epsilon,
                "bound": report.bound,
                "empirical": report.empirical_probability,
                "samples": report.samples,
            }
        )
    return rows


def _accessibility_rows(config: ExperimentConfig) -> list:
    rows = []
    for n in config.qubits:
        report = assess(
            DeviceParams(
                n_qubits=n,
                j_over_h=config.j_over_h_hz,
                t_decoherence=config.t_decoherence_s,
                t_evolution=config.t_evolution_s,
                c_constant=config.c_constant,
            )
        )
        rows.append(
            {
                "qubits": n,
                "j_over_h_hz": config.j_over_h_hz,
                "t_d_s": config.t_decoherence_s,
                "t_f_s": config.t_evolution_s,
                "index": report.index,
                "passes": report.passes,
                "n_max": report.n_max,
            }
        )
    return rows


def _group_means(rows: list, group_key: str, value_key: str, keep) -> dict:
    """Mean of ``value_key`` per (qubits, group_key) over rows passing ``keep``."""
    sums: dict = {}
    for row in rows:
        if not keep(row):
            continue
        k = (row["qubits"], row[group_key])
        s, c = sums.get(k, (0.0, 0))
        sums[k] = (s + row[value_key], c + 1)
    return {k: s / c for k, (s, c) in sums.items()}


def _power_law_fit_dict(label: str, qubits: int, x: list, y: list) -> dict:
    fit = fit_power_law(x, y)
    return {
        "fit": label,
        "qubits": qubits,
        "amplitude": fit.amplitude,
        "exponent": fit.exponent,
        "amplitude_stderr": fit.amplitude_stderr,
        "exponent_stderr": fit.exponent_stderr,
        "rss": fit.rss,
        "n_points": fit.n_points,
    }


def _scaling_fit_dict(label: str, x: list, y: list) -> dict:
    fit = fit_exponent_scaling(x, y)
    return {
        "fit": label,
        "amplitude": fit.amplitude,
        "exponent": fit.exponent,
        "amplitude_stderr": fit.amplitude_stderr,
        "exponent_stderr": fit.exponent_stderr,
        "rss": fit.rss,
        "n_points": fit.n_points,
    }


def _walk_fits(config: ExperimentConfig, rows: list) -> list:
    means = _group_means(
        rows, "steps", "critical_delta_s", keep=lambda r: not r["censored"]
    )
    fits = []
    per_qubits: dict = {}
    for n in config.qubits:
        pts = [
            (m, means[(n, m)])
            for m in config.steps
            if m >= _WALK_FIT_MIN_STEPS and (n, m) in means
        ]
        if len(pts) < 2:
            continue
        d = _power_law_fit_dict(
            "stride-power-law", n, [p[0] for p in pts], [p[1] for p in pts]
        )
        fits.append(d)
        per_qubits[n] = d
    if len(per_qubits) >= 2:
        ns = sorted(per_qubits)
        fits.append(
            _scaling_fit_dict(
                "amplitude-vs-qubits", ns, [per_qubits[n]["amplitude"] for n in ns]
            )
        )
        fits.append(
            _scaling_fit_dict(
                "exponent-vs-qubits", ns, [per_qubits[n]["exponent"] for n in ns]
            )
        )
    return fits


def _percolation_fits(config: ExperimentConfig, rows: list) -> list:
    means = _group_means(
        rows, "points", "critical_delta_s", keep=lambda r: not r["is_none"]
    )
    fits = []
    per_qubits: dict = {}
    for n in config.qubits:
        pts = [(p, means[(n, p)]) for p in config.steps if (n, p) in means]
        if len(pts) < 2:
            continue
        d = _power_law_fit_dict(
            "threshold-power-law", n, [p[0] for p in pts], [p[1] for p in pts]
        )
        fits.append(d)
        per_qubits[n] = d
    if len(per_qubits) >= 2:
        ns = sorted(per_qubits)
        dims = [2**n for n in ns]
        fits.append(
            _scaling_fit_dict(
                "exponent-vs-dimension", dims, [per_qubits[n]["exponent"] for n in ns]
            )
        )
        if len(per_qubits) >= 4:
            sat = fit_saturating_power_law(
                dims, [per_qubits[n]["amplitude"] for n in ns]
            )
            fits.append(
                {
                    "fit": "amplitude-saturation",
                    "gamma": sat.gamma,
                    "alpha": sat.alpha,
                    "beta": sat.beta,
                    "gamma_stderr": sat.gamma_stderr,
                    "alpha_stderr": sat.alpha_stderr,
                    "beta_stderr": sat.beta_stderr,
                    "rss": sat.rss,
                    "n_points": sat.n_points,
                    "converged": sat.converged,
                }
            )
    return fits


def run_experiment(config: ExperimentConfig) -> ResultSet:
    """Run the configured experiment and collect rows plus fit summaries.

    Deterministic for a fixed (seed, config) whatever the worker count.
    Module-level failures (no percolating threshold anywhere, degenerate
    fits) propagate with experiment context attached.
    """
    start = time.perf_counter()
    fits: list = []
    if config.kind == "walk-critical":
        rows = _walk_rows(config)
    elif config.kind == "percolation-critical":
        rows = _percolation_rows(config)
    elif config.kind == "concentration":
        rows = _concentration_rows(config)
    elif config.kind == "accessibility":
        rows = _accessibility_rows(config)
    else:  # fit
        if config.trials is not None:
            rows = _walk_rows(config)
            fits = _walk_fits(config, rows)
        else:
            rows = _percolation_rows(config)
            fits = _percolation_fits(config, rows)
    rows = [{k: _finite_or_none(v) for k, v in row.items()} for row in rows]
    fits = [{k: _finite_or_none(v) for k, v in fit.items()} for fit in fits]
    metadata = {
        "kind": config.kind,
        "artifact_version": __version__,
        "seed": config.seed,
        "wall_clock_s": time.perf_counter() - start,
        "config": config.as_dict(),
    }
    if config.kind == "fit":
        metadata["fit_weighting"] = "unweighted"
    return ResultSet(metadata=metadata, rows=tuple(rows), fits=tuple(fits))


# --- serialization ---------------------------------------------------------

_CSV_COLUMNS = {
    "walk-critical": ("qubits", "steps", "trial", "critical_delta_s", "censored"),
    "percolation-critical": ("qubits", "points", "sample", "critical_delta_s", "is_none"),
    "concentration": ("dimension", "epsilon", "bound", "empirical", "samples"),
    "accessibility": ("qubits", "j_over_h_hz", "t_d_s", "t_f_s", "index", "passes", "n_max"),
}

_COLUMN_TYPES = {
    "qubits": int,
    "steps": int,
    "trial": int,
    "points": int,
    "sample": int,
    "dimension": int,
    "samples": int,
    "critical_delta_s": float,
    "epsilon": float,
    "bound": float,
    "empirical": float,
    "j_over_h_hz": float,
    "t_d_s": float,
    "t_f_s": float,
    "index": float,
    "n_max": float,
    "censored": bool,
    "is_none": bool,
    "passes": bool,
}


def _row_columns(result: ResultSet) -> tuple:
    kind = result.metadata["kind"]
    if kind == "fit":
        kind = "walk-critical" if result.metadata["config"]["trials"] is not None \
            else "percolation-critical"
    return _CSV_COLUMNS[kind]


def _json_text(obj) -> str:
    """Compact JSON with floats at 17 significant digits."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return repr(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(
            f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items()
        ) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render(result: ResultSet, format: str) -> str:
    """Serialize a result set to CSV or JSON text."""
    if format == "json":
        return _json_text(
            {
                "metadata": result.metadata,
                "fits": list(result.fits),
                "rows": list(result.rows),
            }
        ) + "\n"
    if format != "csv":
        raise UsageError(f"format: expected csv or json, got {format!r}")
    columns = _row_columns(result)
    lines = ["# qspan-result " + _json_text(result.metadata)]
    for fit in result.fits:
        lines.append("# fit " + _json_text(fit))
    lines.append(",".join(columns))
    for row in result.rows:
        lines.append(",".join(_csv_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def emit(result: ResultSet, format: str, path: str) -> str:
    """Write the rendered result set to ``path`` and return the path."""
    text = render(result, format)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise FileError(path, str(exc)) from exc
    return path


def _typed_cell(column: str, cell: str):
    if cell == "":
        return None
    kind = _COLUMN_TYPES.get(column, str)
    if kind is bool:
        if cell not in ("true", "false"):
            raise ValueError(f"column {column}: expected true/false, got {cell!r}")
        return cell == "true"
    return kind(cell)


def read_result(path: str) -> ResultSet:
    """Parse a file written by :func:`emit` back into an equal ResultSet."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileError(path, str(exc)) from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        return ResultSet(
            metadata=doc["metadata"],
            rows=tuple(doc["rows"]),
            fits=tuple(doc["fits"]),
        )
    metadata = None
    fits = []
    header = None
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("# qspan-result "):
            metadata = json.loads(line[len("# qspan-result "):])
        elif line.startswith("# fit "):
            fits.append(json.loads(line[len("# fit "):]))
        elif line.startswith("#"):
            continue
        elif header is None:
            header = line.split(",")
        else:
            cells = line.split(",")
            if len(cells) != len(header):
                raise ValueError(f"{path}: row width {len(cells)} != header {len(header)}")
            rows.append({c: _typed_cell(c, v) for c, v in zip(header, cells)})
    if metadata is None or header is None:
        raise ValueError(f"{path}: not a result file (missing metadata or header)")
    return ResultSet(metadata=metadata, rows=tuple(rows), fits=tuple(fits))


# --- command line ----------------------------------------------------------

def _parse_int_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


_CONFIG_PARSERS = {
    "experiment": str,
    "qubits": _parse_int_list,
    "steps": _parse_int_list,
    "trials": int,
    "samples": int,
    "epsilon": str,
    "exact_step": lambda s: s.lower() in ("1", "true", "yes", "on"),
    "seed": int,
    "workers": int,
    "out": str,
    "format": str,
    "j_over_h_hz": float,
    "t_decoherence_s": float,
    "t_evolution_s": float,
    "c_constant": float,
}

_DEFAULTS = {
    "experiment": None,
    "qubits": [1],
    "steps": [10],
    "trials": None,
    "samples": None,
    "epsilon": "paper",
    "exact_step": False,
    "seed": 0,
    "workers": 1,
    "out": None,
    "format": "csv",
    "j_over_h_hz": 5.0e9,
    "t_decoherence_s": 10.0e-9,
    "t_evolution_s": 5.0e-6,
    "c_constant": 1.0,
}


def _read_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config: {path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_PARSERS:
            raise UsageError(f"config: {path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config: {path}:{lineno}: {exc}") from exc
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qspan",
        description=(
            "Run a reproducible survey: walk critical strides, percolation "
            "thresholds, overlap concentration, device accessibility, or "
            "fitted scaling laws (fit over walk strides with --trials, over "
            "percolation thresholds with --samples)."
        ),
    )
    parser.add_argument("--experiment", choices=EXPERIMENT_KINDS, help="experiment kind")
    parser.add_argument("--qubits", type=_parse_int_list, help="comma-separated qubit counts")
    parser.add_argument(
        "--steps",
        type=_parse_int_list,
        help="comma-separated step counts (cloud sizes for percolation)",
    )
    parser.add_argument("--trials", type=int, help="walk trials per (qubits, steps) cell")
    parser.add_argument("--samples", type=int, help="samples per cell (percolation/concentration)")
    parser.add_argument(
        "--epsilon",
        help="success margin: 'paper' (dimension-tied) or a number in (0, pi/2]",
    )
    parser.add_argument(
        "--exact-step",
        action=argparse.BooleanOptionalAction,
        help="rescale each stride so the realized distance matches exactly",
    )
    parser.add_argument("--seed", type=int, help="64-bit master seed (default 0)")
    parser.add_argument("--workers", type=int, help="process count (default 1)")
    parser.add_argument("--out", help="output file path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    parser.add_argument("--config", help="key = value file; flags take precedence")
    parser.add_argument(
        "--j-over-h-hz", type=float, help="qubit coupling frequency in Hz (default 5e9)"
    )
    parser.add_argument(
        "--t-decoherence-s", type=float, help="decoherence time in seconds (default 1e-8)"
    )
    parser.add_argument(
        "--t-evolution-s", type=float, help="total evolution time in seconds (default 5e-6)"
    )
    parser.add_argument(
        "--c-constant", type=float, help="heuristic margin constant (default 1)"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    merged = dict(_DEFAULTS)
    if args.config is not None:
        merged.update(_read_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            merged[key] = flag
    if merged["experiment"] is None:
        raise UsageError("experiment: required (flag --experiment or config file)")
    epsilon_text = merged["epsilon"]
    if epsilon_text == "paper":
        epsilon_mode, epsilon = "paper", None
    else:
        try:
            epsilon = float(epsilon_text)
        except ValueError as exc:
            raise UsageError(
                f"epsilon: expected 'paper' or a number, got {epsilon_text!r}"
            ) from exc
        epsilon_mode = "fixed"
    return ExperimentConfig(
        kind=merged["experiment"],
        qubits=tuple(merged["qubits"]),
        steps=tuple(merged["steps"]),
        trials=merged["trials"],
        samples=merged["samples"],
        epsilon_mode=epsilon_mode,
        epsilon=epsilon,
        exact_step=bool(merged["exact_step"]),
        seed=merged["seed"],
        workers=merged["workers"],
        out=merged["out"],
        format=merged["format"],
        j_over_h_hz=merged["j_over_h_hz"],
        t_decoherence_s=merged["t_decoherence_s"],
        t_evolution_s=merged["t_evolution_s"],
        c_constant=merged["c_constant"],
    )


def main(argv=None) -> int:
    """Entry point: run one experiment, write one result file.

    Exit codes: 0 on success, 2 for configuration problems (including
    preconditions such as percolation clouds of fewer than two points),
    1 for runtime failures.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
    except (UsageError, InsufficientPointsError) as exc:
        print(f"qspan: error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(config)
    except (UsageError, InsufficientPointsError) as exc:
        print(f"qspan: error: {exc}", file=sys.stderr)
        return 2
    except (ExperimentFailureError, FitError, FileError) as exc:
        print(f"qspan: failed: {exc}", file=sys.stderr)
        return 1
    try:
        if config.out is None:
            sys.stdout.write(render(result, config.format))
        else:
            emit(result, config.format, config.out)
            print(f"qspan: wrote {config.out} ({len(result.rows)} rows)", file=sys.stderr)
    except FileError as exc:
        print(f"qspan: failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
