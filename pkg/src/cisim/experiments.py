"""Experiment descriptions, sweep expansion, and result serialization.

An experiment lives in a TOML file with four fixed sections plus an
optional sweep:

    [world]                 # indexed Gaussian family
    classes = 2             # class k has mean k * mean_spacing
    sensors = 2
    mean_spacing = 2.0
    sd = 1.5
    # prior = [0.5, 0.5]    # uniform when omitted

    [costs]                 # uniform prices
    link = 1.0
    uplink = 4.0
    # target = 0.5          # omitted: predictions stay local

    [policy]
    confidence = 0.75
    # request_rule = "corrected-expected-cost"
    # estimator = "auto"

    [run]
    mode = "simulate"       # simulate | analytic | global-baseline
    trials = 10000
    seed = 7
    # grid_points = 1000    # analytic mode
    # solver_limit = 16     # global-baseline mode

    [sweep]                 # optional cartesian product, key order preserved
    mean_spacing = [2.0, 5.0, 7.0]
    confidence = [0.75, 0.95]

Worlds with per-sensor parameter matrices or non-uniform prices are built
through the library API; the file format covers the symmetric family the
experiments use. Unknown keys anywhere are rejected by name so a typo
cannot silently fall back to a default.

Output rows always carry the full parameter tuple (classes, sensors,
mean_spacing, sd, confidence, link, uplink) followed by the mode's
metrics, in a fixed column order, so sweeps over different keys stay
comparable. Writers default to stamping a generation-time comment; pass
``timestamp=False`` (or ``--no-header-timestamp`` on the command line)
for byte-reproducible files.
"""

from __future__ import annotations

import dataclasses
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from itertools import product
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import analytic as analytic_mod
from . import simulate as simulate_mod
from .policy import REQUEST_RULES, PolicyConfig
from .world import CostModel, ValidationError, WorldModel

MODES = ("simulate", "analytic", "global-baseline")

SWEEPABLE = ("classes", "sensors", "mean_spacing", "sd", "confidence", "link", "uplink")

_INT_AXES = ("classes", "sensors")

PARAM_COLUMNS = ("classes", "sensors", "mean_spacing", "sd", "confidence", "link", "uplink")

METRIC_COLUMNS = {
    "simulate": (
        "trials",
        "seed",
        "accuracy",
        "avg_direct",
        "avg_requests",
        "avg_successful_requests",
        "avg_offload_actions",
        "avg_cost",
        "cloud_accuracy",
        "cloud_avg_cost",
        "independent_accuracy",
    ),
    "analytic": (
        "grid_points",
        "p_direct",
        "p_request",
        "p_offload",
        "p_request_success",
        "expected_cost",
    ),
    "global-baseline": (
        "trials",
        "seed",
        "accuracy",
        "avg_direct",
        "avg_pairs",
        "avg_offloads",
        "avg_cost",
        "cloud_accuracy",
        "cloud_avg_cost",
    ),
}


def _check_keys(section: dict, name: str, allowed: tuple[str, ...]):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key {key!r} in [{name}]")


def _require(section: dict, name: str, key: str):
    if key not in section:
        raise ValidationError(f"missing required key {key!r} in [{name}]")
    return section[key]


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully validated experiment file, sweep included."""

    classes: int = 2
    sensors: int = 2
    mean_spacing: float = 2.0
    sd: float = 1.5
    prior: tuple[float, ...] | None = None
    link: float = 1.0
    uplink: float = 4.0
    target: float | None = None
    confidence: float = 0.75
    request_rule: str = "corrected-expected-cost"
    estimator: str = "auto"
    mode: str = "simulate"
    trials: int = 1000
    seed: int = 0
    grid_points: int = 1000
    solver_limit: int | None = None
    sweep: tuple[tuple[str, tuple], ...] = ()

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentSpec":
        _check_keys(raw, "spec", ("world", "costs", "policy", "run", "sweep"))
        world = raw.get("world", {})
        costs = raw.get("costs", {})
        policy = raw.get("policy", {})
        run = raw.get("run", {})
        sweep = raw.get("sweep", {})
        _check_keys(world, "world", ("classes", "sensors", "mean_spacing", "sd", "prior"))
        _check_keys(costs, "costs", ("link", "uplink", "target"))
        _check_keys(policy, "policy", ("confidence", "request_rule", "estimator"))
        _check_keys(
            run, "run", ("mode", "trials", "seed", "grid_points", "solver_limit")
        )
        for key, values in sweep.items():
            if key not in SWEEPABLE:
                raise ValidationError(
                    f"unknown key {key!r} in [sweep], sweepable keys are {SWEEPABLE}"
                )
            if not isinstance(values, list) or not values:
                raise ValidationError(f"[sweep] {key!r} must be a non-empty list")
            if key in _INT_AXES and any(float(v) != int(v) for v in values):
                raise ValidationError(f"[sweep] {key!r} values must be integers")
        mode = run.get("mode", "simulate")
        if mode not in MODES:
            raise ValidationError(f"unknown mode {mode!r}, expected one of {MODES}")
        prior = world.get("prior")
        spec = cls(
            classes=int(world.get("classes", 2)),
            sensors=int(_require(world, "world", "sensors")),
            mean_spacing=float(_require(world, "world", "mean_spacing")),
            sd=float(_require(world, "world", "sd")),
            prior=None if prior is None else tuple(float(p) for p in prior),
            link=float(_require(costs, "costs", "link")),
            uplink=float(_require(costs, "costs", "uplink")),
            target=None if "target" not in costs else float(costs["target"]),
            confidence=float(_require(policy, "policy", "confidence")),
            request_rule=str(policy.get("request_rule", "corrected-expected-cost")),
            estimator=str(policy.get("estimator", "auto")),
            mode=mode,
            trials=int(run.get("trials", 1000)),
            seed=int(run.get("seed", 0)),
            grid_points=int(run.get("grid_points", 1000)),
            solver_limit=None if "solver_limit" not in run else int(run["solver_limit"]),
            sweep=tuple(
                (
                    key,
                    tuple(
                        (int(v) if key in _INT_AXES else float(v)) for v in values
                    ),
                )
                for key, values in sweep.items()
            ),
        )
        spec.policy_config()  # validate policy knobs eagerly
        return spec

    @classmethod
    def from_toml(cls, path: str) -> "ExperimentSpec":
        with open(path, "rb") as fh:
            try:
                raw = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ValidationError(f"cannot parse {path}: {exc}") from exc
        return cls.from_dict(raw)

    def replace(self, **overrides) -> "ExperimentSpec":
        return dataclasses.replace(self, **overrides)

    def world_model(self) -> WorldModel:
        return WorldModel.indexed(
            self.classes, self.sensors, self.mean_spacing, self.sd, self.prior
        )

    def cost_model(self) -> CostModel:
        return CostModel.uniform(self.sensors, self.link, self.uplink, self.target)

    def policy_config(self) -> PolicyConfig:
        return PolicyConfig(
            confidence=self.confidence,
            request_rule=self.request_rule,
            estimator=self.estimator,
        )

    def sweep_points(self) -> list["ExperimentSpec"]:
        """Expand [sweep] into one spec per cell, key order as written."""
        if not self.sweep:
            return [self]
        keys = [k for k, _ in self.sweep]
        grids = [v for _, v in self.sweep]
        return [
            self.replace(**dict(zip(keys, combo))) for combo in product(*grids)
        ]


def run_point(spec: ExperimentSpec) -> dict[str, Any]:
    """Run one spec (no sweep expansion) and return its output row."""
    row: dict[str, Any] = {
        "classes": spec.classes,
        "sensors": spec.sensors,
        "mean_spacing": spec.mean_spacing,
        "sd": spec.sd,
        "confidence": spec.confidence,
        "link": spec.link,
        "uplink": spec.uplink,
    }
    if spec.mode == "simulate":
        rep = simulate_mod.run_trials(
            spec.world_model(), spec.cost_model(), spec.policy_config(),
            spec.trials, spec.seed,
        )
        for col in METRIC_COLUMNS["simulate"]:
            row[col] = getattr(rep, col)
    elif spec.mode == "analytic":
        rep = analytic_mod.analytic_metrics(
            spec.world_model(), spec.cost_model(), spec.policy_config(),
            grid_points=spec.grid_points,
        )
        row["grid_points"] = spec.grid_points
        for col in METRIC_COLUMNS["analytic"][1:]:
            row[col] = getattr(rep, col)
    else:
        kwargs = {} if spec.solver_limit is None else {"max_sensors": spec.solver_limit}
        rep = simulate_mod.run_global_trials(
            spec.world_model(), spec.cost_model(), spec.confidence,
            spec.trials, spec.seed, **kwargs,
        )
        for col in METRIC_COLUMNS["global-baseline"]:
            row[col] = getattr(rep, col)
    return row


def _run_indexed(args: tuple[ExperimentSpec, int]) -> tuple[int, dict[str, Any]]:
    spec, idx = args
    return idx, run_point(spec)


def run_spec(spec: ExperimentSpec, workers: int = 1) -> list[dict[str, Any]]:
    """Run every sweep point; parallel points return in sweep order."""
    points = spec.sweep_points()
    if workers <= 1 or len(points) == 1:
        return [run_point(p) for p in points]
    rows: list = [None] * len(points)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for idx, row in pool.map(_run_indexed, [(p, i) for i, p in enumerate(points)]):
            rows[idx] = row
    return rows


def columns_for(mode: str) -> tuple[str, ...]:
    return PARAM_COLUMNS + METRIC_COLUMNS[mode]


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_csv(rows, columns, out, timestamp: bool = True):
    """Write rows to a file-like object; comment header optional."""
    if timestamp:
        out.write(f"# generated {_timestamp()}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_format_value(row[c]) for c in columns) + "\n")


def write_json(rows, columns, out, timestamp: bool = True):
    doc: dict[str, Any] = {"columns": list(columns)}
    if timestamp:
        doc["generated"] = _timestamp()
    doc["rows"] = [{c: row[c] for c in columns} for row in rows]
    json.dump(doc, out, indent=2)
    out.write("\n")


def render(rows, columns, fmt: str = "csv", timestamp: bool = True) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        write_csv(rows, columns, buf, timestamp)
    elif fmt == "json":
        write_json(rows, columns, buf, timestamp)
    else:
        raise ValidationError(f"unknown format {fmt!r}, expected 'csv' or 'json'")
    return buf.getvalue()


def read_csv(path: str) -> list[dict[str, Any]]:
    """Read back a results CSV, skipping comment lines; numbers are parsed."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    if not lines:
        return []
    columns = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        values: list[Any] = []
        for tok in line.split(","):
            try:
                values.append(int(tok))
            except ValueError:
                try:
                    values.append(float(tok))
                except ValueError:
                    values.append(tok)
        rows.append(dict(zip(columns, values)))
    return rows


def emit(rows, columns, out_path: str | None, fmt: str, timestamp: bool):
    """Render to ``out_path``, or stdout when it is ``None`` or ``-``."""
    text = render(rows, columns, fmt, timestamp)
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
