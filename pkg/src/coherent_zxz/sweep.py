"""Parameter sweeps behind the figure recipes, and their CSV/JSON output.

A sweep config is a small ``key = value`` text file::

    mode = fidelity_vs_delta
    target = pi:0.8, pi:1.1, pi:1.6
    error = pi:0.5, pi:0.1, pi:0.09
    axis = delta
    start = pi:-0.5
    stop = pi:0.5
    steps = 101
    outputs = f_ori_analytic, f_ori_numeric, f_best_analytic, f_best_numeric

Angles are radians, or multiples of pi with a ``pi:`` prefix.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .decomposition import HALF_PI, XErrorModel
from .fidelity import (
    DEFAULT_QUADRATURE_POINTS,
    average_best_fidelity,
    average_best_fidelity_quadrature,
    average_original_fidelity,
    average_original_fidelity_quadrature,
    best_fidelity_analytic,
    original_fidelity_analytic,
    original_fidelity_numeric,
    original_fidelity_special_case,
)
from .mitigation import SearchConfig, mitigate_closed_form, mitigate_numeric
from .su2 import GateParams
from .universality import universality_analytic, universality_monte_carlo


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the offending field."""


class SweepMode(enum.Enum):
    FIDELITY_VS_DELTA = "fidelity_vs_delta"
    FIDELITY_VS_X = "fidelity_vs_x"
    UNIVERSALITY_VS_DELTA = "universality_vs_delta"
    AVERAGE_FIDELITY_VS_DELTA = "average_fidelity_vs_delta"


_FIDELITY_OUTPUTS = (
    "f_ori_analytic",
    "f_ori_numeric",
    "f_ori_special",
    "f_best_analytic",
    "f_best_numeric",
    "f_best_closed_form",
    "un_analytic",
)
VALID_OUTPUTS = {
    SweepMode.FIDELITY_VS_DELTA: _FIDELITY_OUTPUTS,
    SweepMode.FIDELITY_VS_X: _FIDELITY_OUTPUTS,
    SweepMode.UNIVERSALITY_VS_DELTA: ("un_analytic", "un_monte_carlo", "un_mc_stderr"),
    SweepMode.AVERAGE_FIDELITY_VS_DELTA: (
        "f_ori_ave",
        "f_ori_ave_quadrature",
        "f_best_ave",
        "f_best_ave_quadrature",
        "un_analytic",
    ),
}
AXIS_FOR_MODE = {
    SweepMode.FIDELITY_VS_DELTA: "delta",
    SweepMode.FIDELITY_VS_X: "x",
    SweepMode.UNIVERSALITY_VS_DELTA: "delta",
    SweepMode.AVERAGE_FIDELITY_VS_DELTA: "delta",
}

#: (analytic column, numeric column, max abs difference) pairs for ``--check``.
CHECK_PAIRS = (
    ("f_ori_analytic", "f_ori_numeric", 1e-9),
    ("f_ori_special", "f_ori_numeric", 1e-9),
    ("f_best_closed_form", "f_best_analytic", 1e-9),
    ("f_best_analytic", "f_best_numeric", 1e-6),
    ("f_ori_ave", "f_ori_ave_quadrature", 1e-8),
    ("f_best_ave", "f_best_ave_quadrature", 1e-8),
)


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    mode: SweepMode
    axis: SweepAxis
    outputs: tuple[str, ...]
    target: GateParams = GateParams(0.0, 0.0, 0.0)
    path: tuple[float, float, float] = (math.pi, 2 * math.pi, 2 * math.pi)
    error: XErrorModel = field(default_factory=XErrorModel)
    series: tuple[tuple[float, float], ...] = ()
    seed: int = 0
    samples: int = 100_000
    quadrature_points: int = DEFAULT_QUADRATURE_POINTS
    search_grid: int = 12
    name: str = "sweep"

    def validate(self) -> "SweepConfig":
        if not isinstance(self.mode, SweepMode):
            raise ConfigError(f"mode: unknown mode {self.mode!r}")
        want = AXIS_FOR_MODE[self.mode]
        if self.axis.name != want:
            raise ConfigError(f"axis: mode {self.mode.value} sweeps '{want}', got '{self.axis.name}'")
        if self.axis.steps < 2:
            raise ConfigError("steps: need at least 2 grid points")
        if not self.axis.start < self.axis.stop:
            raise ConfigError("start: must be smaller than stop")
        if not self.outputs:
            raise ConfigError("outputs: at least one column is required")
        allowed = VALID_OUTPUTS[self.mode]
        for name in self.outputs:
            if name not in allowed:
                raise ConfigError(f"outputs: '{name}' is not available in mode {self.mode.value}")
        if len(set(self.outputs)) != len(self.outputs):
            raise ConfigError("outputs: duplicate column")
        if self.samples < 10_000:
            raise ConfigError("samples: need at least 10000 Monte Carlo samples")
        if self.quadrature_points < 64:
            raise ConfigError("quadrature_points: need at least 64")
        if self.search_grid < 8:
            raise ConfigError("search_grid: need at least 8 points per axis")
        return self

    def columns(self) -> tuple[str, ...]:
        if len(self.series) <= 1:
            return (self.axis.name, *self.outputs)
        cols = [self.axis.name]
        for k in range(len(self.series)):
            cols.extend(f"{name}_s{k + 1}" for name in self.outputs)
        return tuple(cols)


@dataclass
class SweepTable:
    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([format(v, ".17g") for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        recs = [dict(zip(self.columns, row)) for row in self.rows]
        return json.dumps(recs, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str, columns: Sequence[str] | None = None) -> "SweepTable":
        recs = json.loads(text)
        cols = tuple(columns) if columns is not None else (tuple(recs[0]) if recs else ())
        return cls(cols, [tuple(float(r[c]) for c in cols) for r in recs])

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.reader(io.StringIO(text))
        header = tuple(next(reader))
        return cls(header, [tuple(float(v) for v in row) for row in reader])


# ---------------------------------------------------------------------------
# parsing


def parse_angle(text: str) -> float:
    """``'pi:0.8'`` -> 0.8*pi; anything else is read as radians."""
    s = text.strip()
    try:
        if s.lower().startswith("pi:"):
            return float(s[3:]) * math.pi
        if s.lower().startswith("-pi:"):
            return -float(s[4:]) * math.pi
        return float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None


def parse_triple(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise ValueError(f"expected three angles, got {text!r}")
    return tuple(parse_angle(p) for p in parts)  # type: ignore[return-value]


def _parse_series(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for chunk in text.split(";"):
        parts = [p for p in chunk.replace(",", " ").split() if p]
        if not parts:
            continue
        if len(parts) != 2:
            raise ValueError(f"series entries are 'phi_x, lambda_x' pairs, got {chunk.strip()!r}")
        out.append((parse_angle(parts[0]), parse_angle(parts[1])))
    return tuple(out)


def parse_config_text(text: str) -> dict[str, str]:
    kv: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        kv[key.strip().lower()] = value.strip()
    return kv


_KEYS = {
    "mode", "target", "path", "error", "series", "axis", "start", "stop", "steps",
    "outputs", "seed", "samples", "quadrature_points", "search_grid", "name",
}


def config_from_mapping(kv: dict[str, str]) -> SweepConfig:
    unknown = set(kv) - _KEYS
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown key")

    def get(key, conv, default=None):
        if key not in kv:
            if default is None:
                raise ConfigError(f"{key}: missing")
            return default
        try:
            return conv(kv[key])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{key}: {exc}") from None

    def mode_conv(s):
        try:
            return SweepMode(s.strip().lower())
        except ValueError:
            choices = ", ".join(m.value for m in SweepMode)
            raise ValueError(f"unknown mode {s!r} (choose from {choices})") from None

    mode = get("mode", mode_conv)
    axis_name = get("axis", lambda s: s.strip().lower(), AXIS_FOR_MODE[mode])
    axis = SweepAxis(axis_name, get("start", parse_angle), get("stop", parse_angle), get("steps", int))
    outputs = get("outputs", lambda s: tuple(c.strip() for c in s.split(",") if c.strip()))
    err = get("error", parse_triple, (HALF_PI, 0.0, 0.0))
    cfg = SweepConfig(
        mode=mode,
        axis=axis,
        outputs=outputs,
        target=GateParams(*get("target", parse_triple, (0.0, 0.0, 0.0))),
        path=get("path", parse_triple, (math.pi, 2 * math.pi, 2 * math.pi)),
        error=XErrorModel(*err),
        series=get("series", _parse_series, ()),
        seed=get("seed", int, 0),
        samples=get("samples", int, 100_000),
        quadrature_points=get("quadrature_points", int, DEFAULT_QUADRATURE_POINTS),
        search_grid=get("search_grid", int, 12),
        name=get("name", str.strip, "sweep"),
    )
    return cfg.validate()


def recipe_names() -> list[str]:
    root = resources.files("coherent_zxz") / "recipes"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def recipe_text(name: str) -> str:
    path = resources.files("coherent_zxz") / "recipes" / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"recipe: unknown recipe {name!r} (available: {', '.join(recipe_names())})")
    return path.read_text()


def load_config(
    recipe: str | None = None, path: str | Path | None = None, overrides: Iterable[str] = ()
) -> SweepConfig:
    """Build a config from a bundled recipe or a file, then ``key=value`` overrides."""
    kv: dict[str, str] = {}
    if recipe is not None:
        kv.update(parse_config_text(recipe_text(recipe)))
        kv.setdefault("name", recipe)
    if path is not None:
        kv.update(parse_config_text(Path(path).read_text()))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        k, v = item.split("=", 1)
        kv[k.strip().lower()] = v.strip()
    return config_from_mapping(kv)


# ---------------------------------------------------------------------------
# evaluation


def _fidelity_row(cfg: SweepConfig, target: GateParams, e: XErrorModel) -> list[float]:
    search = SearchConfig(grid_per_axis=cfg.search_grid, rng_seed=cfg.seed)
    row = []
    for name in cfg.outputs:
        if name == "f_ori_analytic":
            row.append(original_fidelity_analytic(target, e))
        elif name == "f_ori_numeric":
            row.append(original_fidelity_numeric(target, e))
        elif name == "f_ori_special":
            v = original_fidelity_special_case(target, e)
            row.append(original_fidelity_analytic(target, e) if v is None else v)
        elif name == "f_best_analytic":
            row.append(best_fidelity_analytic(target, e))
        elif name == "f_best_numeric":
            row.append(mitigate_numeric(target, e, search).achieved_fidelity)
        elif name == "f_best_closed_form":
            row.append(mitigate_closed_form(target, e).achieved_fidelity)
        elif name == "un_analytic":
            row.append(universality_analytic(e))
    return row


def _average_row(cfg: SweepConfig, e: XErrorModel) -> list[float]:
    n = cfg.quadrature_points
    values = {
        "f_ori_ave": lambda: average_original_fidelity(e, n),
        "f_ori_ave_quadrature": lambda: average_original_fidelity_quadrature(e, n),
        "f_best_ave": lambda: average_best_fidelity(e),
        "f_best_ave_quadrature": lambda: average_best_fidelity_quadrature(e, n),
        "un_analytic": lambda: universality_analytic(e),
    }
    return [values[name]() for name in cfg.outputs]


def _universality_row(cfg: SweepConfig, e: XErrorModel) -> list[float]:
    rep = universality_monte_carlo(e, cfg.samples, cfg.seed)
    values = {
        "un_analytic": rep.un_analytic,
        "un_monte_carlo": rep.un_monte_carlo,
        "un_mc_stderr": rep.mc_stderr,
    }
    return [values[name] for name in cfg.outputs]


def run_sweep(cfg: SweepConfig) -> SweepTable:
    """Evaluate every configured column at each grid point, in grid order."""
    cfg.validate()
    series = cfg.series or ((cfg.error.phi_x, cfg.error.lambda_x),)
    table = SweepTable(cfg.columns())
    for v in cfg.axis.values():
        v = float(v)
        row = [v]
        for phi_x, lambda_x in series:
            if cfg.mode is SweepMode.FIDELITY_VS_X:
                e = XErrorModel(cfg.error.theta_x, phi_x, lambda_x)
                target = GateParams(v * cfg.path[0], v * cfg.path[1], v * cfg.path[2])
                row.extend(_fidelity_row(cfg, target, e))
                continue
            e = XErrorModel(HALF_PI + v, phi_x, lambda_x)
            if cfg.mode is SweepMode.FIDELITY_VS_DELTA:
                row.extend(_fidelity_row(cfg, cfg.target, e))
            elif cfg.mode is SweepMode.AVERAGE_FIDELITY_VS_DELTA:
                row.extend(_average_row(cfg, e))
            else:
                row.extend(_universality_row(cfg, e))
        table.rows.append(tuple(row))
    return table


@dataclass(frozen=True)
class CheckViolation:
    column: str
    reference: str
    max_abs_diff: float
    tol: float


def check_table(table: SweepTable) -> list[CheckViolation]:
    """Compare every analytic/numeric column pair present in ``table``."""
    out = []
    suffixes = {c[len(base):] for c in table.columns for base, _, _ in CHECK_PAIRS if c.startswith(base)}
    for a, b, tol in CHECK_PAIRS:
        for suf in sorted(suffixes):
            ca, cb = a + suf, b + suf
            if ca in table.columns and cb in table.columns and table.rows:
                diff = float(np.max(np.abs(table.column(ca) - table.column(cb))))
                if not diff < tol:
                    out.append(CheckViolation(ca, cb, diff, tol))
    return out


def emit(table: SweepTable, fmt: str = "csv", destination: str | Path | TextIO | None = None) -> None:
    """Write ``table`` as CSV or JSON to a path, an open stream, or stdout."""
    fmt = fmt.lower()
    if fmt == "csv":
        text = table.to_csv()
    elif fmt == "json":
        text = table.to_json()
    else:
        raise ConfigError(f"format: expected csv or json, got {fmt!r}")
    if destination is None or destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    elif hasattr(destination, "write"):
        destination.write(text)  # type: ignore[union-attr]
    else:
        Path(destination).write_text(text)


def with_overrides(cfg: SweepConfig, **changes) -> SweepConfig:
    return replace(cfg, **changes).validate()
