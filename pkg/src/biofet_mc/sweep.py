"""One-parameter sweeps over a SystemConfig and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .config import PARAMS, SystemConfig
from .detection import end_to_end_sep
from .errors import BiasRegionError, ConfigError, EquilibriumError, InvalidParameterError, ModelError
from .transducer import debye_length

MASK = "masked"
METRICS = ("mu_I", "snr_db", "sep", "log10_sep", "tau_B", "p_on", "rho_R", "lambda_D", "k_T", "validity")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class SweepSpec:
    key: str
    scale: str
    lo: float
    hi: float
    n_points: int

    def __post_init__(self):
        if self.key not in PARAMS:
            raise ConfigError("unknown sweep key", key=self.key)
        if not isinstance(PARAMS[self.key].default, (int, float)):
            raise ConfigError("cannot sweep a non-numeric key", key=self.key)
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"scale must be 'linear' or 'log', got {self.scale!r}", key=self.key)
        if not self.lo < self.hi:
            raise ConfigError(f"need lo < hi, got lo={self.lo!r}, hi={self.hi!r}", key=self.key)
        if self.n_points < 2:
            raise ConfigError(f"need at least 2 points, got {self.n_points}", key=self.key)
        if self.scale == "log" and not self.lo > 0:
            raise ConfigError(f"log scale requires lo > 0, got {self.lo!r}", key=self.key)

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """Parse ``key:scale:lo:hi:n``, e.g. ``channel.d:log:0.1:10:21``."""
        parts = text.split(":")
        if len(parts) != 5:
            raise ConfigError(f"sweep must look like key:scale:lo:hi:n, got {text!r}")
        key, scale, lo, hi, n = parts
        try:
            lo_f, hi_f, n_f = float(lo), float(hi), float(n)
        except ValueError:
            raise ConfigError(f"non-numeric bound or count in {text!r}", key=key) from None
        if not n_f.is_integer():
            raise ConfigError(f"point count must be an integer, got {n!r}", key=key)
        return cls(key, scale, lo_f, hi_f, int(n_f))

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.n_points)
        return np.linspace(self.lo, self.hi, self.n_points)


@dataclass(frozen=True)
class Table:
    """Sweep result. ``rows[i][j]`` is a float, or None where the point is masked."""

    param: str
    values: tuple[float, ...]
    metrics: tuple[str, ...]
    rows: tuple[tuple[float | None, ...], ...]
    validity: tuple[bool, ...]

    def column(self, metric: str) -> np.ndarray:
        j = self.metrics.index(metric)
        return np.array([np.nan if r[j] is None else r[j] for r in self.rows])


def _needs_constellation(metrics) -> bool:
    return any(m in ("sep", "log10_sep") for m in metrics)


def evaluate_point(cfg: SystemConfig, metrics: Sequence[str]) -> tuple[list[float | None], bool]:
    """Compute metrics at one configuration; all masked when the point is invalid.

    A point is invalid if the FET leaves the linear region or the receptors
    do not equilibrate within the passage time, for the transmitter release
    and, when an SEP metric is requested, for every constellation level.
    """
    link = cfg.link
    try:
        sl = link.symbol(cfg.N_m)
        valid = sl.equilibrium.valid
        sep = None
        if _needs_constellation(metrics) and valid:
            sep = end_to_end_sep(link, cfg.constellation)
    except (BiasRegionError, EquilibriumError):
        return [None] * len(metrics), False
    if not valid:
        return [None] * len(metrics), False

    out: list[float | None] = []
    for m in metrics:
        if m == "mu_I":
            out.append(sl.mu_I)
        elif m == "snr_db":
            out.append(sl.snr_db)
        elif m == "sep":
            out.append(sep.sep)
        elif m == "log10_sep":
            out.append(sep.log10_sep)
        elif m == "tau_B":
            out.append(sl.stats.tau_B)
        elif m == "p_on":
            out.append(sl.stats.p_on)
        elif m == "rho_R":
            out.append(sl.rho_R)
        elif m == "lambda_D":
            out.append(debye_length(cfg.medium))
        elif m == "k_T":
            out.append(link.k_T())
    return out, True


def _check_metrics(metrics) -> tuple[str, ...]:
    metrics = tuple(metrics)
    for m in metrics:
        if m not in METRICS:
            raise InvalidParameterError(f"unknown metric {m!r}; choose from {', '.join(METRICS)}")
    # validity is always emitted as its own trailing column
    return tuple(m for m in metrics if m != "validity")


def run_sweep(cfg: SystemConfig, sweep: SweepSpec, metrics: Sequence[str], workers: int = 1) -> Table:
    """Evaluate ``metrics`` at each sweep point; rows keep sweep order."""
    metrics = _check_metrics(metrics)
    values = sweep.values()

    def point(v):
        try:
            pcfg = cfg.replace({sweep.key: float(v)})
        except ConfigError:
            return [None] * len(metrics), False
        return evaluate_point(pcfg, metrics)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, values))
    else:
        results = [point(v) for v in values]
    return Table(
        param=sweep.key,
        values=tuple(float(v) for v in values),
        metrics=metrics,
        rows=tuple(tuple(r) for r, _ in results),
        validity=tuple(ok for _, ok in results),
    )


def tabulate(param: str, xs, columns: dict[str, Callable[[float], float]]) -> Table:
    """Table from explicit per-point functions (used for spectra)."""
    names = tuple(columns)
    rows = tuple(tuple(float(columns[n](x)) for n in names) for x in xs)
    return Table(param, tuple(float(x) for x in xs), names, rows, tuple(True for _ in rows))


def _fmt(x) -> str:
    return MASK if x is None else f"{x:.8e}"


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "value", *table.metrics, "validity"])
    for v, row, ok in zip(table.values, table.rows, table.validity):
        w.writerow([table.param, _fmt(v), *(_fmt(x) for x in row), "true" if ok else "false"])
    return buf.getvalue()


def to_json(table: Table) -> str:
    records = []
    for v, row, ok in zip(table.values, table.rows, table.validity):
        rec = {"param": table.param, "value": v}
        rec.update(zip(table.metrics, row))
        rec["validity"] = ok
        records.append(rec)
    doc = {"param": table.param, "metrics": list(table.metrics), "rows": records}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> Table:
    doc = json.loads(text)
    metrics = tuple(doc["metrics"])
    rows = doc["rows"]
    return Table(
        param=doc["param"],
        values=tuple(r["value"] for r in rows),
        metrics=metrics,
        rows=tuple(tuple(r[m] for m in metrics) for r in rows),
        validity=tuple(r["validity"] for r in rows),
    )


def from_csv(text: str) -> Table:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    metrics = tuple(header[2:-1])
    values, rows, validity, param = [], [], [], None
    for rec in reader:
        param = rec[0]
        values.append(float(rec[1]))
        rows.append(tuple(None if x == MASK else float(x) for x in rec[2:-1]))
        validity.append(rec[-1] == "true")
    return Table(param or "", tuple(values), metrics, tuple(rows), tuple(validity))


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise InvalidParameterError(f"format must be one of {FORMATS}, got {fmt!r}")


def emit(table: Table, fmt: str, path: str | Path | None = None) -> str:
    """Serialize ``table``; write to ``path`` if given. Returns the text."""
    text = render(table, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise ModelError(f"cannot write {path}: {exc.strerror}") from exc
    return text


def read_table(path: str | Path) -> Table:
    text = Path(path).read_text()
    return from_json(text) if str(path).endswith(".json") else from_csv(text)
