"""Experiment plumbing: key-value configs, ladder sweeps to CSV, and path timing comparisons."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import BlowUpError, ConfigError, SolverError
from .flat import run_flat
from .grid import SchemeParams, build_grid
from .metrics import frobenius
from .problems import SOURCES, get_case
from .stepper import RunConfig, run, setup_from_case
from .sylvester import METHODS

TABLE_LADDER = ((10, 1 / 100), (16, 1 / 120), (20, 1 / 200), (24, 1 / 220), (30, 1 / 280), (40, 1 / 400), (50, 1 / 500))


@dataclass(frozen=True)
class HarnessConfig:
    case: str = "example1"
    J: int = 10
    l: float = 1 / 100
    alpha: float = 0.25
    q: float = 0.01
    t0: float | None = None
    T: float | None = None
    steps: int | None = None
    init_mode: str = "exact"
    solver: str = "auto"
    source: str = "printed"
    tol: float = 1e-12
    max_iters: int = 200
    dense_cap: int = 50
    epsilon: float = 1.0
    eta: float = 1e-3
    norm_phi: float = 2.0

    def __post_init__(self):
        get_case(self.case)
        if self.J < 2:
            raise ConfigError(f"J must be >= 2, got {self.J}")
        for name in ("l", "tol", "dense_cap"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.steps is not None and self.steps < 0:
            raise ConfigError("steps must be non-negative")
        if self.init_mode not in ("exact", "taylor"):
            raise ConfigError(f"unknown init_mode {self.init_mode!r}")
        if self.solver not in ("auto",) + METHODS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.source not in SOURCES:
            raise ConfigError(f"unknown source {self.source!r}")
        for name in ("alpha", "q", "epsilon", "eta", "norm_phi"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    @property
    def params(self):
        return SchemeParams(self.alpha, self.q)

    @property
    def run_config(self):
        return RunConfig(init_mode=self.init_mode, solver=self.solver, tol=self.tol, max_iters=self.max_iters)


def _number(text):
    # accepts "0.0025", "1e-3" and fractions such as "1/400"
    return float(Fraction(text.strip())) if "/" in text else float(text)


_INT_KEYS = {"J", "max_iters", "dense_cap", "steps"}
_STR_KEYS = {"case", "init_mode", "solver", "source"}
_OPTIONAL = {"t0", "T", "steps"}
CONFIG_KEYS = tuple(f.name for f in fields(HarnessConfig))


def coerce(key, value):
    if key not in CONFIG_KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    if value is None or isinstance(value, (int, float)) and not isinstance(value, bool):
        if value is not None and key in _INT_KEYS and float(value) != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value) if value is not None and key in _INT_KEYS else value
    text = str(value).strip()
    if key in _STR_KEYS:
        return text
    if key in _OPTIONAL and text.lower() in ("", "none"):
        return None
    try:
        if key in _INT_KEYS:
            num = _number(text)
            if num != int(num):
                raise ValueError
            return int(num)
        return _number(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def parse_config_text(text) -> dict:
    """``key = value`` lines; ``#`` starts a comment; later keys win."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = coerce(key, value)
    return out


def load_config(path=None, **overrides) -> HarnessConfig:
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    values.update({k: coerce(k, v) for k, v in overrides.items() if v is not None})
    try:
        return HarnessConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def build_setup(cfg: HarnessConfig):
    case = get_case(cfg.case)
    t0 = case.t0 if cfg.t0 is None else cfg.t0
    if cfg.steps is not None:
        steps = cfg.steps
    else:
        T = case.T if cfg.T is None else cfg.T
        if T < t0:
            raise ConfigError(f"T={T} precedes t0={t0}")
        steps = int(round((T - t0) / cfg.l))
    grid = build_grid(*case.domain, cfg.J, t0, cfg.l, steps)
    return setup_from_case(case, grid, cfg.params, cfg.source)


def run_case(cfg: HarnessConfig, keep_fields=False):
    return run(build_setup(cfg), replace(cfg.run_config, keep_fields=keep_fields))


# -- sweeps --------------------------------------------------------------------

CSV_COLUMNS = ("J", "l", "alpha", "q", "Er", "RelEr", "runtime_ms", "iters", "method", "status")


@dataclass
class SweepRow:
    J: int
    l: float
    alpha: float
    q: float
    Er: float | None
    RelEr: float | None
    runtime_ms: float
    iters: int
    method: str
    status: str
    order: float | None = None

    @property
    def ok(self):
        return self.status == "ok"


@dataclass
class SweepResult:
    case: str
    rows: list = field(default_factory=list)

    @property
    def orders(self):
        return [r.order for r in self.rows[1:]]

    def to_csv(self) -> str:
        cols = CSV_COLUMNS + (("order",) if len(self.rows) > 1 else ())
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in cols])
        return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.6e" % v
    return str(v)


def observed_order(er_a, er_b, h_a, h_b):
    """``log(Er_a / Er_b) / log(h_a / h_b)``; ``None`` when either error is unusable."""
    if not (er_a and er_b and er_a > 0 and er_b > 0 and math.isfinite(er_a) and math.isfinite(er_b)):
        return None
    return math.log(er_a / er_b) / math.log(h_a / h_b)


def _sweep_row(cfg: HarnessConfig, J, l) -> SweepRow:
    row_cfg = replace(cfg, J=int(J), l=float(l))
    t = time.perf_counter()
    base = dict(J=int(J), l=float(l), alpha=cfg.alpha, q=cfg.q)
    try:
        res = run_case(row_cfg)
    except BlowUpError as exc:
        return SweepRow(**base, Er=None, RelEr=None, runtime_ms=1e3 * (time.perf_counter() - t),
                        iters=exc.partial.iterations_total, method="", status=f"blowup@{exc.step}")
    except SolverError as exc:
        part = getattr(exc, "partial", None)
        return SweepRow(**base, Er=None, RelEr=None, runtime_ms=1e3 * (time.perf_counter() - t),
                        iters=part.iterations_total if part else 0, method="", status=f"solver_error@{exc.step}")
    rep = res.report
    return SweepRow(**base, Er=rep.Er, RelEr=rep.RelEr, runtime_ms=res.runtime_ms,
                    iters=res.iterations_total, method=rep.method or "", status="ok")


def sweep(case_name, ladder, cfg: HarnessConfig | None = None, workers=1) -> SweepResult:
    """One run per ``(J, l)``; rows keep ladder order whatever the completion order."""
    ladder = [(int(J), float(l)) for J, l in ladder]
    if not ladder:
        raise ConfigError("ladder must be non-empty")
    cfg = replace(cfg or HarnessConfig(), case=case_name)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda p: _sweep_row(cfg, *p), ladder))
    else:
        rows = [_sweep_row(cfg, J, l) for J, l in ladder]
    L0, L1 = get_case(case_name).domain
    for a, b in zip(rows, rows[1:]):
        b.order = observed_order(a.Er, b.Er, (L1 - L0) / a.J, (L1 - L0) / b.J)
    return SweepResult(case_name, rows)


def parse_ladder(text):
    """``"10:1/100, 20:1/200"`` -> ``[(10, 0.01), (20, 0.005)]``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            J, l = item.split(":")
            out.append((int(J), _number(l)))
        except ValueError:
            raise ConfigError(f"bad ladder entry {item!r}; expected J:l") from None
    if not out:
        raise ConfigError("empty ladder")
    return out


# -- baseline comparison ------------------------------------------------------

@dataclass
class CompareRecord:
    J: int
    l: float
    steps: int
    times_s: dict
    divergence: dict
    speedups: dict


def _divergence(ref, other):
    worst = 0.0
    for (n, U), (m, X) in zip(ref, other):
        if n != m:
            raise RuntimeError(f"step mismatch {n} vs {m}")
        scale = max(frobenius(U), np.finfo(float).tiny)
        worst = max(worst, frobenius(U - X) / scale)
    return worst


def compare_baseline(case_name, J, l, steps, cfg: HarnessConfig | None = None, dense=True) -> CompareRecord:
    """Time the Lyapunov, banded-flat and dense-flat paths on identical inputs.

    Runs are serial. Divergence is the largest per-step relative Frobenius
    difference to the Lyapunov trajectory.
    """
    cfg = replace(cfg or HarnessConfig(), case=case_name, J=int(J), l=float(l), steps=int(steps))
    if dense and J > cfg.dense_cap:
        raise ConfigError(f"dense-flat path refused for J={J} > dense_cap={cfg.dense_cap}")
    setup = build_setup(cfg)
    times, trajs = {}, {}

    t = time.perf_counter()
    res = run(setup, replace(cfg.run_config, keep_fields=True))
    times["lyapunov"] = time.perf_counter() - t
    trajs["lyapunov"] = [(n, U) for n, U, _ in res.fields]
    for method in ("banded",) + (("dense",) if dense else ()):
        t = time.perf_counter()
        trajs[method] = run_flat(setup, method, cfg.init_mode, guard=1e12)
        times[method] = time.perf_counter() - t
    ref = trajs["lyapunov"]
    div = {k: _divergence(ref, v) for k, v in trajs.items() if k != "lyapunov"}
    speed = {f"{k}/lyapunov": times[k] / times["lyapunov"] for k in times if k != "lyapunov"}
    return CompareRecord(int(J), float(l), int(steps), times, div, speed)
