"""Command-line front end.

Usage::

    diophlab <command> [--config FILE] [--set key=value ...]
                       [--seed N] [--precision-bits B] [--ladder k0:k1]
                       [--out PATH] [--format csv|json] [--jobs N]
    diophlab plot REPORT.csv --out DIR

The config file is INI. A ``[run]`` section may hold ``seed``,
``precision_bits``, ``ladder``, ``format`` and ``jobs``; the section named
after the command holds its parameters. ``--set`` overrides a parameter and
the dedicated flags override ``[run]``.

Parameters per command (defaults in brackets):

``search``
    ``matrix`` (rows split by ``;``, entries by ``,``), ``theta`` [0],
    ``objective`` supnorm|multiplicative [supnorm], ``strategy``
    reduction|exhaustive [reduction], ``positive_q`` [false],
    ``node_budget`` [2000000]; ladder [0:10].
``estimate``
    ``mode`` matrix|simultaneous|dual [matrix]; ``matrix`` for the first,
    ``point`` for the others; ``theta``, ``kind`` ordinary|uniform,
    ``objective``, ``tail`` [1/4]; ladder [1:20].
``bounds``
    ``queries``: one query per line, ``<calculator> w=<exponent> n=..``
    plus ``m``, ``s``, ``branch`` or ``target`` where the calculator needs
    them. A value ``range(a,b,step)`` expands into one row per grid point.
``verify``
    ``a`` (hyperplane parameter, comma separated for n > 2),
    ``a_exponent``, ``target`` sim|dual [sim], ``s``, ``samples`` [50],
    ``y_box`` [0,1], ``thetas`` (``;`` separated vectors) [0],
    ``random_rational_thetas`` [0], ``random_irrational_thetas`` [0],
    ``rational_denominator_max`` [50], ``tolerance_floor`` [0.05],
    ``oracle_ladder`` [1:50], ``oracle_tolerance`` [0.1]; ladder [1:32].
``tlab``
    ``m`` [1], ``n`` [1], ``lam`` [1], ``kind`` [multiplicative],
    ``cap`` [4], ``etas`` [1/4, 1/16], ``psi_caps``
    [16, 32, 48, 64, 80, 96], ``round_trip`` [true], ``round_trip_k0`` [3].

Exit codes: 0 ok, 1 verification hard failure, 2 configuration error,
3 precision exhausted, 4 node budget exceeded.
"""

from __future__ import annotations

import argparse
import configparser
import inspect
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from . import bounds as B
from .core import (
    DEFAULT_PRECISION_BITS,
    MAX_PRECISION_BITS,
    PrecisionReal,
    Matrix,
    split_entries,
    ext_real,
    parse_scalar,
    render,
)
from .errors import (
    BudgetExceeded,
    ConfigError,
    DiophlabError,
    DimensionError,
    DomainError,
    InsufficientLadder,
    PrecisionExhausted,
)
from .estimator import (
    Kind,
    LadderSpec,
    estimate_exponent,
    specialize_dual,
    specialize_simultaneous,
)
from .report import Report
from .search import Objective, SearchConfig, Strategy, best_multiplicative, best_supnorm
from .transference import (
    LambdaParam,
    RateKind,
    RoundTripStatus,
    enumerate_T,
    psi_partial_sums,
    round_trip,
    round_trip_suite,
)
from .witnesses import (
    ConstructedPoint,
    HyperplaneSpec,
    hyperplane_point,
    liouville_number,
    verify_oracle,
)

EXIT_OK = 0
EXIT_HARD_FAIL = 1
EXIT_CONFIG = 2
EXIT_PRECISION = 3
EXIT_BUDGET = 4

COMMANDS = ("search", "estimate", "bounds", "verify", "tlab")
FORMATS = ("csv", "json")

_SEARCH_KNOBS = ("strategy", "node_budget", "positive_q", "max_precision_bits")
PARAMS = {
    "search": ("matrix", "theta", "objective", *_SEARCH_KNOBS),
    "estimate": ("mode", "matrix", "point", "theta", "kind", "objective", "tail", *_SEARCH_KNOBS),
    "bounds": ("queries",),
    "verify": ("a", "a_exponent", "target", "s", "samples", "y_box", "thetas",
               "random_rational_thetas", "random_irrational_thetas", "rational_denominator_max",
               "tolerance_floor", "oracle_ladder", "oracle_tolerance", "node_budget"),
    "tlab": ("m", "n", "lam", "kind", "cap", "etas", "psi_caps", "round_trip", "round_trip_k0"),
}

LIMITATION_NOTICE = (
    "limitation: the bound interval is asserted for almost every point of the hyperplane; "
    "sampled rows are finite-scale evidence and cannot certify an almost-everywhere statement"
)

_MISSING = object()


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on. Two runs with equal records give equal output."""

    command: str
    params: tuple[tuple[str, str], ...] = ()
    seed: int = 0
    precision_bits: int = DEFAULT_PRECISION_BITS
    ladder: LadderSpec | None = None
    fmt: str = "csv"
    jobs: int = field(default=1, compare=False)

    def get(self, key: str, default=_MISSING) -> str:
        for k, v in self.params:
            if k == key:
                return v
        if default is _MISSING:
            raise ConfigError(f"[{self.command}] needs '{key}'")
        return default

    def get_int(self, key: str, default=_MISSING) -> int:
        raw = self.get(key, default)
        try:
            return int(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'{key}' must be an integer, got {raw!r}") from exc

    def get_fraction(self, key: str, default=_MISSING) -> Fraction:
        raw = self.get(key, default)
        try:
            return Fraction(str(raw).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"'{key}' must be a rational number, got {raw!r}") from exc

    def get_bool(self, key: str, default: bool) -> bool:
        raw = str(self.get(key, str(default))).strip().lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"'{key}' must be a boolean, got {raw!r}")

    def get_choice(self, key: str, enum_cls, default: str):
        raw = self.get(key, default).strip().lower()
        try:
            return enum_cls(raw)
        except ValueError as exc:
            choices = ", ".join(e.value for e in enum_cls)
            raise ConfigError(f"'{key}' must be one of {choices}, got {raw!r}") from exc

    def ladder_or(self, default: str) -> LadderSpec:
        return self.ladder if self.ladder is not None else LadderSpec.parse(default)

    def search_config(self, positive_q: bool | None = None) -> SearchConfig:
        return SearchConfig(
            strategy=self.get_choice("strategy", Strategy, "reduction"),
            precision_bits=self.precision_bits,
            max_precision_bits=max(self.precision_bits,
                                   self.get_int("max_precision_bits", MAX_PRECISION_BITS)),
            node_budget=self.get_int("node_budget", 2_000_000),
            positive_q=self.get_bool("positive_q", False) if positive_q is None else positive_q,
        )

    def as_record(self) -> dict:
        return {
            "command": self.command,
            "seed": self.seed,
            "precision_bits": self.precision_bits,
            "ladder": None if self.ladder is None else str(self.ladder),
            "params": dict(self.params),
        }


def load_config(command: str, path: str | None = None, overrides=(), seed=None,
                precision_bits=None, ladder=None, fmt=None, jobs=None) -> ExperimentConfig:
    """Merge the INI file, ``key=value`` overrides and flags into one config."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
    run = dict(parser["run"]) if parser.has_section("run") else {}
    params = dict(parser[command]) if parser.has_section(command) else {}
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        params[key.strip()] = value.strip()
    unknown = sorted(set(params) - set(PARAMS[command]))
    if unknown:
        raise ConfigError(f"[{command}] does not take {', '.join(unknown)}")

    def pick(flag, key, default):
        return flag if flag is not None else run.get(key, default)

    try:
        seed_v = int(pick(seed, "seed", 0))
        bits_v = int(pick(precision_bits, "precision_bits", DEFAULT_PRECISION_BITS))
        jobs_v = int(pick(jobs, "jobs", 1))
    except ValueError as exc:
        raise ConfigError(f"bad [run] value: {exc}") from exc
    ladder_raw = pick(ladder, "ladder", None)
    try:
        ladder_v = None if ladder_raw is None else LadderSpec.parse(str(ladder_raw))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    fmt_v = str(pick(fmt, "format", "csv")).lower()
    if fmt_v not in FORMATS:
        raise ConfigError(f"format must be csv or json, got {fmt_v!r}")
    if bits_v < 8 or jobs_v < 1:
        raise ConfigError("precision_bits must be >= 8 and jobs >= 1")
    return ExperimentConfig(command, tuple(sorted(params.items())), seed_v, bits_v,
                            ladder_v, fmt_v, jobs_v)


def _unwrap(text: str) -> str:
    # "(a, b)" -> "a, b", but "sqrt(2), sqrt(3)" stays as it is
    if not (text.startswith("(") and text.endswith(")")):
        return text
    depth = 0
    for i, ch in enumerate(text):
        depth += (ch == "(") - (ch == ")")
        if depth == 0 and i < len(text) - 1:
            return text
    return text[1:-1]


def _vector(text: str | None, dim: int | None, bits: int, what: str) -> tuple:
    if text is None:
        return tuple([Fraction(0)] * (dim or 1))
    entries = split_entries(_unwrap(text.strip().strip("[]")))
    if not entries:
        raise ConfigError(f"'{what}' is empty")
    vals = tuple(parse_scalar(e, bits) for e in entries)
    if len(vals) == 1 and vals[0] == 0 and dim is not None:
        vals = vals * dim
    if dim is not None and len(vals) != dim:
        raise DimensionError(f"'{what}' needs {dim} entries, got {len(vals)}")
    return vals


def _matrix(cfg: ExperimentConfig) -> Matrix:
    return Matrix.parse(cfg.get("matrix"), cfg.precision_bits)


def _text(x) -> str:
    return render(x) if not isinstance(x, tuple) else ", ".join(render(v) for v in x)


# ---------------------------------------------------------------------------
# search


def cmd_search(cfg: ExperimentConfig) -> Report:
    X = _matrix(cfg)
    theta = _vector(cfg.get("theta", None), X.m, cfg.precision_bits, "theta")
    objective = cfg.get_choice("objective", Objective, "supnorm")
    scfg = cfg.search_config()
    ladder = cfg.ladder_or("0:10")
    solve = best_supnorm if objective is Objective.SUPNORM else best_multiplicative
    rep = Report("search", cfg.as_record(), [f"config: {json.dumps(cfg.as_record(), sort_keys=True)}",
                                            f"matrix: {X}", f"theta: {_text(theta)}"])
    t = rep.table("witnesses", ["k", "Q", "q", "p", "value", "value_float", "running_min",
                                "exact_solution", "value_error", "bits"])
    running = None
    for Q in ladder.values():
        w = solve(X, theta, Q, scfg)
        running = w.value if running is None else min(running, w.value)
        row = w.as_row()
        t.add({"k": Q.bit_length() - 1, "Q": Q, "q": row["q"], "p": row["p"],
               "value": row["value"], "value_float": float(w.value), "running_min": running,
               "exact_solution": w.exact_solution, "value_error": row["value_error"],
               "bits": row["bits"]})
        if w.exact_solution:
            break
    rep.summary = {"rungs": len(t.rows), "final_value": running}
    return rep


# ---------------------------------------------------------------------------
# estimate


def cmd_estimate(cfg: ExperimentConfig) -> Report:
    mode = cfg.get("mode", "matrix").strip().lower()
    kind = cfg.get_choice("kind", Kind, "ordinary")
    ladder = cfg.ladder_or("1:20")
    tail = cfg.get_fraction("tail", "1/4")
    bits = cfg.precision_bits
    if mode == "matrix":
        X = _matrix(cfg)
        theta = _vector(cfg.get("theta", None), X.m, bits, "theta")
        objective = cfg.get_choice("objective", Objective, "supnorm")
        est = estimate_exponent(X, theta, kind, objective, ladder, cfg.search_config(), tail)
        subject = f"matrix: {X}"
    elif mode in ("simultaneous", "dual"):
        x = _vector(cfg.get("point"), None, bits, "point")
        if mode == "simultaneous":
            theta = _vector(cfg.get("theta", None), len(x), bits, "theta")
            est = specialize_simultaneous(x, theta, kind, ladder, cfg.search_config(), tail)
        else:
            theta = _vector(cfg.get("theta", None), 1, bits, "theta")
            est = specialize_dual(x, theta, kind, ladder, cfg.search_config(), tail)
        subject = f"point: {_text(x)}"
    else:
        raise ConfigError(f"mode must be matrix, simultaneous or dual, got {mode!r}")

    rep = Report("estimate", cfg.as_record(), [f"config: {json.dumps(cfg.as_record(), sort_keys=True)}",
                                              subject, f"theta: {_text(theta)}", f"mode: {mode}"])
    rec = est.as_record()
    s = rep.table("estimate", ["kind", "objective", "value", "ordinary", "uniform", "exact_hit",
                               "window", "window_min", "window_max", "last_octave_range",
                               "failed_rungs"])
    s.add({"kind": rec["kind"], "objective": rec["objective"], "value": est.value,
           "ordinary": est.ordinary, "uniform": est.uniform, "exact_hit": est.exact_hit,
           "window": rec["window"], "window_min": est.window_min, "window_max": est.window_max,
           "last_octave_range": est.last_octave_range,
           "failed_rungs": sum(1 for r in est.rungs if r.error)})
    lad = rep.table("ladder", ["k", "Q", "value", "slope", "q", "error"])
    for r in est.rungs:
        lad.add({"k": r.Q.bit_length() - 1, "Q": r.Q, "value": r.value, "slope": r.slope,
                 "q": r.q, "error": r.error})
    rep.summary = {"value": est.value, "exact_hit": est.exact_hit}
    return rep


# ---------------------------------------------------------------------------
# bounds


def _sandwich(w, n, target, s=None):
    return B.sandwich_hyperplane(w, n, target, s)


CALCULATORS: dict[str, Callable] = {
    "kleinbock_hyperplane_dual": B.kleinbock_hyperplane_dual,
    "zhang_hyperplane_sim": B.zhang_hyperplane_sim,
    "zhang_hyperplane_mult": B.zhang_hyperplane_mult,
    "bl_lower": B.bl_lower,
    "german_hat_bounds_sim": B.german_hat_bounds_sim,
    "german_hat_transpose_lower": B.german_hat_transpose_lower,
    "german_mult_hat_upper": B.german_mult_hat_upper,
    "manifold_inhom_lower_sim": B.manifold_inhom_lower_sim,
    "manifold_inhom_lower_dual": B.manifold_inhom_lower_dual,
    "matrix_inhom_lower": B.matrix_inhom_lower,
    "matrix_mult_inhom_lower": B.matrix_mult_inhom_lower,
    "manifold_mult_inhom_lower_sim": B.manifold_mult_inhom_lower_sim,
    "manifold_mult_inhom_lower_dual": B.manifold_mult_inhom_lower_dual,
    "sandwich": _sandwich,
}

_RANGE_RE = re.compile(r"^range\(([^,]+),([^,]+),([^,]+)\)$")
_INT_KEYS = ("m", "n", "s")
_TEXT_KEYS = ("branch", "target")


def _expand(value: str) -> list[str]:
    m = _RANGE_RE.match(value.replace(" ", ""))
    if not m:
        return [value]
    lo, hi, step = (Fraction(g) for g in m.groups())
    if step <= 0:
        raise ConfigError(f"range step must be positive in {value!r}")
    out, x = [], lo
    while x <= hi:
        out.append(str(x))
        x += step
    return out


def parse_query(line: str) -> list[tuple[str, dict[str, str]]]:
    """``name k=v ...`` into one (name, args) pair per grid point."""
    parts = line.split()
    name, pairs = parts[0], parts[1:]
    if name not in CALCULATORS:
        raise ConfigError(f"unknown calculator {name!r}")
    grid: list[dict[str, str]] = [{}]
    for p in pairs:
        key, sep, value = p.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value in query, got {p!r}")
        grid = [dict(g, **{key: v}) for g in grid for v in _expand(value)]
    return [(name, g) for g in grid]


def _call(name: str, args: dict[str, str]):
    fn = CALCULATORS[name]
    params = list(inspect.signature(fn).parameters)
    kwargs = {}
    for i, pname in enumerate(params):
        key = "w" if i == 0 else pname
        if key not in args:
            if inspect.signature(fn).parameters[pname].default is not inspect.Parameter.empty:
                continue
            raise ConfigError(f"{name} needs '{key}'")
        raw = args[key]
        if key in _INT_KEYS:
            try:
                kwargs[pname] = int(raw)
            except ValueError as exc:
                raise ConfigError(f"'{key}' must be an integer, got {raw!r}") from exc
        elif key in _TEXT_KEYS:
            enum_cls = B.HatBranch if key == "branch" else B.SandwichTarget
            if raw.lower() not in {e.value for e in enum_cls}:
                raise ConfigError(f"'{key}' must be one of {', '.join(e.value for e in enum_cls)}")
            kwargs[pname] = raw
        else:
            try:
                kwargs[pname] = ext_real(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"'{key}' must be an extended real, got {raw!r}") from exc
    extra = set(args) - {"w" if i == 0 else p for i, p in enumerate(params)}
    if extra:
        raise ConfigError(f"{name} does not take {sorted(extra)}")
    return fn(**kwargs)


def cmd_bounds(cfg: ExperimentConfig) -> Report:
    lines = [ln.strip() for ln in cfg.get("queries").splitlines() if ln.strip()]
    if not lines:
        raise ConfigError("[bounds] queries is empty")
    rep = Report("bounds", cfg.as_record(), [f"config: {json.dumps(cfg.as_record(), sort_keys=True)}"])
    t = rep.table("bounds", ["query", "calculator", "args", "lower", "upper", "status",
                             "lower_vacuous", "upper_vacuous", "provenance", "message"])
    flagged = 0
    for line in lines:
        for name, args in parse_query(line):
            row = {"query": line, "calculator": name,
                   "args": " ".join(f"{k}={v}" for k, v in args.items())}
            try:
                res = _call(name, args)
            except DomainError as exc:
                flagged += 1
                row.update(status="DomainError", message=str(exc))
                t.add(row)
                continue
            if isinstance(res, B.BoundInterval):
                row.update(lower=render(res.lower), upper=render(res.upper),
                           lower_vacuous=res.lower_vacuous, upper_vacuous=res.upper_vacuous,
                           provenance=" ".join(res.provenance))
            else:
                row.update(lower=render(res), upper=render(res), provenance=name)
            row["status"] = "ok"
            t.add(row)
    rep.summary = {"rows": len(t.rows), "domain_errors": flagged}
    return rep


# ---------------------------------------------------------------------------
# verify


@dataclass(frozen=True)
class VerifyJob:
    """One (sample, theta) row; all fields are text so the job pickles."""

    point_id: int
    a: tuple[str, ...]
    y: tuple[tuple[str, str, str], ...]  # (low, width, key) per coordinate
    theta: tuple[str, ...]
    target: str
    s: int | None
    a_exponent: str
    ladder: str
    tolerance_floor: str
    precision_bits: int
    node_budget: int


def _classify(value: float, lo: float, hi: float, tol: float) -> str:
    if lo <= value <= hi:
        return "pass"
    if lo - tol <= value <= hi + tol:
        return "indeterminate"
    return "fail"


def _sample_y(low: str, width: str, key: str, bits: int):
    u = PrecisionReal.uniform(key, bits)
    lo, wd = Fraction(low), Fraction(width)
    if lo == 0 and wd == 1:
        return u
    return PrecisionReal.linear(lo, [(wd, u)], name=f"{render(lo)} + {render(wd)}*{u.name}")


def verify_row(job: VerifyJob) -> dict:
    """Estimate one row and compare it with the interval (and the control on theta = 0)."""
    bits = job.precision_bits
    a = tuple(parse_scalar(v, bits) for v in job.a)
    n = len(a) + 1
    y = tuple(_sample_y(*spec, bits) for spec in job.y)
    theta = tuple(parse_scalar(v, bits) for v in job.theta)
    w = ext_real(job.a_exponent)
    scfg = SearchConfig(precision_bits=bits, node_budget=job.node_budget)
    interval, control = _interval_and_control(w, n, job.target, job.s)
    row = {"point_id": job.point_id, "y": " ".join(f"{float(v):.12g}" for v in y),
           "y_spec": " ".join(v.name for v in y), "theta": " ".join(job.theta),
           "lower": render(interval.lower), "upper": render(interval.upper)}
    zero = all(not isinstance(v, PrecisionReal) and v == 0 for v in theta)
    try:
        x = hyperplane_point(HyperplaneSpec(n, a), y)
        if job.target == "sim":
            est = specialize_simultaneous(x, theta, ladder=job.ladder, cfg=scfg)
        else:
            est = specialize_dual(x, theta, ladder=job.ladder, cfg=scfg)
    except (InsufficientLadder, PrecisionExhausted, BudgetExceeded) as exc:
        row.update(status="indeterminate", reason=f"{type(exc).__name__}: {exc}")
        return row
    tol = max(float(Fraction(job.tolerance_floor)), est.last_octave_range or 0.0)
    value = est.ordinary
    row.update(estimate=value, uniform=est.uniform, window_min=est.window_min,
               window_max=est.window_max, last_octave_range=est.last_octave_range,
               tolerance=tol, failed_rungs=sum(1 for r in est.rungs if r.error),
               status=_classify(value, float(interval.lower), float(interval.upper), tol))
    if row["status"] == "indeterminate":
        row["reason"] = "outside the interval by less than the tolerance"
    if zero:
        row["control"] = render(control)
        row["control_status"] = "pass" if abs(value - float(control)) <= tol else "fail"
    return row


def _interval_and_control(w, n: int, target: str, s: int | None):
    if target == "sim":
        return (B.sandwich_hyperplane(w, n, B.SandwichTarget.SIM_INHOM),
                B.zhang_hyperplane_sim(w, n))
    return (B.sandwich_hyperplane(w, n, B.SandwichTarget.DUAL_INHOM, s),
            B.kleinbock_hyperplane_dual(w, n))


def _fixture_point(text: str, bits: int, claimed) -> ConstructedPoint:
    low = text.replace(" ", "").lower()
    if low.startswith("liouville(") and low.endswith(")"):
        tau, levels = low[len("liouville("):-1].split(",")
        pt = liouville_number(Fraction(tau), int(levels))
        return ConstructedPoint(pt.name, pt.value, claimed, pt.construction_log, pt.ladder_cap)
    return ConstructedPoint(text, parse_scalar(text, bits), claimed)


def _oracle(a_texts, target: str, claimed, ladder: LadderSpec, rel: float, bits: int) -> dict:
    """Check the parameter exponent before any row relies on it."""
    if len(a_texts) == 1:
        rec = verify_oracle(_fixture_point(a_texts[0], bits, claimed), ladder, rel)
        return {"name": rec.name, "ladder": rec.ladder, "tail_max": rec.tail_max,
                "passed": rec.passed}
    a = tuple(parse_scalar(v, bits) for v in a_texts)
    # the interval needs the dual exponent of a for sim rows and the simultaneous one for dual rows
    est = specialize_dual(a, ladder=ladder) if target == "sim" else \
        specialize_simultaneous(a, ladder=ladder)
    c = float(claimed)
    passed = est.exact_hit if math.isinf(c) else abs(est.ordinary - c) <= rel * c
    return {"name": ", ".join(a_texts), "ladder": str(ladder), "tail_max": est.ordinary,
            "passed": passed}


def _thetas(cfg: ExperimentConfig, m: int) -> list[tuple[str, ...]]:
    out = []
    for chunk in cfg.get("thetas", "0").split(";"):
        if chunk.strip():
            vals = _vector(chunk, m, cfg.precision_bits, "thetas")
            out.append(tuple(render(v) for v in vals))
    rng = np.random.default_rng(cfg.seed)
    dmax = cfg.get_int("rational_denominator_max", 50)
    if dmax < 2:
        raise ConfigError("rational_denominator_max must be at least 2")
    for _ in range(cfg.get_int("random_rational_thetas", 0)):
        row = []
        for _ in range(m):
            d = int(rng.integers(2, dmax + 1))
            row.append(render(Fraction(int(rng.integers(1, d)), d)))
        out.append(tuple(row))
    for i in range(cfg.get_int("random_irrational_thetas", 0)):
        out.append(tuple(f"uniform({cfg.seed}:theta:{i}:{j})" for j in range(m)))
    return out


def cmd_verify(cfg: ExperimentConfig) -> Report:
    bits = cfg.precision_bits
    a_texts = tuple(split_entries(cfg.get("a")))
    n = len(a_texts) + 1
    if n < 2:
        raise ConfigError("'a' needs at least one entry")
    target = cfg.get("target", "sim").strip().lower()
    if target not in ("sim", "dual"):
        raise ConfigError(f"target must be sim or dual, got {target!r}")
    claimed = ext_real(cfg.get("a_exponent"))
    s = None
    if target == "dual":
        s = cfg.get_int("s", HyperplaneSpec(n, tuple(parse_scalar(v, bits) for v in a_texts)).s_count)
    interval, control = _interval_and_control(claimed, n, target, s)
    ladder = cfg.ladder_or("1:32")
    samples = cfg.get_int("samples", 50)
    box = [Fraction(v) for v in cfg.get("y_box", "0,1").split(",")]
    if len(box) != 2 or box[1] <= box[0]:
        raise ConfigError("y_box must be 'low,high' with low < high")
    m = n if target == "sim" else 1
    thetas = _thetas(cfg, m)
    tol_floor = cfg.get("tolerance_floor", "0.05")
    oracle_ladder = LadderSpec.parse(cfg.get("oracle_ladder", "1:50"))
    oracle = _oracle(a_texts, target, claimed, oracle_ladder,
                     float(cfg.get_fraction("oracle_tolerance", "1/10")), bits)

    jobs = []
    for i in range(samples):
        y = tuple((str(box[0]), str(box[1] - box[0]), f"{cfg.seed}:y:{i}:{j}") for j in range(n - 1))
        for th in thetas:
            jobs.append(VerifyJob(i, a_texts, y, th, target, s, render(claimed), str(ladder),
                                  tol_floor, bits, cfg.get_int("node_budget", 2_000_000)))
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(verify_row, jobs, chunksize=1))
    else:
        rows = [verify_row(j) for j in jobs]

    header = [
        LIMITATION_NOTICE,
        f"config: {json.dumps(cfg.as_record(), sort_keys=True)}",
        f"fixture: hyperplane n={n} a=({', '.join(a_texts)}) target={target}"
        + (f" s={s}" if s is not None else ""),
        f"oracle: {oracle['name']} claimed={render(claimed)} ladder={oracle['ladder']} "
        f"tail_max={oracle['tail_max']:.6g} passed={str(oracle['passed']).lower()}",
        f"interval: [{interval}] from {' + '.join(interval.provenance)}",
        f"control: theta = 0 rows are also compared with {render(control)}",
        f"tolerance: max({tol_floor}, last-octave slope range) per row",
        f"sampling: {samples} points with y uniform in [{render(box[0])}, {render(box[1])})"
        f"^{n - 1}, {len(thetas)} shifts each",
    ]
    rep = Report("verify", cfg.as_record(), header)
    t = rep.table("rows", ["point_id", "y", "y_spec", "theta", "estimate", "uniform",
                           "window_min", "window_max", "last_octave_range", "tolerance",
                           "lower", "upper", "status", "control", "control_status",
                           "failed_rungs", "reason"])
    for r in rows:
        t.add(r)
    counts = {k: sum(1 for r in rows if r["status"] == k) for k in ("pass", "indeterminate", "fail")}
    ctrl = [r for r in rows if "control_status" in r]
    ctrl_fail = sum(1 for r in ctrl if r["control_status"] == "fail")
    failed_rows = sum(1 for r in rows if r["status"] == "fail" or r.get("control_status") == "fail")
    hard = failed_rows + (0 if oracle["passed"] else 1)
    rep.summary = {
        "rows": len(rows),
        "pass": counts["pass"],
        "indeterminate": counts["indeterminate"],
        "fail": counts["fail"],
        "indeterminate_rate": round(counts["indeterminate"] / len(rows), 6) if rows else 0.0,
        "fail_rate": round(counts["fail"] / len(rows), 6) if rows else 0.0,
        "control_rows": len(ctrl),
        "control_fail": ctrl_fail,
        "oracle_passed": oracle["passed"],
        "hard_failures": hard,
    }
    return rep


# ---------------------------------------------------------------------------
# tlab


def cmd_tlab(cfg: ExperimentConfig) -> Report:
    m, n = cfg.get_int("m", 1), cfg.get_int("n", 1)
    lam = cfg.get_fraction("lam", "1")
    kind = cfg.get_choice("kind", RateKind, "multiplicative")
    cap = cfg.get_fraction("cap", "4")
    etas = [Fraction(e) for e in cfg.get("etas", "1/4, 1/16").split(",")]
    caps = [Fraction(c) for c in cfg.get("psi_caps", "16, 32, 48, 64, 80, 96").split(",")]
    lp = LambdaParam(lam, kind)
    rep = Report("tlab", cfg.as_record(), [f"config: {json.dumps(cfg.as_record(), sort_keys=True)}",
                                          f"m={m} n={n} lambda={render(lam)} kind={kind.value}"])
    members = enumerate_T(m, n, lp, cap)
    names = list(members[0].check_identities()) if members else []
    tt = rep.table("T", ["s", "l", "zeta", "t", "sigma_t", *names])
    identity_failures = 0
    for w in members:
        checks = w.check_identities()
        identity_failures += sum(1 for v in checks.values() if not v)
        tt.add({**w.as_row(), **checks})

    pt = rep.table("psi", ["eta", "cap", "members", "partial_sum", "increment"])
    for eta in etas:
        prev = None
        for c, count, total in psi_partial_sums(m, n, lp, eta, caps):
            pt.add({"eta": eta, "cap": c, "members": count, "partial_sum": total,
                    "increment": None if prev is None else total - prev})
            prev = total

    counts = {s.value: 0 for s in RoundTripStatus}
    if cfg.get_bool("round_trip", True):
        rt = rep.table("round_trip", ["case", "status", "Q_in", "s", "l", "zeta", "t", "sigma_t",
                                      "eta0", "eta", "log2_Q_out", "epsilon_out", "detail"])
        scfg = SearchConfig(precision_bits=cfg.precision_bits)
        for case in round_trip_suite(cfg.get_int("round_trip_k0", 3), cfg=scfg):
            rec = round_trip(case.X, case.theta, case.witness, case.epsilon_rate, case.lam,
                             bits=cfg.precision_bits)
            counts[rec.status.value] += 1
            rt.add({"case": f"{case.name} eps={render(case.epsilon_rate)}", **rec.as_row()})
    rep.summary = {"T_members": len(members), "identity_failures": identity_failures,
                   **{f"round_trip_{k}": v for k, v in counts.items()},
                   "hard_failures": identity_failures + counts["fail"]}
    return rep


# ---------------------------------------------------------------------------
# Entry point


HANDLERS: dict[str, Callable[[ExperimentConfig], Report]] = {
    "search": cmd_search,
    "estimate": cmd_estimate,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "tlab": cmd_tlab,
}


def run(cfg: ExperimentConfig) -> Report:
    return HANDLERS[cfg.command](cfg)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diophlab",
                                description="Diophantine exponent experiments from the command line.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="INI file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one parameter of this command")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--precision-bits", type=int)
        sp.add_argument("--ladder", help="dyadic ladder k0:k1")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--jobs", type=int, help="worker processes for verify rows")
    pl = sub.add_parser("plot", help="render PNG figures from a CSV report")
    pl.add_argument("report", help="CSV written by estimate, verify or tlab")
    pl.add_argument("--out", required=True, help="output directory")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "plot":
        from .plotting import plot_report

        try:
            for path in plot_report(args.report, args.out):
                print(path)
        except (OSError, ConfigError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK
    try:
        cfg = load_config(args.command, args.config, args.set, args.seed, args.precision_bits,
                          args.ladder, args.format, args.jobs)
        report = run(cfg)
    except (ConfigError, DomainError, DimensionError, InsufficientLadder) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DiophlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(cfg.fmt)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the interpreter's final flush
            sys.stdout = open(os.devnull, "w")
    return EXIT_HARD_FAIL if report.summary.get("hard_failures", 0) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
