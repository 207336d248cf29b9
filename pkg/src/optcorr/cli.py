"""Command-line entry point: ``optcorr {sweep,point,optimize,factorize,fit}``.

Settings come from flags and, optionally, a JSON config file whose keys
mirror :class:`RunConfig`; flags win over the file. Rows are written as CSV
(flattened to the first optimum) or JSON lines (full optima list).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .analysis import (
    STRATEGY_NAMES,
    SweepRow,
    detect_factorization,
    factorization_field_for_couplings,
    fit_points_from_rows,
    fit_theta_opt,
    strategies_for,
    sweep,
)
from .errors import InvalidInputError, NoFactorizationError
from .spinchain import CRITICAL_FIELDS, MODELS, ModelSpec, model_spec

SUBCOMMANDS = ("sweep", "point", "optimize", "factorize", "fit")
FORMATS = ("csv", "jsonl")

COLUMNS = (
    "model", "L", "h", "hx", "r", "strategy", "S_A", "S_B", "S_AB", "I", "S_C", "C", "Q",
    "C_max", "theta_opt", "phi_opt", "n_optima", "flat_theta", "flat_phi", "sx_mid", "sz_mid",
)
_INT_COLUMNS = {"L", "r", "n_optima"}
_BOOL_COLUMNS = {"flat_theta", "flat_phi"}
_STR_COLUMNS = {"model", "strategy"}


class ConfigError(Exception):
    """Bad flags or config file (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str = "sweep"
    model: str = "ising"
    Jx: float | None = None
    Jy: float | None = None
    Jz: float | None = None
    L: int = 14
    hx: float | None = None  # None: the model's default bias
    h: tuple = (0.0, 0.0, 1)  # lo, hi, count (inclusive)
    r: tuple = (1,)
    strategies: tuple = ("proj-z",)
    n_theta: int = 61
    n_phi: int = 121
    bracket: tuple | None = None
    tol: float = 1e-4
    fit_n: int = 8
    input: str | None = None
    output: str | None = None
    format: str = "csv"

    def h_values(self) -> np.ndarray:
        lo, hi, count = self.h
        return np.linspace(lo, hi, count)

    def model_spec(self, h: float = 0.0) -> ModelSpec:
        couplings = {k: v for k, v in (("Jx", self.Jx), ("Jy", self.Jy), ("Jz", self.Jz)) if v is not None}
        if self.model == "custom":
            if len(couplings) != 3:
                raise InvalidInputError("--model custom needs --Jx, --Jy and --Jz")
            return ModelSpec(h=float(h), L=self.L, hx=self.hx or 0.0, **couplings)
        return model_spec(self.model, h, self.L, self.hx, **couplings)

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.model != "custom" and self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {sorted(MODELS) + ['custom']}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if len(self.h) != 3 or int(self.h[2]) < 1 or self.h[0] > self.h[1]:
            raise ConfigError(f"bad field grid {self.h!r}")
        if self.subcommand in ("point", "optimize") and self.h[2] != 1:
            raise ConfigError(f"{self.subcommand} takes a single field value")
        if not self.r or min(self.r) < 1:
            raise ConfigError("separations must be >= 1")
        if not self.strategies:
            raise ConfigError("strategy list is empty")
        for name in self.strategies:
            if name not in STRATEGY_NAMES:
                raise ConfigError(f"unknown strategy {name!r}; choose from {sorted(STRATEGY_NAMES)}")
        if self.output is not None:
            parent = os.path.dirname(os.path.abspath(self.output))
            if not os.access(parent, os.W_OK):
                raise ConfigError(f"output directory {parent} is not writable")
        if self.subcommand == "factorize" and (self.bracket is None or not self.bracket[0] < self.bracket[1]):
            raise ConfigError("factorize needs --bracket lo:hi with lo < hi")
        try:
            spec = self.model_spec(self.h[0])
            strategies_for(spec, self.strategies, self.n_theta, self.n_phi)
            for r in self.r:
                if r + spec.L // 2 - 1 >= spec.L:
                    raise InvalidInputError(f"separation r={r} does not fit in L={spec.L}")
        except InvalidInputError as exc:
            raise ConfigError(str(exc)) from None
        return self


# --- parsing ----------------------------------------------------------------


def parse_grid(text) -> tuple[float, float, int]:
    """'lo:hi:count' (endpoints included) or a single value."""
    if isinstance(text, (list, tuple)):
        parts = [str(x) for x in text]
    else:
        parts = str(text).split(":")
    try:
        if len(parts) == 1:
            x = float(parts[0])
            return (x, x, 1)
        if len(parts) == 3:
            return (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise ConfigError(f"bad grid {text!r}; expected lo:hi:count or a number")


def parse_bracket(text) -> tuple[float, float]:
    parts = [str(x) for x in text] if isinstance(text, (list, tuple)) else str(text).split(":")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad bracket {text!r}; expected lo:hi") from None
    return lo, hi


def _int_list(text) -> tuple[int, ...]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        return tuple(int(x) for x in items)
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


def _str_list(text) -> tuple[str, ...]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    return tuple(str(x).strip() for x in items if str(x).strip())


_CONVERTERS = {
    "h": parse_grid,
    "bracket": parse_bracket,
    "r": _int_list,
    "strategies": _str_list,
    "L": int,
    "n_theta": int,
    "n_phi": int,
    "fit_n": int,
    "hx": float,
    "Jx": float,
    "Jy": float,
    "Jz": float,
    "tol": float,
}


def _coerce(key: str, value):
    if value is None:
        return None
    conv = _CONVERTERS.get(key)
    if conv is None:
        return value
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)} | {"strategy"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    return data


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optcorr", description="Measurement-optimized correlations in spin chains.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    S = argparse.SUPPRESS
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, argument_default=S)
        p.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        p.add_argument("--model", help="ising, xyx, xxz or custom")
        p.add_argument("--Jx", type=float)
        p.add_argument("--Jy", type=float)
        p.add_argument("--Jz", type=float)
        p.add_argument("--L", "-L", type=int)
        p.add_argument("--hx", type=float, help="symmetry-breaking bias (model default if omitted)")
        p.add_argument("--h", help="field grid lo:hi:count, or a single value")
        p.add_argument("--r", help="comma-separated separations")
        p.add_argument("--strategies", "--strategy", dest="strategies", help=f"comma list from {','.join(STRATEGY_NAMES)}")
        p.add_argument("--n-theta", dest="n_theta", type=int)
        p.add_argument("--n-phi", dest="n_phi", type=int)
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--output", "-o", help="output file (default: standard output)")
        if name == "factorize":
            p.add_argument("--bracket", help="field bracket lo:hi")
            p.add_argument("--tol", type=float, help="bracket length at which the search stops")
        if name == "fit":
            p.add_argument("--input", help="CSV of proj-rot rows; computed from --h when omitted")
            p.add_argument("--fit-n", dest="fit_n", type=int, help="exponent n of the order parameter")
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    merged: dict = {"format": "jsonl"} if ns["subcommand"] == "optimize" else {}
    if ns["subcommand"] == "fit":
        merged["strategies"] = ("proj-rot",)
    if "config" in ns:
        merged.update(load_config_file(ns.pop("config")))
    merged.update(ns)
    if "strategy" in merged:
        merged.setdefault("strategies", merged.pop("strategy"))
    values = {k: _coerce(k, v) for k, v in merged.items()}
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --- output -----------------------------------------------------------------


def format_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.11e}"


def _round12(x):
    if isinstance(x, float):
        return None if math.isnan(x) else float(f"{x:.11e}")
    if isinstance(x, dict):
        return {k: _round12(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_round12(v) for v in x]
    return x


def row_cells(row: SweepRow) -> list[str]:
    out = []
    for name in COLUMNS:
        v = getattr(row, name)
        if name in _STR_COLUMNS:
            out.append(str(v))
        elif name in _BOOL_COLUMNS:
            out.append("1" if v else "0")
        elif name in _INT_COLUMNS:
            out.append(str(int(v)))
        else:
            out.append(format_float(v))
    return out


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(row_cells(row))
    return buf.getvalue()


def row_record(row: SweepRow) -> dict:
    rec = {name: getattr(row, name) for name in COLUMNS}
    rec["flat_theta"], rec["flat_phi"] = bool(row.flat_theta), bool(row.flat_phi)
    rec["optima"] = row.optima
    rec["error"] = row.error
    return _round12({k: (float(v) if isinstance(v, np.floating) else v) for k, v in rec.items()})


def rows_to_jsonl(rows) -> str:
    return "".join(json.dumps(row_record(r)) + "\n" for r in rows)


def read_csv_rows(text: str) -> list[SweepRow]:
    """Parse CSV written by :func:`rows_to_csv` back into rows."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != COLUMNS:
        raise InvalidInputError("CSV header does not match the sweep schema")
    rows = []
    for cells in reader:
        if len(cells) != len(COLUMNS):
            raise InvalidInputError(f"CSV row has {len(cells)} cells, expected {len(COLUMNS)}")
        kw = {}
        for name, cell in zip(COLUMNS, cells):
            if name in _STR_COLUMNS:
                kw[name] = cell
            elif name in _BOOL_COLUMNS:
                kw[name] = cell == "1"
            elif name in _INT_COLUMNS:
                kw[name] = int(cell)
            else:
                kw[name] = float(cell)
        rows.append(SweepRow(**kw))
    return rows


def read_jsonl_rows(text: str) -> list[SweepRow]:
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        kw = {k: (np.nan if v is None and k not in _STR_COLUMNS else v) for k, v in rec.items() if k in COLUMNS}
        rows.append(SweepRow(**kw, optima=rec.get("optima", []), error=rec.get("error")))
    return rows


def _emit(cfg: RunConfig, text: str):
    if cfg.output is None:
        sys.stdout.write(text)
        return
    with open(cfg.output, "w", newline="") as fh:
        fh.write(text)


# --- subcommands ------------------------------------------------------------


def compute_rows(cfg: RunConfig) -> list[SweepRow]:
    return sweep(
        cfg.model_spec(cfg.h[0]), cfg.h_values(), cfg.r, cfg.strategies, model=cfg.model,
        n_theta=cfg.n_theta, n_phi=cfg.n_phi,
    )


def run_rows(cfg: RunConfig) -> int:
    rows = compute_rows(cfg)
    _emit(cfg, rows_to_csv(rows) if cfg.format == "csv" else rows_to_jsonl(rows))
    status = 0
    for n, row in enumerate(rows, start=1):
        if row.error is not None:
            print(f"error: row {n} (h={row.h:.12g}, r={row.r}, strategy={row.strategy}): {row.error}", file=sys.stderr)
            status = 1
    return status


def run_factorize(cfg: RunConfig) -> int:
    spec = cfg.model_spec(cfg.bracket[0])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = detect_factorization(spec, *cfg.bracket, r=cfg.r[0], tol=cfg.tol)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    try:
        h_formula = factorization_field_for_couplings(spec.Jx, spec.Jy, spec.Jz)
    except (NoFactorizationError, InvalidInputError):
        h_formula = None
    rec = {
        "model": cfg.model, "L": spec.L, "hx": spec.hx, "r": cfg.r[0],
        "bracket": list(cfg.bracket), "h_min": res.h_min, "I_min": res.I_min,
        "at_endpoint": res.at_endpoint, "n_evals": res.n_evals, "h_f_formula": h_formula,
    }
    _emit(cfg, json.dumps(_round12(rec)) + "\n")
    return 0


def run_fit(cfg: RunConfig) -> int:
    if cfg.input is not None:
        try:
            with open(cfg.input) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read {cfg.input}: {exc}") from None
        rows = read_csv_rows(text) if cfg.input.endswith(".csv") else read_jsonl_rows(text)
        rows = [r for r in rows if r.strategy == "proj-rot"]
        step = float(np.min(np.diff(sorted({r.h for r in rows})))) if len(rows) > 1 else 0.0
    else:
        rows = compute_rows(replace(cfg, strategies=("proj-rot",), r=cfg.r[:1]))
        bad = [r for r in rows if r.error is not None]
        if bad:
            print(f"error: fit point h={bad[0].h:.12g}: {bad[0].error}", file=sys.stderr)
            return 1
        step = (cfg.h[1] - cfg.h[0]) / max(cfg.h[2] - 1, 1)
    h_c = CRITICAL_FIELDS.get(cfg.model)
    points = fit_points_from_rows(rows, h_c, 0.5 * step)
    fit = fit_theta_opt(points, n=cfg.fit_n)
    rec = {"model": cfg.model, "n_points": len(points), **asdict(fit)}
    _emit(cfg, json.dumps(_round12(rec)) + "\n")
    return 0


def run(cfg: RunConfig) -> int:
    if cfg.subcommand == "factorize":
        return run_factorize(cfg)
    if cfg.subcommand == "fit":
        return run_fit(cfg)
    return run_rows(cfg)


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a compute failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
