"""Command-line front end.

    dualseries propagate --model m.txt --t1 20 --steps 2000 --out u.csv
    dualseries expand    --model m.txt --series dual --order 2 --out orders/
    dualseries diagnose  --model m.txt --order 1 --out report.json
    dualseries resum     --model m.txt --order 2 --out resum.json

The model file is plain ``key=value`` text, one pair per line, ``#`` comments
allowed. ``kind`` is one of schwinger, jc, driven_tls.
Exit codes: 0 ok, 2 bad configuration, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import (
    jc_resummed_propagator,
    max_entry_error,
    resum_jc_shift,
    secular_slope,
    validity_report,
)
from .errors import ConfigError, InvalidParam, NumericError, WindowTooShort, WrongModelKind
from .expansion import MAX_ORDER, driven_tls_series, dual_dyson_expand, dyson_expand
from .models import (
    HamiltonianModel,
    ModelKind,
    make_driven_tls,
    make_jaynes_cummings,
    make_schwinger_spin,
)
from .numerics import TimeGrid
from .oracle import oracle_path, resummed_driven_tls_propagator
from .spectral import DEFAULT_GAP_TOL

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
MIN_STEPS = 16

# kind -> (constructor, default parameters)
MODEL_KINDS = {
    "schwinger": (make_schwinger_spin, {"omega0": 1.0, "omega": 0.2, "theta": 1.0}),
    "jc": (make_jaynes_cummings, {"g": 1.0, "delta": 0.2, "photon_n": 0}),
    "driven_tls": (make_driven_tls, {"epsilon": 0.1, "V": 5.0, "omega0": 1.0}),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: dict
    t0: float
    t1: float
    steps: int
    order: int = 1
    series: str = "dual"
    oracle: str = "auto"
    lam: float = 1.0
    period: float | None = None
    gap_tol: float = DEFAULT_GAP_TOL
    out: str = field(default="-", compare=False)

    def __post_init__(self):
        if self.steps < MIN_STEPS:
            raise InvalidParam(f"--steps must be at least {MIN_STEPS}")
        if not 0 <= self.order <= MAX_ORDER:
            raise InvalidParam(f"--order must lie in 0..{MAX_ORDER}")

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.t1, self.steps)

    def digest(self) -> str:
        """sha256 of the canonical JSON form (output path excluded)."""
        payload = asdict(self)
        payload.pop("out")
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_model_text(text: str) -> dict:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParam(f"model file line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in entries:
            raise InvalidParam(f"model file line {lineno}: duplicate key {key!r}")
        entries[key] = value
    if "kind" not in entries:
        raise InvalidParam("model file has no kind")
    kind = entries.pop("kind").lower()
    if kind not in MODEL_KINDS:
        raise WrongModelKind(f"unknown model kind {kind!r}; choose from {', '.join(MODEL_KINDS)}")
    _, defaults = MODEL_KINDS[kind]
    desc = {"kind": kind, **defaults, "hbar": 1.0}
    for key, value in entries.items():
        if key == "picture" and kind == "driven_tls":
            desc[key] = value
            continue
        if key not in desc:
            raise InvalidParam(f"unknown parameter {key!r} for kind {kind}")
        try:
            desc[key] = int(value) if key == "photon_n" else float(value)
        except ValueError:
            raise InvalidParam(f"parameter {key}={value!r} is not a number") from None
    return desc


def build_model(desc: dict) -> HamiltonianModel:
    params = dict(desc)
    ctor, _ = MODEL_KINDS[params.pop("kind")]
    for key, value in params.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise InvalidParam(f"parameter {key} must be finite")
    return ctor(**params)


def _num(x):
    """JSON-safe float: NaN and infinities become null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return _num(obj)


def csv_text(cfg: RunConfig, times: np.ndarray, path: np.ndarray) -> str:
    n = path.shape[-1]
    header = ["t"]
    for i in range(n):
        for j in range(n):
            header += [f"u{i}{j}_re", f"u{i}{j}_im"]
    lines = [f"# config-hash: {cfg.digest()}", ",".join(header)]
    flat = path.reshape(path.shape[0], -1)
    for t, row in zip(times, flat):
        vals = [float(t)]
        for z in row:
            vals += [float(z.real), float(z.imag)]
        lines.append(",".join(repr(v) for v in vals))
    return "\n".join(lines) + "\n"


def json_text(cfg: RunConfig, payload: dict) -> str:
    body = {**_clean(payload), "config_hash": cfg.digest()}
    return json.dumps(body, indent=2, allow_nan=False) + "\n"


def cmd_propagate(cfg: RunConfig, model: HamiltonianModel) -> dict[str, str]:
    grid = cfg.grid
    return {cfg.out: csv_text(cfg, grid.points, oracle_path(model, grid, cfg.oracle))}


def _series(cfg: RunConfig, model: HamiltonianModel):
    grid = cfg.grid
    if cfg.series == "dyson":
        return dyson_expand(model, grid, cfg.order, lam=cfg.lam)
    if model.kind is ModelKind.DRIVEN_TLS:
        return driven_tls_series(model, grid, cfg.order)
    return dual_dyson_expand(model, grid, cfg.order, gap_tol=cfg.gap_tol)


def cmd_expand(cfg: RunConfig, model: HamiltonianModel) -> dict[str, str]:
    series = _series(cfg, model)
    out = Path(cfg.out)
    files = {
        str(out / f"order_{j}.csv"): csv_text(cfg, series.grid.points, series.orders[j])
        for j in range(series.max_order + 1)
    }
    summary = {
        "kind": series.kind.value,
        "lambda": series.lam,
        "orders": series.max_order,
        "sup_norm_per_order": series.sup_norms(),
    }
    files[str(out / "summary.json")] = json_text(cfg, summary)
    return files


def cmd_diagnose(cfg: RunConfig, model: HamiltonianModel) -> dict[str, str]:
    report = validity_report(model, cfg.grid, cfg.order, oracle=cfg.oracle, period_hint=cfg.period, gap_tol=cfg.gap_tol)
    return {cfg.out: json_text(cfg, report.to_dict())}


def _slope_or_none(curve, times, period):
    try:
        fit = secular_slope(curve, times, period)
    except WindowTooShort:
        return None
    return {**fit.to_dict(), "period_hint": period}


def cmd_resum(cfg: RunConfig, model: HamiltonianModel) -> dict[str, str]:
    grid = cfg.grid
    t = grid.points
    reference = oracle_path(model, grid, cfg.oracle)
    if model.kind is ModelKind.JAYNES_CUMMINGS:
        shifted = resum_jc_shift(model)
        before = dyson_expand(model, grid, cfg.order).partial_sums(cfg.order)
        after = jc_resummed_propagator(shifted, t)
        period = cfg.period or math.pi / abs(model.params["delta"])
        method = {"before": f"dyson order {cfg.order}", "after": "detuning shift", "resummed_delta": shifted.params["resummed_delta"]}
    elif model.kind is ModelKind.DRIVEN_TLS:
        before = driven_tls_series(model, grid, cfg.order).partial_sums(cfg.order)
        after = resummed_driven_tls_propagator(model, t)
        period = cfg.period or 2 * math.pi / model.params["omega0"]
        method = {"before": f"adiabatic series order {cfg.order}", "after": "J0-renormalized splitting"}
    else:
        raise WrongModelKind("resum supports kind=jc and kind=driven_tls")
    err_before = max_entry_error(before, reference)
    err_after = max_entry_error(after, reference)
    payload = {
        "before": [[float(a), float(b)] for a, b in zip(t, err_before)],
        "after": [[float(a), float(b)] for a, b in zip(t, err_after)],
        "slopes": {
            "before": _slope_or_none(err_before, t, period),
            "after": _slope_or_none(err_after, t, period),
        },
        "method": method,
    }
    return {cfg.out: json_text(cfg, payload)}


COMMANDS = {"propagate": cmd_propagate, "expand": cmd_expand, "diagnose": cmd_diagnose, "resum": cmd_resum}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dualseries", description="Adiabatic (dual Dyson) series experiments on two-level models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--model", required=True, help="key=value model file")
        p.add_argument("--t0", type=float, default=0.0)
        p.add_argument("--t1", type=float, default=10.0)
        p.add_argument("--steps", type=int, default=1000)
        p.add_argument("--order", type=int, default=1, help=f"truncation order K (0..{MAX_ORDER})")
        p.add_argument("--series", choices=["dyson", "dual"], default="dual")
        p.add_argument("--oracle", choices=["auto", "numeric"], default="auto")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="Dyson coupling scale")
        p.add_argument("--period", type=float, default=None, help="window length for slope fits")
        p.add_argument("--gap-tol", type=float, default=DEFAULT_GAP_TOL)
        p.add_argument("--out", required=True, help="output file (directory for expand)")
    return parser


def _write(files: dict[str, str]):
    for name, text in files.items():
        path = Path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        desc = parse_model_text(Path(args.model).read_text())
    except OSError as exc:
        print(f"error: cannot read model file: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = RunConfig(
            command=args.command,
            model=desc,
            t0=args.t0,
            t1=args.t1,
            steps=args.steps,
            order=args.order,
            series=args.series,
            oracle=args.oracle,
            lam=args.lam,
            period=args.period,
            gap_tol=args.gap_tol,
            out=args.out,
        )
        cfg.grid  # validates the interval
        files = COMMANDS[args.command](cfg, build_model(desc))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        _write(files)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
