"""Command-line front end: evaluators, scans, and verification reports.

Commands
    specfun            evaluate exp_mu and |exp_mu(is)|^2 with diagnostics
    trace              both trace evaluators on one pair of interval sets
    scan               deviation table over a mu grid (CSV/JSON, optional SVG)
    verify-identities  exact checks of the binomial-polynomial identities
    check-operators    commutation relation, equations of motion, intertwining

Flag values override config-file values, which override defaults.  With a
fixed configuration (including the seed) the CSV and JSON outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact, operators
from .core import (MuContext, SeriesResult, abs2_exp_mu_imag,
                   exp_mu_integral, exp_mu_series)
from .errors import EvaluationError
from .intervals import format_interval_set, parse_interval_set
from .trace import (DEFAULT_MU_GRID, DEFAULT_PAIRS, QuadratureSpec, ScanRow,
                    deviation_scan, rows_to_csv, rows_to_json,
                    trace_moment_series, trace_quadrature)

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    """Resolved configuration for one CLI invocation."""

    command: str
    mu: float | None = None
    mu_grid: tuple[float, ...] | None = None
    set_a: str | None = None
    set_b: str | None = None
    z: complex | None = None
    s: float | None = None
    psi: tuple[str, ...] = ("gauss", "x * gauss")
    tol: float = 1e-12
    precision_bits: int = 212
    n_max: int | None = None
    k_max: int | None = None
    kappa: Fraction = Fraction(1)
    out: str | None = None
    plot: str | None = None
    seed: int = 0
    config: str | None = None

    def __post_init__(self):
        if not (0.0 < self.tol < 1.0):
            raise ValueError("tol must lie in (0, 1)")
        if self.mu is not None and not self.mu > -0.5 + 1e-6:
            raise ValueError("mu must exceed -1/2 + 1e-6")
        if self.mu_grid is not None:
            for m in self.mu_grid:
                if not m > -0.5 + 1e-6:
                    raise ValueError(f"grid mu={m} must exceed -1/2 + 1e-6")

    def echo(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, complex):
                v = repr(v)
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


def _parse_complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def _parse_mu_grid(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(";", ",").split(",") if tok.strip())


def _load_config_file(path: str) -> dict:
    raw = Path(path).read_text()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        return json.loads(raw)
    out = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (want key=value): {line!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONVERTERS = {
    "mu": float,
    "mu_grid": lambda v: _parse_mu_grid(v) if isinstance(v, str) else tuple(v),
    "set_a": str,
    "set_b": str,
    "z": lambda v: _parse_complex(v) if isinstance(v, str) else complex(v),
    "s": float,
    "psi": lambda v: tuple(v) if isinstance(v, (list, tuple)) else (str(v),),
    "tol": float,
    "precision_bits": int,
    "n_max": int,
    "k_max": int,
    "kappa": Fraction,
    "out": str,
    "plot": str,
    "seed": int,
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file, and explicit flags (highest wins)."""
    merged: dict = {"command": args.command}
    if getattr(args, "config", None):
        merged["config"] = args.config
        for key, value in _load_config_file(args.config).items():
            if key in _CONVERTERS:
                merged[key] = _CONVERTERS[key](value)
            elif key != "command":
                raise ValueError(f"unknown config key {key!r}")
    for key, conv in _CONVERTERS.items():
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = conv(value)
    return RunConfig(**merged)


def _fmt(x) -> str:
    if isinstance(x, complex):
        return f"{x.real!r}{'+' if x.imag >= 0 else '-'}{abs(x.imag)!r}j"
    return repr(x)


def _series_diag(r: SeriesResult) -> str:
    return (f"terms={r.terms_used} trunc_error={r.trunc_error:.3e} "
            f"cancellation={r.cancellation:.3e}"
            + (" (escalated precision)" if r.escalated else ""))


def cmd_specfun(cfg: RunConfig) -> int:
    if cfg.mu is None:
        print("specfun requires --mu", file=sys.stderr)
        return 2
    if cfg.z is None and cfg.s is None:
        print("specfun requires --z and/or --s", file=sys.stderr)
        return 2
    ctx = MuContext(cfg.mu)
    lines = [f"mu = {_fmt(cfg.mu)}"]
    if cfg.z is not None:
        r = exp_mu_series(cfg.z, ctx, tol=cfg.tol, prec_bits=cfg.precision_bits)
        lines.append(f"exp_mu({_fmt(cfg.z)}):")
        lines.append(f"  series    {_fmt(r.value)}   [{_series_diag(r)}]")
        if ctx.mu > 0:
            v = exp_mu_integral(cfg.z, ctx)
            lines.append(f"  integral  {_fmt(v)}")
    if cfg.s is not None:
        lines.append(f"|exp_mu(i*{_fmt(cfg.s)})|^2:")
        r = exp_mu_series(1j * cfg.s, ctx, tol=cfg.tol,
                          prec_bits=cfg.precision_bits)
        lines.append(f"  product      {_fmt(abs(r.value) ** 2)}   [{_series_diag(r)}]")
        v = abs2_exp_mu_imag(cfg.s, ctx, "even_series", tol=cfg.tol,
                             prec_bits=cfg.precision_bits)
        lines.append(f"  even_series  {_fmt(v)}")
        if ctx.mu > 0:
            v = abs2_exp_mu_imag(cfg.s, ctx, "integral")
            lines.append(f"  integral     {_fmt(v)}")
            lines.append(f"  modulus |exp_mu(is)| = {_fmt(math.sqrt(v))}"
                         + ("  < 1" if v < 1 else ""))
    print("\n".join(lines))
    return 0


def _sets_from_config(cfg: RunConfig):
    A = parse_interval_set(cfg.set_a) if cfg.set_a else None
    B = parse_interval_set(cfg.set_b) if cfg.set_b else None
    return A, B


def cmd_trace(cfg: RunConfig) -> int:
    if cfg.mu is None or cfg.set_a is None or cfg.set_b is None:
        print("trace requires --mu, --set-a, --set-b", file=sys.stderr)
        return 2
    ctx = MuContext(cfg.mu)
    A, B = _sets_from_config(cfg)
    status = 0
    print(f"mu = {_fmt(cfg.mu)}  A = {A}  B = {B}")
    for name, run in (("quadrature", lambda: trace_quadrature(A, B, ctx)),
                      ("moment_series", lambda: trace_moment_series(
                          A, B, ctx, tol=cfg.tol))):
        try:
            est = run()
            print(f"  {name:<14} value={_fmt(est.value)} "
                  f"error={est.error_estimate:.3e} "
                  f"product={_fmt(est.product_measures)} "
                  f"deviation={_fmt(est.deviation)} "
                  f"sign_resolved={str(est.sign_resolved).lower()}")
        except EvaluationError as err:
            status = 1
            print(f"  {name:<14} FAILED: {err}")
    return status


def _write_scan_outputs(rows: list[ScanRow], cfg: RunConfig) -> None:
    if cfg.out:
        out = Path(cfg.out)
        csv_text = rows_to_csv(rows)
        json_text = rows_to_json(rows, config=cfg.echo())
        if out.suffix == ".csv":
            out.write_text(csv_text)
        elif out.suffix == ".json":
            out.write_text(json_text)
        else:
            out.with_suffix(".csv").write_text(csv_text)
            out.with_suffix(".json").write_text(json_text)
    if cfg.plot:
        write_deviation_plot(rows, cfg.plot)


def cmd_scan(cfg: RunConfig) -> int:
    grid = cfg.mu_grid if cfg.mu_grid is not None else DEFAULT_MU_GRID
    A, B = _sets_from_config(cfg)
    if (A is None) != (B is None):
        print("scan needs both --set-a and --set-b (or neither)",
              file=sys.stderr)
        return 2
    pairs = ((A, B),) if A is not None else DEFAULT_PAIRS
    spec = QuadratureSpec()
    rows = deviation_scan(grid, pairs, spec)
    _write_scan_outputs(rows, cfg)
    print(f"{'mu':>8} {'A':>16} {'B':>16} {'deviation':>24} resolved")
    for r in rows:
        print(f"{r.mu:>8} {format_interval_set(r.set_a):>16} "
              f"{format_interval_set(r.set_b):>16} {r.deviation!r:>24} "
              f"{str(r.sign_resolved).lower()}"
              + (f"   note: {r.note}" if r.note else ""))
    return 1 if any(r.method == "failed" for r in rows) else 0


def cmd_verify_identities(cfg: RunConfig) -> int:
    k_max = cfg.k_max if cfg.k_max is not None else 41
    n_max = cfg.n_max if cfg.n_max is not None else 12
    odd = exact.verify_odd_vanishing(k_max)
    closed = exact.verify_closed_forms(n_max)
    report = exact.IdentityReport(checks=odd.checks + closed.checks)
    text = report.to_json()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        print(text)
    n_pass = sum(c.passed for c in report.checks)
    print(f"identities: {n_pass}/{len(report.checks)} passed "
          f"(odd k <= {k_max}, families n <= {n_max})", file=sys.stderr)
    return 0 if report.all_passed else 1


def cmd_check_operators(cfg: RunConfig) -> int:
    n_max = cfg.n_max if cfg.n_max is not None else 10
    mu = cfg.mu if cfg.mu is not None else 0.5
    ctx = MuContext(mu)
    kappa = cfg.kappa
    expected_failure = kappa != 1

    ccr = []
    for n in range(n_max + 1):
        residual = operators.ccr_residual(operators.GaussPoly.basis(n), kappa)
        ccr.append({"basis": n, "residual_zero": residual.is_zero})
    ccr_ok = all(c["residual_zero"] for c in ccr)

    eom_entries = []
    for text in cfg.psi:
        psi = operators.parse_gauss_poly(text)
        rep = operators.eom_residuals(psi, kappa=kappa)
        c1, c2 = rep.fitted_as_complex()
        eom_entries.append({
            "psi": text,
            "printed_form_residual_zero": rep.residuals_vanish,
            "fitted_c1": None if c1 is None else _fmt(c1),
            "fitted_c2": None if c2 is None else _fmt(c2),
        })

    k_points = np.linspace(-3.0, 3.0, 25)
    intertwining = []
    for text in cfg.psi:
        psi = operators.parse_gauss_poly(text)
        try:
            rep = operators.intertwining_check(psi, k_points, ctx,
                                               kappa=kappa)
            intertwining.append({"psi": text, "mu": mu,
                                 "max_discrepancy": rep.max_discrepancy})
        except EvaluationError as err:
            intertwining.append({"psi": text, "mu": mu, "error": str(err)})

    payload = {
        "schema_version": SCHEMA_VERSION,
        "kappa": str(kappa),
        "expected_failure_mode": expected_failure,
        "ccr": ccr,
        "ccr_all_zero": ccr_ok,
        "equations_of_motion": eom_entries,
        "intertwining": intertwining,
    }
    text = json.dumps(payload, sort_keys=True, indent=2)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        print(text)
    if expected_failure:
        print(f"kappa={kappa}: commutation-relation failure "
              f"{'demonstrated' if not ccr_ok else 'NOT demonstrated'} "
              "(expected-failure mode)", file=sys.stderr)
        return 0
    return 0 if ccr_ok else 1


def write_deviation_plot(rows: list[ScanRow], path: str) -> None:
    """Deviation vs mu as a static SVG; equality at mu=0 marked, the
    negative-mu conjecture region shaded."""
    try:
        import matplotlib
        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError as err:  # pragma: no cover
        raise EvaluationError(
            "plot output needs matplotlib (install extra 'plot')") from err
    matplotlib.rcParams["svg.hashsalt"] = "mudeform"
    fig, ax = plt.subplots(figsize=(7, 4.5))
    pairs = sorted({(format_interval_set(r.set_a), format_interval_set(r.set_b))
                    for r in rows})
    for a_text, b_text in pairs:
        pts = [(r.mu, r.deviation) for r in rows
               if format_interval_set(r.set_a) == a_text
               and format_interval_set(r.set_b) == b_text
               and math.isfinite(r.deviation)]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, "o-", markersize=3, linewidth=1,
                    label=f"A={a_text}, B={b_text}")
    lo = min((r.mu for r in rows), default=-0.5)
    if lo < 0:
        ax.axvspan(lo, 0.0, color="tab:orange", alpha=0.12,
                   label="conjectured deviation > 0")
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.axvline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.plot([0.0], [0.0], "k*", markersize=10, label="equality at mu=0")
    ax.set_xlabel("mu")
    ax.set_ylabel("trace - product of measures")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mudeform",
        description="mu-deformed quantum mechanics toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="config file (key=value or JSON)")
        p.add_argument("--tol", type=float, help="relative tolerance")
        p.add_argument("--precision-bits", type=int, dest="precision_bits",
                       help="escalated working precision in bits")
        p.add_argument("--seed", type=int, help="random seed (recorded)")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("specfun", help="evaluate deformed special functions")
    common(p)
    p.add_argument("--mu", type=float)
    p.add_argument("--z", help="complex argument, e.g. '1+2i'")
    p.add_argument("--s", type=float, help="evaluate |exp_mu(i s)|^2")

    p = sub.add_parser("trace", help="trace of E^Q(A) E^P(B) on one pair")
    common(p)
    p.add_argument("--mu", type=float)
    p.add_argument("--set-a", dest="set_a", help='e.g. "[1,2]" or "[0,1]+[2,3]"')
    p.add_argument("--set-b", dest="set_b")

    p = sub.add_parser("scan", help="deviation scan over a mu grid")
    common(p)
    p.add_argument("--mu-grid", dest="mu_grid",
                   help="comma-separated mu values")
    p.add_argument("--set-a", dest="set_a")
    p.add_argument("--set-b", dest="set_b")
    p.add_argument("--plot", help="write an SVG deviation plot here")

    p = sub.add_parser("verify-identities",
                       help="exact binomial-polynomial identity checks")
    common(p)
    p.add_argument("--k-max", dest="k_max", type=int,
                   help="check odd vanishing for k <= k_max (default 41)")
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="check closed forms for n <= n_max (default 12)")

    p = sub.add_parser("check-operators",
                       help="commutation relation / EOM / intertwining")
    common(p)
    p.add_argument("--mu", type=float, help="mu for the numeric checks")
    p.add_argument("--kappa", help="reflection-term coefficient (default 1)")
    p.add_argument("--n-max", dest="n_max", type=int,
                   help="basis degree for the exact checks (default 10)")
    p.add_argument("--psi", action="append",
                   help='gauss-poly literal, e.g. "(1 + 2x^3) * gauss"; '
                        "repeatable")
    return parser


COMMANDS = {
    "specfun": cmd_specfun,
    "trace": cmd_trace,
    "scan": cmd_scan,
    "verify-identities": cmd_verify_identities,
    "check-operators": cmd_check_operators,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        parser.print_usage(sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except (ValueError, EvaluationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
