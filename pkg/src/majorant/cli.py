"""Command-line front end.

    majorant symint --N 1000 --h 10 --f one
    majorant correlate --N 1000 --h 10 --f1 dQ:20 --f2 one --out csv
    majorant window --h 5 --dump-dft --grid 64
    majorant farey-check --N 10000 --h 20 --Q 100 --g indicator:100 --set-f0 auto
    majorant verify scaling --theta 0.4 --grid 14:20:7

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith, correlate, expsum, verify, window

MEMORY_ENV = "MAJORANT_MEM_MIB"
DEFAULT_MEMORY_MIB = 4096
# bytes per table slot across the handful of arrays a command keeps alive
_BYTES_PER_SLOT = 64

CSV_COLUMNS = ["N", "h", "Q", "lhs", "rhs", "residual", "budget", "ratio"]


class UsageError(ValueError):
    pass


def fmt(v) -> str:
    """Integers verbatim, reals as shortest round-trip decimal."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else repr(float(v))
    return repr(float(v))


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating, Fraction)):
        x = float(v)
        return x if math.isfinite(x) else None
    return v


@dataclass
class RunConfig:
    command: str
    N: int | None = None
    h: int | None = None
    Q: int | None = None
    theta: float | None = None
    seed: int = 0
    out_format: str = "json"
    out_path: str | None = None

    def validate(self) -> None:
        if self.N is not None and self.h is not None:
            if not 4 <= self.h <= self.N // 4:
                raise UsageError(f"need 4 <= h <= N/4 (h -> infinity, h = o(N)); got N={self.N}, h={self.h}")
            cap = int(os.environ.get(MEMORY_ENV, DEFAULT_MEMORY_MIB)) * 2**20
            if (self.N + self.h) * _BYTES_PER_SLOT > cap:
                raise UsageError(f"table of size {self.N + self.h - 1} exceeds memory cap ({MEMORY_ENV})")
        if self.theta is not None and not 0 < self.theta < 0.5:
            raise UsageError("theta must lie in (0, 1/2)")
        if self.Q is not None:
            if self.Q < 1:
                raise UsageError("Q must be >= 1")
            if self.N is not None and self.N > 1 and not math.log(self.Q) / math.log(self.N) < 1:
                raise UsageError("need lambda = log Q / log N < 1")


def parse_grid(spec: str) -> list[int]:
    """'a:b:steps' -> N = 2**e for `steps` exponents evenly spaced over [a, b]."""
    try:
        a, b, steps = spec.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}, expected a:b:steps") from exc
    if steps < 1 or b < a:
        raise UsageError(f"bad grid {spec!r}")
    exps = np.linspace(a, b, steps) if steps > 1 else np.array([a])
    Ns = [int(round(2.0**e)) for e in exps]
    if any(y <= x for x, y in zip(Ns, Ns[1:])):
        raise UsageError(f"grid {spec!r} does not give increasing N")
    return Ns


def build_f(spec: str, n_max: int) -> arith.FunctionTable:
    if spec == "one":
        return arith.FunctionTable.from_values(np.ones(n_max, dtype=np.int64))
    if spec == "id":
        return arith.FunctionTable.from_values(np.arange(1, n_max + 1, dtype=np.int64))
    if spec.startswith("dQ:"):
        return arith.restricted_divisor(n_max, int(spec[3:]))
    if spec.startswith("csv:"):
        f = arith.read_table_csv(spec[4:])
        if f.n_max < n_max:
            raise UsageError(f"table {spec[4:]} covers 1..{f.n_max}, need {n_max}")
        return f
    raise UsageError(f"unknown function spec {spec!r}")


def build_g(spec: str) -> arith.SieveBasis:
    if spec == "delta1":
        return arith.delta_basis()
    if spec.startswith("indicator:"):
        return arith.indicator_basis(int(spec.split(":", 1)[1]))
    if spec.startswith("csv:"):
        t = arith.read_table_csv(spec[4:])
        return arith.SieveBasis(t.values)
    raise UsageError(f"unknown basis spec {spec!r}")


# -- output -----------------------------------------------------------------

def emit(cfg: RunConfig, payload: dict | None = None, rows: list[dict] | None = None,
         columns: list[str] | None = None, trailer: dict | None = None) -> None:
    if cfg.out_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = columns or (list(rows[0]) if rows else list(payload))
        w.writerow(cols)
        for r in rows if rows is not None else [payload]:
            w.writerow([fmt(r.get(c)) for c in cols])
        if trailer:
            buf.write("# " + ", ".join(f"{k}={fmt(v)}" for k, v in trailer.items()) + "\n")
        text = buf.getvalue()
    else:
        doc = dict(payload or {})
        if rows is not None:
            doc["rows"] = rows
        if trailer:
            doc.update(trailer)
        text = json.dumps(_jsonable(doc), indent=2) + "\n"
    if cfg.out_path:
        with open(cfg.out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _identity_row(N, h, Q, rep) -> dict:
    return {"N": N, "h": h, "Q": Q, "lhs": rep.lhs, "rhs": rep.rhs,
            "residual": rep.residual, "budget": rep.budget, "ratio": rep.ratio}


# -- commands ---------------------------------------------------------------

def cmd_symint(args, cfg: RunConfig) -> int:
    f = build_f(args.f, cfg.N + cfg.h - 1)
    I = correlate.symmetry_integral(f, cfg.N, cfg.h).value
    emit(cfg, {"N": cfg.N, "h": cfg.h, "I": I, "trivial_bound": correlate.trivial_bound(f, cfg.N, cfg.h)})
    return 0


def cmd_correlate(args, cfg: RunConfig) -> int:
    n_max = cfg.N + cfg.h - 1
    f1, f2 = build_f(args.f1, n_max), build_f(args.f2, n_max)
    C = correlate.correlation_all(f1, f2, cfg.N, cfg.h, args.method)
    W = window.weight_table(cfg.h)
    rows = []
    for i, a in enumerate(range(-2 * cfg.h, 2 * cfg.h + 1)):
        c = C[a]
        rows.append({"a": a, "C": c, "W": int(W[i]), "WC": int(W[i]) * c})
    emit(cfg, {"N": cfg.N, "h": cfg.h}, rows, ["a", "C", "W", "WC"])
    return 0


def cmd_window(args, cfg: RunConfig) -> int:
    h = args.h
    if h < 1:
        raise UsageError("h must be a positive integer")
    if args.dump_dft:
        G = args.grid
        rows = [{"beta": Fraction(k, G), "W_hat": window.dft_weight(Fraction(k, G), h)} for k in range(G + 1)]
        emit(cfg, {"h": h}, rows, ["beta", "W_hat"])
    else:
        W = window.weight_table(h)
        rows = [{"a": a, "W": int(W[i])} for i, a in enumerate(range(-2 * h, 2 * h + 1))]
        emit(cfg, {"h": h}, rows, ["a", "W"])
    return 0


def cmd_farey(args, cfg: RunConfig) -> int:
    g = build_g(args.g)
    N, Q = cfg.N, cfg.Q
    choice = expsum.minimal_mean_value(g, N, Q)
    f = arith.dirichlet_convolve(g, max(N + (cfg.h or 1) - 1, g.support_max))
    f0 = choice.value if args.set_f0 == "auto" else float(args.set_f0)
    rep = expsum.check_nonneg_farey(f.with_mean_value(f0), Q, N)
    emit(cfg, {"min": rep.min_value, "argmin_j": rep.argmin.j, "argmin_q": rep.argmin.q,
               "f0_used": f0, "f0_minimal": choice.value, "pass": rep.passed})
    return 0 if rep.passed else 1


def _need(cfg: RunConfig, *names):
    for n in names:
        if getattr(cfg, n) is None:
            raise UsageError(f"--{n} is required for this check")


def _grid_or_point(args, cfg: RunConfig, theta_default: float):
    if args.grid:
        theta = cfg.theta if cfg.theta is not None else theta_default
        out = []
        for N in parse_grid(args.grid):
            h = verify.h_for(N, theta)
            RunConfig(cfg.command, N, h, theta=theta).validate()
            out.append((N, h))
        return out
    _need(cfg, "N", "h")
    return [(cfg.N, cfg.h)]


def cmd_verify(args, cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    which = args.check
    rows: list[dict] = []
    ok = True
    trailer: dict = {}

    if which == "lemma0":
        _need(cfg, "N", "h")
        N, h = cfg.N, cfg.h
        f1, f2 = verify.random_table(rng, N + h), verify.random_table(rng, N + h)
        lags = [args.a] if args.a is not None else [a for a in range(-2 * h, 2 * h + 1) if a]
        for a in lags:
            rep = verify.lemma0_check(f1, f2, N, h, a)
            rows.append(_identity_row(N, h, None, rep))
            ok &= rep.passed

    elif which == "lemma1":
        pts = _grid_or_point(args, cfg, 0.3)
        for N, h in pts:
            f1, f2 = verify.random_table(rng, N + h), verify.random_table(rng, N + h)
            rep = verify.lemma1_check(f1, f2, N, h)
            rows.append(_identity_row(N, h, None, rep))
            ok &= rep.passed
        if len(pts) > 1:
            ys = [max(abs(r["residual"]), 1) / r["h"] ** 3 for r in rows]
            fit = verify.fit_bound([r["h"] for r in rows], ys, 0.0, 0.2)
            trailer = {"slope": fit.slope, "slope_pass": fit.passed}
            ok &= fit.passed

    elif which == "star":
        pts = _grid_or_point(args, cfg, 0.3)
        for N, h in pts:
            Q = cfg.Q or h
            f, g = verify.divisor_setup(N, h, Q)
            rep = verify.star_identity_check(f, g, N, h)
            rows.append(_identity_row(N, h, Q, rep))
            ok &= rep.passed
        if len(pts) > 1:
            fit = verify.fit_bound([r["N"] for r in rows], [max(r["ratio"], 1e-300) for r in rows], 0.0, 0.1)
            trailer = {"slope": fit.slope, "slope_pass": fit.passed}
            ok &= fit.passed

    elif which == "spectral":
        _need(cfg, "N", "h")
        N, h, Q = cfg.N, cfg.h, cfg.Q or 5
        f = verify.random_table(rng, N + h, mean_value=int(rng.integers(0, 4)))
        g = arith.SieveBasis.from_values(rng.integers(-3, 4, size=Q, dtype=np.int64))
        rep = verify.spectral_form_check(f, g, N, h)
        rows.append(_identity_row(N, h, Q, rep))
        ok &= rep.passed

    elif which == "lemma2":
        _need(cfg, "N", "h")
        N, h, Q = cfg.N, cfg.h, cfg.Q or 10
        f, _ = verify.divisor_setup(N, h, Q)
        g = arith.SieveBasis.from_values(rng.integers(-3, 4, size=Q, dtype=np.int64))
        rep = verify.lemma2_check(g, f, N, h, Q)
        rows.append({"N": N, "h": h, "Q": Q, "lhs": rep.lhs, "rhs": rep.rhs, "residual": None,
                     "budget": rep.gmax * rep.rhs if rep.rhs == rep.rhs else None,
                     "ratio": abs(rep.lhs) / (rep.gmax * rep.rhs) if rep.passed and rep.rhs > 0 else None})
        trailer = {"status": rep.status}
        ok &= rep.passed

    elif which in ("theorem", "corollary"):
        if args.grid:
            theta = cfg.theta if cfg.theta is not None else 0.3
            for N in parse_grid(args.grid):
                h = verify.h_for(N, theta)
                RunConfig(cfg.command, N, h, h * h, theta).validate()
            fit, points = verify.bound_grid(which, theta, parse_grid(args.grid))
        else:
            _need(cfg, "N", "h")
            Q = cfg.Q or cfg.h**2
            if which == "corollary":
                try:
                    verify._corollary_guard(cfg.N, cfg.h, Q)
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
            f, g = verify.divisor_setup(cfg.N, cfg.h, Q)
            if which == "theorem":
                points = [verify.theorem_bound_check(f, g, cfg.N, cfg.h, Q)]
            else:
                points = [verify.corollary_bound_check(f, cfg.N, cfg.h, Q)]
            fit = None
        for p in points:
            rows.append({"N": p.N, "h": p.h, "Q": p.Q, "lhs": p.lhs, "rhs": p.rhs, "residual": None,
                         "budget": None, "ratio": p.ratio})
            ok &= p.applicable
        if fit is not None:
            trailer = {"slope": fit.slope, "slope_pass": fit.passed}
            ok &= fit.passed
        elif args.grid:
            trailer = {"status": verify.NOT_APPLICABLE}

    elif which == "scaling":
        theta = cfg.theta if cfg.theta is not None else 0.4
        if not args.grid:
            raise UsageError("--grid is required for scaling")
        grid = parse_grid(args.grid)
        if len(grid) < 2:
            raise UsageError("scaling needs at least two grid points")
        fit, data = verify.scaling_experiment("dQ", theta, grid)
        for r in data:
            rows.append({"N": r["N"], "h": r["h"], "Q": r["Q"], "lhs": r["I"], "rhs": r["N"] * r["h"],
                         "residual": None, "budget": None, "ratio": r["ratio"]})
        trailer = {"slope": fit.slope, "slope_pass": fit.passed}
        ok &= fit.passed

    trailer["pass"] = bool(ok)
    emit(cfg, {"check": which}, rows, CSV_COLUMNS, trailer)
    return 0 if ok else 1


# -- argument parsing -------------------------------------------------------

def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="output path, or 'csv'/'json' to pick the format")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1, help="accepted for compatibility; work is single-threaded")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="majorant", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symint", parents=[common], help="exact symmetry integral I_f(N,h)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--f", default="one", help="one | id | dQ:<Q> | csv:<path>")

    p = sub.add_parser("correlate", parents=[common], help="correlations C(a) with weights W(a)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--f1", default="one")
    p.add_argument("--f2", default="one")
    p.add_argument("--method", choices=["fft", "naive"], default="fft")

    p = sub.add_parser("window", parents=[common], help="dump W(a) or W-hat on a grid")
    p.add_argument("--h", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--dump-w", action="store_true")
    mode.add_argument("--dump-dft", action="store_true")
    p.add_argument("--grid", type=int, default=64)

    p = sub.add_parser("farey-check", parents=[common], help="nonnegativity on Farey fractions")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--h", type=int)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--g", default="indicator:1")
    p.add_argument("--set-f0", default="auto")

    p = sub.add_parser("verify", parents=[common], help="identity checks and bound fits")
    p.add_argument("check", choices=["lemma0", "lemma1", "star", "spectral", "lemma2",
                                     "theorem", "corollary", "scaling"])
    p.add_argument("--N", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--Q", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--grid")
    p.add_argument("--a", type=int, help="single lag for lemma0")
    return parser


def _config(args) -> RunConfig:
    fmt_ = args.format
    path = None
    if args.out in ("csv", "json"):
        fmt_ = fmt_ or args.out
    elif args.out:
        path = args.out
        if fmt_ is None:
            fmt_ = "csv" if path.endswith(".csv") else "json"
    if fmt_ is None:
        fmt_ = "csv" if args.command in ("correlate", "window") or (args.command == "verify") else "json"
    return RunConfig(
        command=args.command,
        N=getattr(args, "N", None),
        h=getattr(args, "h", None) if args.command != "window" else None,
        Q=getattr(args, "Q", None),
        theta=getattr(args, "theta", None),
        seed=args.seed,
        out_format=fmt_,
        out_path=path,
    )


COMMANDS = {
    "symint": cmd_symint,
    "correlate": cmd_correlate,
    "window": cmd_window,
    "farey-check": cmd_farey,
    "verify": cmd_verify,
}


def parse_and_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        cfg = _config(args)
        cfg.validate()
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ValueError, IndexError, OSError) as exc:
        print(f"majorant: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch())


if __name__ == "__main__":
    main()
