"""Command line interface: vertex export, parameter tables, SEP sweeps,
Monte Carlo runs, and the crosspolytope/simplex gap table.

Exit codes: 0 success, 2 usage or domain error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from polysep import geometry, metrics
from polysep.analytic import METHODS, NoExactFormula, SnrPoint, sep_dispatch
from polysep.montecarlo import simulate_sep
from polysep.quadrature import DEFAULT_REL_TOL, NonConvergence
from polysep.specfun import q

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

# Built-in defaults; a --config file overrides these and flags override both.
DEFAULTS = {
    "rel_tol": DEFAULT_REL_TOL,
    "trials": 1_000_000,
    "seed": 1,
    "workers": 1,
    "digits": 17,
}
_CONFIG_TYPES = {"rel_tol": float, "trials": int, "seed": int, "workers": int, "digits": int}

# Figure panels: (kind, n, m, method).  Polygon sizes for panel (a) are a choice.
FIGURES = {
    "1a": [("polygon", None, 3, "stable_exact"), ("polygon", None, 4, "stable_exact"),
           ("polygon", None, 8, "stable_exact"), ("polygon", None, 16, "stable_exact")],
    "1b": [("cube", 3, None, "stable_exact"), ("crosspolytope", 3, None, "stable_exact"),
           ("simplex", 3, None, "stable_exact"), ("icosahedron", None, None, "union_bound"),
           ("dodecahedron", None, None, "union_bound")],
    "1c": [("cube", 4, None, "stable_exact"), ("crosspolytope", 4, None, "stable_exact"),
           ("simplex", 4, None, "stable_exact"), ("cell24", None, None, "stable_exact"),
           ("cell600", None, None, "union_bound"), ("cell120", None, None, "union_bound")],
    "1d": [("cube", 5, None, "stable_exact"), ("crosspolytope", 5, None, "stable_exact"),
           ("simplex", 5, None, "stable_exact")],
}


class UsageError(Exception):
    pass


@dataclass
class SweepSpec:
    curves: list  # (kind, n, m, method)
    x_axis: str = "gamma_b_db"
    x_min: float = 0.0
    x_max: float = 12.0
    x_step: float = 0.25
    methods: set = field(default_factory=set)

    def __post_init__(self):
        if self.x_axis not in ("gamma_db", "gamma_b_db"):
            raise UsageError("x axis must be gamma_db or gamma_b_db")
        if not self.x_min < self.x_max:
            raise UsageError("need x_min < x_max")
        if not self.x_step > 0:
            raise UsageError("x_step must be positive")
        if not self.curves:
            raise UsageError("at least one curve is required")
        self.methods = {c[3] for c in self.curves}

    def grid(self) -> np.ndarray:
        count = int(round((self.x_max - self.x_min) / self.x_step))
        xs = self.x_min + self.x_step * np.arange(count + 1)
        return xs[xs <= self.x_max + 1e-9 * self.x_step]


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CONFIG_TYPES[key](value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def _settings(args) -> dict:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _fmt(x: float, digits: int) -> str:
    if x == 0.0:
        return "0"
    return format(float(x), f".{digits}g")


def _size_args(kind, args):
    kind = geometry.canonical_kind(kind)
    n, m = getattr(args, "n", None), getattr(args, "m", None)
    if kind == "polygon" and m is None:
        raise UsageError("polygon needs --m")
    if kind in geometry.DIMENSIONED and n is None:
        raise UsageError(f"{kind} needs --n")
    return kind, n, m


def _emit(args, text: str) -> None:
    out = getattr(args, "out", "-") or "-"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


# -- commands ----------------------------------------------------------------

def cmd_gen(args) -> int:
    kind, n, m = _size_args(args.kind, args)
    c = geometry.generate(kind, n=n, m=m, orientation=args.orientation)
    if args.format == "json":
        doc = {"kind": c.kind, "n": c.n, "M": c.M, "Es": c.symbol_energy,
               "points": [[float(v) for v in row] for row in c.points]}
        _emit(args, json.dumps(doc) + "\n")
    else:
        rows = [[f"x{i + 1}" for i in range(c.n)]]
        rows += [[format(float(v), ".17g") for v in row] for row in c.points]
        _emit(args, _csv(rows))
    return EXIT_OK


def cmd_params(args) -> int:
    kind, n, m = _size_args(args.kind, args)
    row = geometry.table_params(kind, n=n, m=m)
    g = lambda v: format(float(v), ".12g")  # noqa: E731
    _emit(args, _csv([["kind", "n", "M", "A", "d_over_sqrtEs", "G_b_dB", "S"],
                      [geometry.kind_label(kind, n if kind != "polygon" else m),
                       row.n, row.M, row.A, g(row.d_over_sqrt_es), g(row.G_b_dB), g(row.S)]]))
    return EXIT_OK


def _parse_curve(text: str, method: str):
    kind, _, size = text.partition(":")
    kind = geometry.canonical_kind(kind)
    n = m = None
    if kind == "polygon":
        if not size:
            raise UsageError("polygon curves look like polygon:M")
        m = int(size)
    elif kind in geometry.DIMENSIONED:
        if not size:
            raise UsageError(f"{kind} curves look like {kind}:n")
        n = int(size)
    return kind, n, m, method


def column_name(kind, n, m, method) -> str:
    return f"{geometry.kind_label(kind, m if kind == 'polygon' else n)}_{method}"


def sweep_table(spec: SweepSpec, settings: dict) -> list[list]:
    """Rows (header first) of x values, the BPSK reference, and every curve."""
    header = [spec.x_axis, "bpsk"] + [column_name(*c) for c in spec.curves]
    sizes = [geometry.table_params(k, n=n, m=m).M for k, n, m, _ in spec.curves]
    rows = [header]
    for x in spec.grid():
        # BPSK has one bit per symbol, so Es/N0 = Eb/N0 on either axis
        g_bpsk = SnrPoint.from_db(x).gamma
        row = [float(x), q(np.sqrt(2.0 * g_bpsk))]
        for (kind, n, m, method), size in zip(spec.curves, sizes):
            snr = (SnrPoint.from_gamma_b_db(x, size) if spec.x_axis == "gamma_b_db"
                   else SnrPoint.from_db(x))
            val = sep_dispatch(kind, snr, method, n=n, m=m,
                               trials=settings["trials"], seed=settings["seed"],
                               workers=settings["workers"], rel_tol=settings["rel_tol"])
            row.append(val.p)
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    settings = _settings(args)
    if args.figure:
        curves = list(FIGURES[args.figure])
    else:
        if not args.curve:
            raise UsageError("give --figure or at least one --curve KIND[:SIZE]")
        methods = args.method or ["stable_exact"]
        curves = [_parse_curve(c, meth) for c in args.curve for meth in methods]
    x_axis = "gamma_db" if args.x_axis == "gamma_db" else "gamma_b_db"
    spec = SweepSpec(curves, x_axis, args.x_min, args.x_max, args.x_step)
    rows = sweep_table(spec, settings)
    digits = settings["digits"]
    text = [rows[0]] + [[_fmt(v, digits) for v in r] for r in rows[1:]]
    _emit(args, _csv(text))
    return EXIT_OK


def cmd_simulate(args) -> int:
    settings = _settings(args)
    kind, n, m = _size_args(args.kind, args)
    c = geometry.generate(kind, n=n, m=m, orientation=args.orientation)
    if (args.gamma_db is None) == (args.gamma_b_db is None):
        raise UsageError("give exactly one of --gamma-db and --gamma-b-db")
    snr = (SnrPoint.from_db(args.gamma_db) if args.gamma_db is not None
           else SnrPoint.from_gamma_b_db(args.gamma_b_db, c.M))
    if settings["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    est = simulate_sep(c, snr, settings["trials"], settings["seed"],
                       workers=settings["workers"], uniform_symbols=args.uniform_symbols)
    lo, hi = est.wilson()
    d = settings["digits"]
    _emit(args, _csv([
        ["kind", "gamma_db", "trials", "errors", "p_hat", "wilson_lo", "wilson_hi",
         "ci95_halfwidth", "seed"],
        [c.label, _fmt(snr.gamma_db, d), est.trials, est.errors, _fmt(est.p_hat, d),
         _fmt(lo, d), _fmt(hi, d), _fmt(est.ci95_halfwidth, d), est.seed],
    ]))
    return EXIT_OK


def cmd_gap(args) -> int:
    if args.nmax < 2:
        raise UsageError("--nmax must be at least 2")
    rows = [["n", "gap_linear", "gap_db"]]
    for n in range(2, args.nmax + 1):
        rows.append([n, format(metrics.cp_simplex_gap(n), ".12g"),
                     format(metrics.cp_simplex_gap_db(n), ".12g")])
    best = metrics.gap_maximizer(args.nmax)
    text = _csv(rows)
    text += (f"# argmax_n={best.n_int} n_real={best.n_real:.6f} "
             f"peak_db={best.gap_dB:.4f}\n")
    if best.at_boundary:
        sys.stderr.write(f"warning: maximum lies on the boundary n={args.nmax}; "
                         "raise --nmax past 24 for the interior peak\n")
    _emit(args, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polysep",
        description="Symbol error probability of regular polytope constellations.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--config", help="key = value file with rel_tol/trials/seed/workers/digits")
    common.add_argument("--digits", type=int, help="significant digits for probabilities")

    sized = argparse.ArgumentParser(add_help=False)
    sized.add_argument("kind", help="polygon, cube, crosspolytope, simplex, cell24, "
                                    "icosahedron, dodecahedron, cell600, cell120")
    sized.add_argument("--n", type=int, help="dimension (cube, crosspolytope, simplex)")
    sized.add_argument("--m", type=int, help="number of points (polygon)")

    p = sub.add_parser("gen", parents=[common, sized], help="export unit-energy vertices")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--orientation", choices=("rotated", "standard"), default="rotated")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("params", parents=[common, sized], help="M, A, d, G_b, S of one RCP")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("sweep", parents=[common], help="SEP versus SNR as CSV")
    p.add_argument("--figure", choices=sorted(FIGURES))
    p.add_argument("--curve", action="append", help="KIND[:SIZE], repeatable")
    p.add_argument("--method", action="append", choices=METHODS)
    p.add_argument("--x-axis", choices=("gamma_db", "gamma_b_db"), default="gamma_b_db")
    p.add_argument("--x-min", type=float, default=0.0)
    p.add_argument("--x-max", type=float, default=12.0)
    p.add_argument("--x-step", type=float, default=0.25)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common, sized], help="Monte Carlo SEP estimate")
    p.add_argument("--gamma-db", type=float)
    p.add_argument("--gamma-b-db", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--orientation", choices=("rotated", "standard"), default="rotated")
    p.add_argument("--uniform-symbols", action="store_true",
                   help="draw the transmitted symbol uniformly instead of fixing index 0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gap", parents=[common], help="crosspolytope/simplex gain gap")
    p.add_argument("--nmax", type=int, default=1000)
    p.set_defaults(func=cmd_gap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except NonConvergence as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except (UsageError, NoExactFormula, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
