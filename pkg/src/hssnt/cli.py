"""
Command-line front end.

    hssnt describe su:2,2
    hssnt realize su:2,2 --eta tanh --point 0.5,0
    hssnt verify su:2,2 holo
    hssnt grid su:2,2 --eta tanh --range -3,3 --resolution 21 [--plot grid.png]

stdout carries machine output (JSON or CSV); stderr carries the human summary.
Exit codes: 0 pass, 1 failed check, 2 usage/parse error, 3 model failure,
4 point outside the domain.
"""

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .errors import DomainExceeded, HssntError, InvalidSpec, RankMismatch, UnknownName
from .jsonio import dumps
from .realize import (builtin_odd, domain_membership, odd_calculus, series_map,
                      spectral_decompose)
from .space import build_space
from .suites import SUITES, run_suite

SCHEMA = "hssnt-report/1"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MODEL, EXIT_DOMAIN = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---- parsing helpers ------------------------------------------------------------------

def parse_floats(text, what):
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t != ""]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}")


def read_eta_file(path):
    """One coefficient a_k (of x^(2k+1)) per line plus a line 'radius R'; '#' starts a comment."""
    coeffs, radius = [], None
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read eta file: {exc}")
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0].lower() == "radius":
                radius = float(parts[1])
            else:
                coeffs.append(float(parts[0]))
        except (ValueError, IndexError):
            raise UsageError(f"bad line in eta file: {raw!r}")
    if radius is None:
        raise UsageError("eta file needs a 'radius R' line")
    if not coeffs or coeffs[0] == 0.0:
        raise UsageError("eta file needs a nonzero leading coefficient")
    return series_map(coeffs, radius=radius, name=f"series:{path}")


def resolve_eta(args, default):
    if getattr(args, "eta_file", None):
        return read_eta_file(args.eta_file)
    return builtin_odd(args.eta or default)


def _space_arg(args):
    spec = args.space_opt or args.space
    if not spec:
        raise UsageError("no space given (positional or --space)")
    return build_space(spec)


def _emit(args, text):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---- commands -------------------------------------------------------------------------

def describe_dict(sp):
    d, m = sp.datum, sp.model
    return {
        "schema": SCHEMA,
        "command": "describe",
        "space": m.key,
        "label": m.spec.label,
        "rank": d.rank,
        "type": d.type_label,
        "multiplicities": d.multiplicities,
        "C": d.C,
        "dim_g": m.dim_g,
        "dim_k": m.dim_k,
        "dim_p": m.dim_p,
        "complex_dim": m.dim_p // 2,
        "gamma": [a.label for a in d.Gamma],
        "positive_roots": [a.label for a in d.positive],
    }


def cmd_describe(args):
    sp = _space_arg(args)
    doc = describe_dict(sp)
    _emit(args, dumps(doc))
    print(f"{doc['label']}: rank {doc['rank']}, type {doc['type']}, C = {doc['C']:.6g}",
          file=sys.stderr)
    return EXIT_OK


def realize_dict(sp, eta, point):
    m = sp.model
    point = np.asarray(point, dtype=float)
    if point.shape == (sp.rank,):
        X = sp.from_a(point)
        on_a = True
    elif point.shape == (m.dim_p,):
        X = m.vec(point)
        on_a = False
    else:
        raise RankMismatch(f"point needs {sp.rank} a-coefficients or {m.dim_p} p-coefficients, "
                           f"got {point.size}")
    sd = spectral_decompose(sp, X)
    out = odd_calculus(sp, X, eta)
    doc = {
        "schema": SCHEMA,
        "command": "realize",
        "space": m.key,
        "eta": eta.name,
        "input": {"p": X.coeffs[m.p_slice]},
        "spectral": {"values": list(sd.values),
                     "tripotents": [c.coeffs[m.p_slice] for c in sd.tripotents],
                     "certificate": dict(sd.residuals)},
        "output": {"p": out.coeffs[m.p_slice]},
        "in_domain": domain_membership(sp, out, eta),
    }
    if on_a:
        doc["input"]["a"] = point
        doc["output"]["a"] = sp.a_coords(out.coeffs)
    return doc


def cmd_realize(args):
    sp = _space_arg(args)
    eta = resolve_eta(args, "tanh")
    if args.point:
        point = parse_floats(args.point, "point")
    else:
        rng = np.random.default_rng(args.seed)
        point = sp.model.random_p(rng).coeffs[sp.model.p_slice]
    doc = realize_dict(sp, eta, point)
    _emit(args, dumps(doc))
    print(f"{eta.name} on {sp.model.key}: spectral values "
          f"{np.round(doc['spectral']['values'], 6).tolist()}, in_domain={doc['in_domain']}",
          file=sys.stderr)
    return EXIT_OK


def verify_dict(sp, suite, args):
    rows = run_suite(sp, suite, args)
    checks = []
    for name, res, tol in rows:
        tol = args.tol if args.tol is not None else tol
        ok = bool(np.isfinite(res) and res <= tol)
        checks.append({"name": name, "max_residual": float(res), "tol": float(tol), "pass": ok})
    return {"schema": SCHEMA, "suite": suite, "space": sp.model.key, "seed": args.seed,
            "eta": args.eta, "samples": args.samples,
            "pass": all(c["pass"] for c in checks), "checks": checks}


def cmd_verify(args):
    suite = args.suite_opt or args.suite or "all"
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if args.eta is not None:
        builtin_odd(args.eta)
    sp = _space_arg(args)
    doc = verify_dict(sp, suite, args)
    _emit(args, dumps(doc))
    failed = [c for c in doc["checks"] if not c["pass"]]
    status = "PASS" if not failed else "FAIL"
    print(f"verify {suite} on {sp.model.key}: {status} "
          f"({len(doc['checks']) - len(failed)}/{len(doc['checks'])} checks)", file=sys.stderr)
    for c in failed:
        print(f"  failed {c['name']}: residual {c['max_residual']:.3e} > tol {c['tol']:.1e}",
              file=sys.stderr)
    return EXIT_OK if not failed else EXIT_FAIL


def parse_plane(text, rank):
    try:
        idx = [int(t) - 1 for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad plane {text!r}")
    want = min(rank, 2)
    if len(idx) != want or len(set(idx)) != want or any(i < 0 or i >= rank for i in idx):
        raise UsageError(f"plane {text!r} must name {want} distinct axes in 1..{rank}")
    return idx


def grid_rows(sp, eta, plane, lo, hi, resolution):
    """Section map x -> eta(x) on a coordinate plane (or line for rank 1)."""
    if resolution < 1:
        raise UsageError("resolution must be >= 1")
    ts = np.array([0.0]) if resolution == 1 else np.linspace(lo, hi, resolution)
    line = len(plane) == 1
    rows = []
    pairs = [(t, 0.0) for t in ts] if line else [(a, b) for a in ts for b in ts]
    for x1, x2 in pairs:
        xs = np.array([x1] if line else [x1, x2])
        inside = bool(np.all(np.abs(xs) < eta.radius))
        with np.errstate(all="ignore"):
            ys = eta(xs) if inside else np.full(xs.shape, np.nan)
        in_dom = inside and bool(np.all(np.abs(ys) < eta.sup))
        y1 = float(ys[0])
        y2 = 0.0 if line else float(ys[1])
        rows.append((float(x1), float(x2), y1, y2, in_dom))
    return rows


def _fmt(x):
    if not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return "%.17g" % x


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "y1", "y2", "in_domain"])
    for x1, x2, y1, y2, ok in rows:
        w.writerow([_fmt(x1), _fmt(x2), _fmt(y1), _fmt(y2), "true" if ok else "false"])
    return buf.getvalue()


def render_plot(rows, path, title):
    """PNG of the image grid; matplotlib is imported only here."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise UsageError("--plot needs matplotlib (pip install 'artifact[plot]')")
    arr = np.array([r[:4] for r in rows], dtype=float)
    ok = np.array([r[4] for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.2))
    axes[0].scatter(arr[:, 0], arr[:, 1], c=np.where(ok, "tab:blue", "tab:red"), s=6)
    axes[0].set_title("chart cube (x1, x2)")
    axes[1].scatter(arr[:, 2], arr[:, 3], c=np.where(ok, "tab:blue", "tab:red"), s=6)
    axes[1].set_title("image (y1, y2)")
    for ax in axes:
        ax.set_aspect("equal", adjustable="datalim")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_grid(args):
    sp = _space_arg(args)
    eta = resolve_eta(args, "tanh")
    plane = parse_plane(args.plane or ("1,2" if sp.rank >= 2 else "1"), sp.rank)
    rng_ = parse_floats(args.range, "range")
    if len(rng_) != 2 or not rng_[0] < rng_[1]:
        raise UsageError(f"range {args.range!r} must be 'lo,hi' with lo < hi")
    rows = grid_rows(sp, eta, plane, rng_[0], rng_[1], args.resolution)
    if args.format == "json":
        text = dumps({"schema": SCHEMA, "command": "grid", "space": sp.model.key, "eta": eta.name,
                      "plane": [i + 1 for i in plane],
                      "rows": [{"x1": a, "x2": b, "y1": c, "y2": d, "in_domain": e}
                               for a, b, c, d, e in rows]})
    else:
        text = rows_to_csv(rows)
    _emit(args, text)
    if args.plot:
        render_plot(rows, args.plot, f"{eta.name} on {sp.model.key}")
    inside = sum(r[4] for r in rows)
    print(f"grid {eta.name} on {sp.model.key}: {len(rows)} rows, {inside} in domain",
          file=sys.stderr)
    return EXIT_OK


# ---- argument parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hssnt", description="Realizations of Hermitian symmetric spaces.")
    p.add_argument("--version", action="version", version=f"hssnt {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eta=True):
        sp.add_argument("space", nargs="?", help="space spec, e.g. su:2,2, su11, sp:3")
        sp.add_argument("--space", dest="space_opt", help="space spec (alternative to positional)")
        if eta:
            sp.add_argument("--eta", help="builtin odd function name")
            sp.add_argument("--eta-file", dest="eta_file",
                            help="power-series coefficients, one per line, plus 'radius R'")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write machine output to this file instead of stdout")

    d = sub.add_parser("describe", help="rank, root system, multiplicities, C, dimensions")
    common(d, eta=False)
    d.add_argument("--format", choices=["json"], default="json")
    d.set_defaults(func=cmd_describe)

    r = sub.add_parser("realize", help="spectral decomposition and the eta-realization of a point")
    common(r)
    r.add_argument("--point", help="comma-separated a- or p-coefficients (random if omitted)")
    r.add_argument("--format", choices=["json"], default="json")
    r.set_defaults(func=cmd_realize)

    v = sub.add_parser("verify", help="run a verification suite")
    common(v)
    v.add_argument("suite", nargs="?", help=f"one of {', '.join(SUITES)}")
    v.add_argument("--suite", dest="suite_opt")
    v.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--format", choices=["json"], default="json")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("grid", help="sample the section map x -> eta(x) on a coordinate plane")
    common(g)
    g.add_argument("--plane", help="1-based axes, e.g. 1,2 (a single axis for rank 1)")
    g.add_argument("--range", default="-3,3", help="lo,hi")
    g.add_argument("--resolution", type=int, default=21)
    g.add_argument("--format", choices=["csv", "json"], default="csv")
    g.add_argument("--plot", help="also render a PNG to this path (needs matplotlib)")
    g.set_defaults(func=cmd_grid)
    return p


_VALUE_FLAGS = ("--range", "--point")


def _glue_negative_values(argv):
    """Let '--range -3,3' through: argparse would read '-3,3' as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainExceeded as exc:
        print(f"domain exceeded: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InvalidSpec, UnknownName, RankMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HssntError as exc:
        print(f"model failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
