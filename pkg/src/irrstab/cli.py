"""Command line: ``irrstab {analyze,nyquist,invert,classify} MANIFEST``.

Exit status 0 means the analysis ran (the verdict is in the output);
1 means it could not be carried out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import expr as ex
from .analysis import AnalysisError, analyze, jsonable, render_text
from .laplace import InversionConfig, invert, write_signal_csv
from .manifest import ManifestError, load_manifest
from .nyquist import export_nyquist_data, write_nyquist_csv
from .singularities import (TruncationFailure, UnsupportedSingularity, check_A3,
                            record_from_point)


def _dump(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _out_dir(args):
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_analyze(args):
    m = load_manifest(args.manifest)
    rep = analyze(m, omega_max=args.omega_max, puncture_eps=args.puncture_eps,
                  tol_rad=args.tol_rad, delta=args.delta)
    d = _out_dir(args)
    fmt = args.format or "json"
    if fmt == "csv":
        raise ManifestError("analyze writes json/txt reports; csv is for nyquist and invert")
    (d / "report.json").write_text(_dump(rep))
    (d / "report.txt").write_text(render_text(rep))
    sys.stdout.write(render_text(rep) if fmt == "txt" else _dump(rep))
    return 0


def _grid(args, m):
    om = args.omega_max or 1e3
    if args.grid == "linear":
        return np.linspace(-om, om, args.points)
    mags = np.geomspace(1e-3, om, args.points // 2)
    w = np.concatenate([-mags[::-1], mags])
    extra = [x for x in m.axis_frequencies if abs(x) <= om]
    return np.unique(np.concatenate([w, extra, [1.0, -1.0]]))


def cmd_nyquist(args):
    m = load_manifest(args.manifest)
    rows, skipped = export_nyquist_data(m.f, _grid(args, m))
    out = Path(args.out) if args.out else _out_dir(args) / "nyquist.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_nyquist_csv(out, rows)
    if skipped:
        sys.stderr.write(f"skipped {len(skipped)} singular grid point(s): "
                         + ", ".join(f"{w:g}" for w in skipped) + "\n")
    sys.stdout.write(f"{out}\n")
    return 0


def cmd_invert(args):
    m = load_manifest(args.manifest)
    t = np.geomspace(args.tmin, args.tmax, args.points)
    centers = tuple(sorted({0.0, *m.axis_frequencies}))
    cfg = InversionConfig(abscissa_min=float(m.options.get("abscissa_min") or 0.0),
                          centers=centers)
    sig = invert(m.f, t, cfg)
    out = Path(args.out) if args.out else _out_dir(args) / "impulse.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_signal_csv(out, sig)
    for n in sig.notes:
        sys.stderr.write(f"note: {n}\n")
    sys.stdout.write(f"{out}\n")
    return 0


def cmd_classify(args):
    m = load_manifest(args.manifest)
    b = complex(args.point.replace(" ", "").replace("i", "j"))
    out = {"point": b, "expr": ex.to_string(m.f)}
    try:
        rec = record_from_point(m.f, b, n_terms=args.n_terms)
        out.update({"class": str(rec.cls), "expansion": rec.expansion.to_dict(),
                    "diagnostics": list(rec.expansion.diagnostics), "notes": list(rec.notes)})
    except (UnsupportedSingularity, TruncationFailure) as e:
        out.update({"class": "out-of-class", "error": str(e)})
    out["A3"] = check_A3(m.f, args.delta if args.delta is not None else m.options["delta"]).to_dict()
    sys.stdout.write(_dump(out))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="irrstab",
                                description="BIBO stability of irrational transfer functions")
    p.add_argument("--version", action="version", version=f"irrstab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("manifest", help="JSON manifest")
    common.add_argument("--omega-max", type=float, default=None)
    common.add_argument("--puncture-eps", type=float, default=None)
    common.add_argument("--tol-rad", type=float, default=None)
    common.add_argument("--delta", type=float, default=None)
    common.add_argument("--out-dir", default=".")
    common.add_argument("--format", choices=["json", "txt", "csv"], default=None)
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="full stability report")
    a.set_defaults(func=cmd_analyze)
    n = sub.add_parser("nyquist", parents=[common], help="Nyquist plot data as CSV")
    n.add_argument("--grid", choices=["log", "linear"], default="log")
    n.add_argument("--points", type=int, default=2001)
    n.add_argument("--out", default=None)
    n.set_defaults(func=cmd_nyquist)
    i = sub.add_parser("invert", parents=[common], help="numerical impulse response as CSV")
    i.add_argument("--tmin", type=float, default=0.1)
    i.add_argument("--tmax", type=float, default=100.0)
    i.add_argument("--points", type=int, default=200)
    i.add_argument("--out", default=None)
    i.set_defaults(func=cmd_invert)
    c = sub.add_parser("classify", parents=[common], help="classify one point")
    c.add_argument("--point", required=True, help="location b, e.g. 0 or 0+1j")
    c.add_argument("--n-terms", type=int, default=3)
    c.set_defaults(func=cmd_classify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, AnalysisError, ValueError, ArithmeticError, OSError) as e:
        sys.stderr.write(f"irrstab {args.command}: error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
