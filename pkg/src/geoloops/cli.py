"""Command-line sweeps over loop counts, pigeonhole bounds and entropy estimates.

Exit codes: 0 success, 1 failure (selftest or exhausted search), 2 usage or
input error, 3 a bound row failed (implementation bug), 4 witness hypothesis
not met.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from pathlib import Path

from . import __version__
from .bounds import (
    HYPERBOLIC,
    LOOPS,
    CountSeries,
    Geometry,
    check_blichfeldt,
    euclidean_ball_volume,
    hyperbolic_disk_area,
)
from .errors import GeoloopsError, HypothesisNotMet, MalformedInput, SearchExhausted, SingularBasis
from .flat import LatticeModel, blichfeldt_witness, flat_counts, make_lattice, read_lattice
from .groups import enumerate_conjugacy_classes, enumerate_orbit_ball, loop_counts_over_grid
from .hyperbolic import PRESETS, FuchsianModel, UhpPoint, read_group

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3
EXIT_HYPOTHESIS = 4

LATTICE_PRESETS = {
    "z2": [[1.0, 0.0], [0.0, 1.0]],
    "hexagonal": [[1.0, 0.0], [0.5, math.sqrt(3) / 2]],
    "z3": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
}

LATTICE_HEADER = ["t", "loop_count", "primitive_geodesic_count", "blichfeldt_bound", "satisfied"]
FUCHSIAN_HEADER = ["t", "loop_count_base", "loop_count_max_over_grid", "blichfeldt_bound", "satisfied"]
ENTROPY_HEADER = [
    "t", "log_ball_vol_over_t", "log_P_over_t", "log_v_over_t", "h_vol_reference", "half_h_vol_reference",
]


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def t_grid(t_min: float, t_max: float, t_step: float) -> list:
    if not (t_min > 0 and t_step > 0):
        raise UsageError("--t-min and --t-step must be positive")
    if t_min > t_max:
        raise UsageError(f"--t-min {t_min} exceeds --t-max {t_max}")
    n = int(math.floor((t_max - t_min) / t_step + 1e-9))
    return [round(t_min + k * t_step, 12) for k in range(n + 1)]


class Run:
    """Collects rows, caveats and metadata for one command invocation."""

    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.started = time.perf_counter()
        self.caveats = []
        self.models = []

    def caveat(self, msg):
        if msg not in self.caveats:
            self.caveats.append(msg)

    def config(self, full=True) -> dict:
        # the output body must not depend on where it is written
        skip = {"func"} if full else {"func", "out", "manifest"}
        return {"command": self.command, **{k: v for k, v in sorted(vars(self.args).items()) if k not in skip}}

    def manifest(self) -> dict:
        return {
            "config": self.config(),
            "version": __version__,
            "models": self.models,
            "caveats": list(self.caveats),
            "duration_seconds": round(time.perf_counter() - self.started, 6),
        }

    def emit(self, header, rows):
        if self.args.format == "json":
            doc = {
                "config": self.config(full=False),
                "version": __version__,
                "models": self.models,
                "caveats": list(self.caveats),
                "header": header,
                "rows": [dict(zip(header, row)) for row in rows],
            }
            text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
        else:
            lines = [",".join(header)] + [",".join(fmt(v) for v in row) for row in rows]
            text = "\n".join(lines) + "\n"
        self._write(text)

    def emit_json(self, doc):
        self._write(json.dumps(doc, indent=2) + "\n")

    def _write(self, text):
        out = getattr(self.args, "out", None)
        manifest = json.dumps(self.manifest(), indent=2) + "\n"
        if out:
            Path(out).write_text(text, encoding="utf-8", newline="\n")
            Path(str(out) + ".manifest.json").write_text(manifest, encoding="utf-8", newline="\n")
        else:
            sys.stdout.buffer.write(text.encode("utf-8"))
            sys.stdout.flush()
            if getattr(self.args, "manifest", False):
                sys.stderr.write(manifest)


def load_lattice(source: str) -> LatticeModel:
    if source in LATTICE_PRESETS:
        return make_lattice(LATTICE_PRESETS[source], name=source)
    if not Path(source).is_file():
        raise UsageError(
            f"unknown lattice {source!r}; presets: {', '.join(LATTICE_PRESETS)} (or a lattice file path)"
        )
    return read_lattice(source)


def load_group(source: str, slack=None, base_point=None) -> FuchsianModel:
    if source in PRESETS:
        model = PRESETS[source]()
    elif Path(source).is_file():
        model = read_group(source)
    else:
        raise UsageError(f"unknown preset {source!r}; available presets: {', '.join(PRESETS)}")
    if slack is not None:
        model = model.with_slack(slack)
    if base_point is not None:
        model = model.with_base_point(UhpPoint(*base_point))
    return model


def lattice_descriptor(L: LatticeModel) -> dict:
    return {"kind": "lattice", "name": L.name, "dimension": L.dimension, "covolume": L.covolume,
            "basis": L.basis.tolist()}


def group_descriptor(model: FuchsianModel, grid: int) -> dict:
    return {"kind": "fuchsian", **model.describe(), "base_point_grid": grid,
            "domain_box": list(model.domain_box)}


def cmd_lattice_sweep(args) -> int:
    run = Run(args, "lattice-sweep")
    L = load_lattice(args.model)
    ts = t_grid(args.t_min, args.t_max, args.t_step)
    run.models.append(lattice_descriptor(L))
    counts = flat_counts(L, ts)
    geom = Geometry("euclidean", L.dimension)
    report = check_blichfeldt(CountSeries([(t, p) for t, p, _ in counts], LOOPS, geom, L.name), L.covolume, geom)
    rows = [(r.t, r.count, v, r.bound, r.satisfied) for r, (_, _, v) in zip(report.rows, counts)]
    if not report.all_satisfied:
        run.caveat(f"bound violated at t = {[r.t for r in report.violations()]}")
    run.emit(LATTICE_HEADER, rows)
    return 0 if report.all_satisfied else EXIT_VIOLATION


def cmd_fuchsian_sweep(args) -> int:
    run = Run(args, "fuchsian-sweep")
    model = load_group(args.model, args.slack, args.base_point)
    ts = t_grid(args.t_min, args.t_max, args.t_step)
    run.models.append(group_descriptor(model, args.grid))
    counts, caveats = loop_counts_over_grid(model, ts, args.grid)
    for c in caveats:
        run.caveat(c)
    series = CountSeries([(t, cm) for t, _, cm in counts], LOOPS, HYPERBOLIC, model.name)
    report = check_blichfeldt(series, model.area, HYPERBOLIC)
    rows = [(t, cb, r.count, r.bound, r.satisfied) for (t, cb, _), r in zip(counts, report.rows)]
    run.emit(FUCHSIAN_HEADER, rows)
    return 0 if report.all_satisfied else EXIT_VIOLATION


def cmd_witness(args) -> int:
    run = Run(args, "witness")
    L = load_lattice(args.model)
    run.models.append(lattice_descriptor(L))
    try:
        report = blichfeldt_witness(L, args.r, args.m)
    except HypothesisNotMet as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    doc = report.as_dict()
    doc["distances"] = report.distances(L)
    doc["loop_vectors"] = [list(v) for v in report.loop_vectors()]
    run.emit_json(doc)
    return 0


def _rate(value, t, label, run):
    if value <= 0:
        run.caveat(f"skipped log of zero {label} at t={fmt(t)}")
        return None
    return math.log(value) / t


def cmd_entropy_report(args) -> int:
    run = Run(args, "entropy-report")
    ts = t_grid(args.t_min, args.t_max, args.t_step)
    rows = []
    if args.synthetic_exp:
        run.models.append({"kind": "synthetic", "name": "exp(t)"})
        for t in ts:
            v = math.exp(t)
            rows.append((t, math.log(v) / t, math.log(v) / t, math.log(v) / t, 1.0, 0.5))
        run.emit(ENTROPY_HEADER, rows)
        return 0
    if args.model in PRESETS or (Path(args.model).is_file() and args.model not in LATTICE_PRESETS
                                 and _looks_like_group(args.model)):
        model = load_group(args.model, args.slack, args.base_point)
        run.models.append(group_descriptor(model, 1))
        run.caveat("entropy estimates at finite t are reported only; the limit is asymptotic")
        if model.is_free and model.name == "punctured-torus":
            run.caveat("punctured-torus: noncompact, no convergence guarantee for the entropy limit")
        ball = enumerate_orbit_ball(model, max(ts))
        for c in ball.caveats:
            run.caveat(c)
        geo = None
        if model.is_free:
            census = enumerate_conjugacy_classes(model, max(ts))
            for c in census.caveats:
                run.caveat(c)
            geo = sorted(c.length_geom for c in census.primitive())
        for t in ts:
            p = ball.count_within(t)
            v = sum(1 for x in geo if x <= t + 1e-9) if geo is not None else None
            rows.append((
                t,
                _rate(hyperbolic_disk_area(t), t, "ball volume", run),
                _rate(p, t, "loop count", run),
                _rate(v, t, "geodesic count", run) if v is not None else None,
                1.0,
                0.5,
            ))
    else:
        L = load_lattice(args.model)
        run.models.append(lattice_descriptor(L))
        for t, p, v in flat_counts(L, ts):
            rows.append((
                t,
                _rate(euclidean_ball_volume(L.dimension, t), t, "ball volume", run),
                _rate(p, t, "loop count", run),
                _rate(v, t, "geodesic count", run),
                0.0,
                0.0,
            ))
    run.emit(ENTROPY_HEADER, rows)
    return 0


def _looks_like_group(path) -> bool:
    text = Path(path).read_text(encoding="utf-8")
    return any(line.split()[:1] == ["gen"] for line in text.splitlines())


def cmd_presets(args) -> int:
    lines = ["lattices:"]
    for name, basis in LATTICE_PRESETS.items():
        L = make_lattice(basis)
        lines.append(f"  {name}  dimension={L.dimension}  covolume={fmt(L.covolume)}")
    lines.append("fuchsian groups:")
    for name, make in PRESETS.items():
        m = make()
        lines.append(
            f"  {name}  area={fmt(m.area)}  generators={','.join(m.labels)}  "
            f"free={'yes' if m.is_free else 'no'}  slack={fmt(m.slack)}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return run_selftest(genus2_slack=args.slack, inject=args.inject, verbose=not args.quiet)


def _sweep_flags(p, t_min, t_max, t_step):
    p.add_argument("model", help="preset name or input file")
    p.add_argument("--t-min", type=float, default=t_min)
    p.add_argument("--t-max", type=float, default=t_max)
    p.add_argument("--t-step", type=float, default=t_step)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help="write output here (manifest goes to OUT.manifest.json)")
    p.add_argument("--manifest", action="store_true", help="print the run manifest to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geoloops", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice-sweep", help="loop counts and bound rows on a flat torus")
    _sweep_flags(p, 1.0, 10.0, 1.0)
    p.set_defaults(func=cmd_lattice_sweep)

    p = sub.add_parser("fuchsian-sweep", help="loop counts and bound rows on a hyperbolic surface")
    _sweep_flags(p, 2.0, 8.0, 2.0)
    p.add_argument("--slack", type=float)
    p.add_argument("--grid", type=int, default=5, help="base-point grid is GRID x GRID")
    p.add_argument("--base-point", type=float, nargs=2, metavar=("RE", "IM"))
    p.set_defaults(func=cmd_fuchsian_sweep)

    p = sub.add_parser("witness", help="pigeonhole witness on a lattice")
    p.add_argument("model", help="lattice preset or file")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--manifest", action="store_true")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("entropy-report", help="log(count)/t growth rates")
    _sweep_flags(p, 1.0, 10.0, 1.0)
    p.add_argument("--slack", type=float)
    p.add_argument("--base-point", type=float, nargs=2, metavar=("RE", "IM"))
    p.add_argument("--synthetic-exp", action="store_true", help="test hook: every series is exp(t)")
    p.set_defaults(func=cmd_entropy_report)

    p = sub.add_parser("selftest", help="run the built-in oracle and invariant checks")
    p.add_argument("--slack", type=float, help="override the genus-2 pruning slack")
    p.add_argument("--inject", choices=["bound-sign"], help="test hook: deliberately break a check")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("presets", help="list built-in models")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", 1) is not None and getattr(args, "grid", 1) < 1:
        parser.error("--grid must be positive")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (MalformedInput, SingularBasis) as exc:
        print(f"{parser.prog}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeoloopsError as exc:
        print(f"{parser.prog}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
