"""Command line interface: trace, bench, insert, validate, svg, stats.

Exit codes: 0 success, 2 input error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io as gio
from .dualgraph import build_dual_graph
from .errors import GeodesicError, MeshError, SplineError
from .geodesics import GeodesicEngine
from .harness import run_trials, validate_curve
from .mesh import MeshPoint, load_mesh
from .splines import TraceConfig, TracedCurve, insert as poly_insert, trace as poly_trace


def _engine(path: str, split_fraction: float = 0.05) -> GeodesicEngine:
    mesh = load_mesh(path)
    return GeodesicEngine(mesh, build_dual_graph(mesh, split_fraction))


def _config_from_args(args, base: TraceConfig) -> TraceConfig:
    cfg = base
    if getattr(args, "scheme", None):
        cfg.scheme = args.scheme
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "depth", None) is not None:
        cfg.depth = args.depth
    if getattr(args, "theta", None) is not None:
        cfg.theta_deg = args.theta
    return cfg


def _parse_center(text: str) -> MeshPoint:
    face, a, b = text.split(":")
    return MeshPoint(int(face), float(a), float(b))


def cmd_stats(args) -> int:
    mesh = load_mesh(args.mesh)
    graph = build_dual_graph(mesh, args.split_fraction)
    stats = mesh.stats()
    stats["graph_nodes"] = graph.node_count
    stats["virtual_splits"] = graph.node_count - len(mesh.triangles)
    out = json.dumps(stats, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0


def cmd_trace(args) -> int:
    engine = _engine(args.mesh)
    polys, cfg, _ = gio.spline_from_json(engine, gio.read_json(args.spline))
    cfg = _config_from_args(args, cfg)
    curves = [poly_trace(engine, p, cfg) for p in polys]
    merged = curves[0]
    for extra in curves[1:]:
        merged = TracedCurve(
            merged.nodes + extra.nodes, merged.segments + extra.segments,
            merged.scheme, merged.mode, merged.meta,
        )
    if args.out:
        gio.write_json(args.out, [gio.curve_to_json(c) for c in curves]
                       if len(curves) > 1 else gio.curve_to_json(curves[0]))
    if args.obj:
        with open(args.obj, "w") as fh:
            fh.write(gio.curve_to_obj(merged))
    print(f"traced {len(curves)} curve(s), {merged.segment_count} geodesic segments")
    return 0


def cmd_insert(args) -> int:
    engine = _engine(args.mesh)
    polys, cfg, _ = gio.spline_from_json(engine, gio.read_json(args.spline))
    if len(polys) != 1:
        print("insert expects a single-segment spline file", file=sys.stderr)
        return 2
    left, right = poly_insert(engine, polys[0], args.t, cfg)
    payload = {
        "degree": left.degree,
        "segments": [
            [gio.point_to_json(p) for p in left.points],
            [gio.point_to_json(p) for p in right.points],
        ],
        "continuity": ["corner", "smooth", "corner"],
        **gio.config_to_json(cfg),
    }
    if args.out:
        gio.write_json(args.out, payload)
    else:
        print(json.dumps(payload))
    return 0


def cmd_validate(args) -> int:
    engine = _engine(args.mesh)
    data = gio.read_json(args.curve)
    curves = data if isinstance(data, list) else [data]
    worst = None
    for d in curves:
        curve = gio.curve_from_json(engine, d)
        rep = validate_curve(engine, curve, args.theta)
        print(
            f"max_angle={rep.max_angle_deg:.4f} deg (limit {args.theta}), "
            f"max_gap={rep.max_gap:.6g} (limit {rep.gap_limit:.6g}): "
            + ("PASS" if rep.passed else "FAIL")
        )
        if worst is None or not rep.passed:
            worst = rep
    return 0 if worst is not None and worst.passed else 3


def cmd_bench(args) -> int:
    engine = _engine(args.mesh)
    configs = None
    if args.scheme:
        configs = [TraceConfig(args.scheme, args.mode or "uniform",
                               depth=args.depth if args.depth is not None else 4,
                               theta_deg=args.theta if args.theta is not None else 5.0)]
    records = run_trials(engine, trials=args.trials, seed=args.seed,
                         configs=configs, mesh_name=args.mesh, theta_deg=args.theta or 5.0)
    with open(args.report, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json()) + "\n")
    n_pass = sum(1 for r in records if r.passed)
    print(f"{len(records)} trials, {n_pass} passed validation")
    return 0 if n_pass == len(records) else 3


def cmd_svg(args) -> int:
    from .svg import svg_import

    engine = _engine(args.mesh)
    with open(args.svg) as fh:
        text = fh.read()
    center = _parse_center(args.center)
    splines = svg_import(engine, text, center, scale=args.scale,
                         rotation=args.rotation)
    payload = [gio.spline_to_json(s) for s in splines]
    gio.write_json(args.out, payload)
    print(f"imported {len(splines)} spline(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geobez",
                                 description="Bezier splines on triangle meshes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("stats", help="mesh and dual graph statistics as JSON")
    p.add_argument("mesh")
    p.add_argument("--split-fraction", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("trace", help="trace a spline file into geodesic polylines")
    p.add_argument("mesh")
    p.add_argument("spline")
    p.add_argument("--scheme", choices=["rdc", "olr"])
    p.add_argument("--mode", choices=["uniform", "adaptive"])
    p.add_argument("--depth", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--out")
    p.add_argument("--obj")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("insert", help="split a curve at a parameter")
    p.add_argument("mesh")
    p.add_argument("spline")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_insert)

    p = sub.add_parser("validate", help="check a traced curve's smoothness")
    p.add_argument("mesh")
    p.add_argument("curve")
    p.add_argument("--theta", type=float, default=5.0)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("bench", help="seeded random trace trials")
    p.add_argument("mesh")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", choices=["rdc", "olr"])
    p.add_argument("--mode", choices=["uniform", "adaptive"])
    p.add_argument("--depth", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("svg", help="map an SVG drawing onto the mesh")
    p.add_argument("mesh")
    p.add_argument("svg")
    p.add_argument("--center", required=True, help="FACE:ALPHA:BETA")
    p.add_argument("--scale", type=float, default=0.3)
    p.add_argument("--rotation", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_svg)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (MeshError, SplineError, GeodesicError, FileNotFoundError,
            json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
