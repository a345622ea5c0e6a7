"""JSON session protocol for interactive frontends.

One POST endpoint; every message carries an echoed id, an op name, and op
arguments mirroring the library signatures. The only session state is the
mesh registry (meshes are heavy); splines travel inside the messages.
"""

from __future__ import annotations

import itertools
import traceback

from fastapi import FastAPI
from pydantic import BaseModel

from . import io as gio
from .dualgraph import build_dual_graph
from .editing import (delete_anchor, insert_anchor, make_spline, move_anchor,
                      move_handle, set_continuity, transform_spline, Spline)
from .geodesics import GeodesicEngine
from .mesh import TriangleMesh, load_mesh
from .splines import TraceConfig, trace as poly_trace

PROTOCOL_VERSION = 1


class SessionMessage(BaseModel):
    id: int | str
    op: str
    args: dict = {}


def create_app() -> FastAPI:
    app = FastAPI(title="geobez session")
    meshes: dict[str, GeodesicEngine] = {}
    counter = itertools.count(1)

    def engine_of(args) -> GeodesicEngine:
        return meshes[args["mesh_id"]]

    def spline_of(engine, args) -> Spline:
        polys, cfg, cont = gio.spline_from_json(engine, args["spline"])
        if cont is None:
            cont = ["corner"] * (len(polys) + 1)
        return Spline(polys, cont, cfg)

    def traced(engine, spline: Spline) -> list[dict]:
        out = []
        for seg in spline.segments:
            curve = poly_trace(engine, seg, spline.config)
            out.append({
                "nodes": [gio.point_to_json(p) for p in curve.nodes],
                "polyline": [[float(c) for c in row] for row in curve.flat_polyline()],
                "segment_count": curve.segment_count,
            })
        return out

    def spline_payload(engine, spline: Spline) -> dict:
        return {"spline": gio.spline_to_json(spline), "curves": traced(engine, spline)}

    def op_load_mesh(args):
        if "path" in args:
            mesh = load_mesh(args["path"])
        else:
            mesh = load_mesh(args["obj_text"])
        engine = GeodesicEngine(mesh, build_dual_graph(mesh, args.get("split_fraction", 0.05)))
        mesh_id = f"mesh-{next(counter)}"
        meshes[mesh_id] = engine
        return {"mesh_id": mesh_id, "stats": mesh.stats()}

    def op_mesh_geometry(args):
        mesh = engine_of(args).mesh
        return {
            "vertices": [[float(c) for c in row] for row in mesh.vertices],
            "triangles": [[int(i) for i in row] for row in mesh.triangles],
        }

    def op_embed(args):
        engine = engine_of(args)
        p = gio.point_from_json(args["point"])
        return {"position": [float(c) for c in engine.mesh.embed(p)]}

    def op_locate(args):
        engine = engine_of(args)
        p = engine.mesh.locate(args["position"])
        return {"point": gio.point_to_json(p)}

    def op_create_spline(args):
        engine = engine_of(args)
        pts = [gio.point_from_json(d) for d in args["control_points"]]
        cfg = gio.config_from_json(args.get("config", {}))
        spline = make_spline(engine, pts, cfg)
        return spline_payload(engine, spline)

    def op_trace(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        return spline_payload(engine, spline)

    def op_move_anchor(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        out = move_anchor(engine, spline, int(args["anchor"]),
                          gio.point_from_json(args["position"]))
        return spline_payload(engine, out)

    def op_move_handle(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        out = move_handle(engine, spline, int(args["anchor"]), args["side"],
                          gio.point_from_json(args["position"]))
        return spline_payload(engine, out)

    def op_set_continuity(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        out = set_continuity(engine, spline, int(args["anchor"]), args["flag"])
        return spline_payload(engine, out)

    def op_insert_point(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        out = insert_anchor(engine, spline, int(args["segment"]), float(args["t"]))
        return spline_payload(engine, out)

    def op_delete_anchor(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        out = delete_anchor(engine, spline, int(args["anchor"]))
        return spline_payload(engine, out)

    def op_transform(args):
        engine = engine_of(args)
        spline = spline_of(engine, args)
        center = gio.point_from_json(args["center"])
        new_center = (gio.point_from_json(args["new_center"])
                      if "new_center" in args else None)
        out = transform_spline(engine, spline, center, args["transform"],
                               angle=float(args.get("angle", 0.0)),
                               scale=float(args.get("scale", 1.0)),
                               new_center=new_center)
        return spline_payload(engine, out)

    def op_svg_import(args):
        from .svg import svg_import

        engine = engine_of(args)
        center = gio.point_from_json(args["center"])
        splines = svg_import(engine, args["svg"], center,
                             scale=float(args.get("scale", 0.3)),
                             rotation=float(args.get("rotation", 0.0)))
        return {"splines": [spline_payload(engine, s) for s in splines]}

    ops = {
        "protocol": lambda args: {"version": PROTOCOL_VERSION},
        "load_mesh": op_load_mesh,
        "mesh_geometry": op_mesh_geometry,
        "embed": op_embed,
        "locate": op_locate,
        "create_spline": op_create_spline,
        "trace": op_trace,
        "move_anchor": op_move_anchor,
        "move_handle": op_move_handle,
        "set_continuity": op_set_continuity,
        "insert_point": op_insert_point,
        "delete_anchor": op_delete_anchor,
        "transform": op_transform,
        "svg_import": op_svg_import,
    }

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "version": PROTOCOL_VERSION}

    @app.post("/session")
    def session(msg: SessionMessage):
        fn = ops.get(msg.op)
        if fn is None:
            return {"id": msg.id, "ok": False,
                    "error": {"type": "UnknownOp", "message": msg.op}}
        try:
            return {"id": msg.id, "ok": True, "result": fn(msg.args)}
        except Exception as exc:  # surface engine errors to the client
            return {
                "id": msg.id, "ok": False,
                "error": {"type": type(exc).__name__, "message": str(exc),
                          "trace": traceback.format_exc(limit=4)},
            }

    return app


app = create_app()
