"""Validation harness: random control polygons, smoothness checks, trials.

The validation applies the two quantitative checks used for the bulk
robustness experiments: the maximum transported angle between consecutive
geodesic segments must stay under the threshold, and consecutive points of
the flattened polyline must never be farther apart than the longest mesh
edge (a connectivity check).
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .geodesics import GeodesicEngine
from .mesh import MeshPoint, TriangleMesh
from .splines import ControlPolygon, TraceConfig, TracedCurve, polygon_angles, trace


def random_point(mesh: TriangleMesh, rng: np.random.Generator,
                 faces: np.ndarray | None = None) -> MeshPoint:
    """Sample a surface point: face by area, barycentric uniform."""
    areas = mesh.areas if faces is None else mesh.areas[faces]
    w = areas / areas.sum()
    pick = rng.choice(len(w), p=w)
    face = int(pick if faces is None else faces[pick])
    u, v = rng.random(), rng.random()
    if u + v > 1.0:
        u, v = 1.0 - u, 1.0 - v
    return MeshPoint(face, u, v)


def random_polygon(engine: GeodesicEngine, k: int, seed: int,
                   faces: np.ndarray | None = None) -> ControlPolygon:
    """Seeded random control polygon with k+1 area-weighted points."""
    rng = np.random.default_rng(seed)
    pts = [random_point(engine.mesh, rng, faces) for _ in range(k + 1)]
    return ControlPolygon.from_points(engine, pts)


@dataclass
class ValidationReport:
    max_angle_deg: float
    max_gap: float
    gap_limit: float
    angle_pass: bool
    gap_pass: bool

    @property
    def passed(self) -> bool:
        return self.angle_pass and self.gap_pass


def validate_curve(engine: GeodesicEngine, curve: TracedCurve,
                   theta_deg: float) -> ValidationReport:
    poly = ControlPolygon(curve.nodes, curve.segments)
    angles = polygon_angles(engine, poly)
    max_angle = math.degrees(max(angles, default=0.0))
    flat = curve.flat_polyline()
    if len(flat) > 1:
        gaps = np.linalg.norm(np.diff(flat, axis=0), axis=1)
        max_gap = float(gaps.max())
    else:
        max_gap = 0.0
    limit = engine.mesh.max_edge_length
    return ValidationReport(
        max_angle_deg=max_angle,
        max_gap=max_gap,
        gap_limit=limit,
        angle_pass=max_angle <= theta_deg + 1e-9,
        gap_pass=max_gap <= limit + 1e-9,
    )


@dataclass
class TrialRecord:
    trial: int
    seed: int
    mesh: str
    scheme: str
    mode: str
    degree: int
    wall_ms: float
    segments: int
    max_angle_deg: float
    max_gap: float
    gap_limit: float
    passed: bool
    control_points: list

    def to_json(self) -> dict:
        return asdict(self)


def run_trials(engine: GeodesicEngine, *, trials: int, seed: int, degree: int = 3,
               configs: list[TraceConfig] | None = None, mesh_name: str = "mesh",
               theta_deg: float = 5.0) -> list[TrialRecord]:
    """Seeded bulk trials; timing excludes mesh load and graph build."""
    if configs is None:
        configs = [
            TraceConfig("rdc", "uniform", depth=4),
            TraceConfig("olr", "uniform", depth=6),
            TraceConfig("rdc", "adaptive", theta_deg=theta_deg),
            TraceConfig("olr", "adaptive", theta_deg=theta_deg),
        ]
    out: list[TrialRecord] = []
    n = 0
    for i in range(trials):
        poly = random_polygon(engine, degree, seed + i)
        cps = [[p.face, p.alpha, p.beta] for p in poly.points]
        for cfg in configs:
            t0 = time.perf_counter()
            curve = trace(engine, poly, cfg)
            wall = (time.perf_counter() - t0) * 1e3
            rep = validate_curve(engine, curve, cfg.theta_deg)
            out.append(TrialRecord(
                trial=n, seed=seed + i, mesh=mesh_name, scheme=cfg.scheme,
                mode=cfg.mode, degree=degree, wall_ms=wall,
                segments=curve.segment_count, max_angle_deg=rep.max_angle_deg,
                max_gap=rep.max_gap, gap_limit=rep.gap_limit,
                passed=rep.passed, control_points=cps,
            ))
            n += 1
    return out
