"""OBJ meshes, named anatomy structures, and geometric queries.

Queries iterate triangles brute-force; desk-scale organ meshes keep this
interactive without a spatial index.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadFaceIndex, BadParameter, EmptyMesh, MalformedRecord
from .pose import Pose


class Mesh:
    """Triangle mesh: (n, 3) float vertices in mm, (m, 3) int triangles."""

    def __init__(self, vertices, triangles, normals=None, name: str = ""):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if self.triangles.size:
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise BadFaceIndex("triangle index outside vertex range")
        self.normals = None if normals is None else np.asarray(normals, dtype=float)
        self.name = name

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)


@dataclass
class Structure:
    """Named anatomy mesh with rigid transform, uniform scale, visibility, color."""
    id: str
    name: str
    mesh: Mesh
    pose: Pose = field(default_factory=Pose.identity)
    scale: float = 1.0
    visible: bool = True
    color: tuple = (1.0, 1.0, 1.0, 1.0)
    mesh_id: str = ""

    def __post_init__(self):
        if self.scale <= 0:
            raise BadParameter(f"structure scale must be positive, got {self.scale}")

    def world_vertices(self) -> np.ndarray:
        return self.pose.apply(self.mesh.vertices * self.scale)


# ---------------------------------------------------------------------------
# OBJ parsing

def parse_obj(data: bytes) -> list[Mesh]:
    """Parse ASCII OBJ v/vn/f records; o/g records split meshes.

    Quads and larger faces are fan-triangulated from the first vertex;
    negative indices resolve relative to the vertices seen so far.
    Triangles that collapse to two equal indices are dropped.
    """
    text = data.decode("ascii", errors="replace")
    vertices: list = []
    normals: list = []
    meshes: list[Mesh] = []
    faces: list = []
    current_name = ""

    def flush():
        nonlocal faces, current_name
        if faces:
            used = sorted({i for tri in faces for i in tri})
            remap = {g: l for l, g in enumerate(used)}
            local = [[remap[a], remap[b], remap[c]] for a, b, c in faces]
            meshes.append(Mesh([vertices[i] for i in used], local,
                               name=current_name))
        faces = []

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MalformedRecord(f"short vertex record: {raw!r}")
            try:
                vertices.append([float(x) for x in parts[1:4]])
            except ValueError as exc:
                raise MalformedRecord(f"bad vertex record: {raw!r}") from exc
        elif tag == "vn":
            try:
                normals.append([float(x) for x in parts[1:4]])
            except ValueError as exc:
                raise MalformedRecord(f"bad normal record: {raw!r}") from exc
        elif tag == "f":
            if len(parts) < 4:
                raise MalformedRecord(f"face needs >= 3 vertices: {raw!r}")
            idx = []
            for token in parts[1:]:
                head = token.split("/")[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise MalformedRecord(f"bad face token {token!r}") from exc
                if i < 0:
                    i = len(vertices) + i
                else:
                    i = i - 1
                if not 0 <= i < len(vertices):
                    raise BadFaceIndex(
                        f"face references vertex {head} of {len(vertices)}")
                idx.append(i)
            for a, b in zip(idx[1:], idx[2:]):
                if idx[0] == a or idx[0] == b or a == b:
                    continue
                faces.append((idx[0], a, b))
        elif tag in ("o", "g"):
            flush()
            current_name = " ".join(parts[1:])
        # mtllib/usemtl/s/vt and anything else: ignored
    flush()
    return meshes


# ---------------------------------------------------------------------------
# Queries

def mesh_stats(m: Mesh, pose: Pose | None = None, scale: float = 1.0):
    """AABB min/max, center, and triangle count over (transformed) vertices."""
    if len(m.vertices) == 0:
        raise EmptyMesh("mesh has no vertices")
    verts = m.vertices * scale
    if pose is not None:
        verts = pose.apply(verts)
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    return lo, hi, (lo + hi) / 2.0, m.triangle_count


def _ray_triangles(origin, direction, verts, tris):
    """Moller-Trumbore over all triangles; returns (t, hit mask)."""
    a = verts[tris[:, 0]]
    e1 = verts[tris[:, 1]] - a
    e2 = verts[tris[:, 2]] - a
    h = np.cross(direction[None, :], e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) >= 1e-12
    inv = np.where(ok, det, 1.0)
    s = origin[None, :] - a
    u = np.einsum("ij,ij->i", s, h) / inv
    q = np.cross(s, e1)
    v = (q @ direction) / inv
    t = np.einsum("ij,ij->i", e2, q) / inv
    ok &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > 1e-12)
    return t, ok


def ray_pick(structures, origin, direction):
    """Nearest visible-structure hit along a unit ray, or None."""
    origin = np.asarray(origin, dtype=float)
    direction = np.asarray(direction, dtype=float)
    best = None
    for s in structures:
        if not s.visible or s.mesh.triangle_count == 0:
            continue
        t, ok = _ray_triangles(origin, direction, s.world_vertices(),
                               s.mesh.triangles)
        if ok.any():
            t_min = float(t[ok].min())
            if best is None or t_min < best[2]:
                best = (s.id, origin + t_min * direction, t_min)
    return best


def _closest_on_triangles(p, a, b, c):
    """Closest points on triangles (a, b, c) to p. Ericson, vectorized."""
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)
    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    with np.errstate(divide="ignore", invalid="ignore"):
        t_ab = d1 / (d1 - d3)
        t_ac = d2 / (d2 - d6)
        t_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        denom = va + vb + vc
        v_in = vb / denom
        w_in = vc / denom

    out = a + np.nan_to_num(v_in)[:, None] * ab + np.nan_to_num(w_in)[:, None] * ac
    on_bc = (va <= 0) & (d4 - d3 >= 0) & (d5 - d6 >= 0)
    out = np.where(on_bc[:, None], b + np.nan_to_num(t_bc)[:, None] * (c - b), out)
    on_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
    out = np.where(on_ac[:, None], a + np.nan_to_num(t_ac)[:, None] * ac, out)
    on_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
    out = np.where(on_ab[:, None], a + np.nan_to_num(t_ab)[:, None] * ab, out)
    out = np.where(((d6 >= 0) & (d5 <= d6))[:, None], c, out)
    out = np.where(((d3 >= 0) & (d4 <= d3))[:, None], b, out)
    out = np.where(((d1 <= 0) & (d2 <= 0))[:, None], a, out)
    return out


def point_mesh_distance(m: Mesh, p, pose: Pose | None = None,
                        scale: float = 1.0) -> float:
    """Minimum distance from p to the (transformed) mesh surface."""
    if m.triangle_count == 0:
        raise EmptyMesh("mesh has no triangles")
    verts = m.vertices * scale
    if pose is not None:
        verts = pose.apply(verts)
    p = np.asarray(p, dtype=float)
    tris = m.triangles
    closest = _closest_on_triangles(p[None, :], verts[tris[:, 0]],
                                    verts[tris[:, 1]], verts[tris[:, 2]])
    return float(np.sqrt(((closest - p) ** 2).sum(axis=1)).min())
