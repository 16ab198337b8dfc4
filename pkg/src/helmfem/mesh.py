"""Triangulations for the Helmholtz experiments.

Three generators:

* ``build_uniform_rect_mesh`` -- structured uniform mesh of a rectangle,
* ``build_rect_two_region_mesh`` -- the fixed [0,2.1]x[0,1] domain with a
  coarse left square, a fine right square and a graded transition band,
* ``build_disk_domain_mesh`` -- disk of radius 1.5 with an optional mirror
  obstacle and a PML annulus {1 <= r <= 1.5}.

All meshes are conforming, consistently oriented (positive signed areas)
and immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import Delaunay, cKDTree

# Region tags
REGION_DEFAULT = 0
REGION_LEFT = 0
REGION_TRANSITION = 1
REGION_RIGHT = 2
REGION_PHYSICAL = 0
REGION_PML = 1

# Boundary tags
TAG_OUTER = 1
TAG_DIRICHLET = 2


class MeshError(ValueError):
    """Invalid geometry input or a generator postcondition failure."""


Point2 = tuple[float, float]


# ---------------------------------------------------------------------------
# Obstacles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoObstacle:
    def loops(self, h: float) -> list[np.ndarray]:
        return []


@dataclass(frozen=True)
class OneFlatMirror:
    """Single axis-aligned mirror: the right mirror of the two-mirror pair.

    Rectangle [L/2 - b/2, L/2 + b/2] x [-a/2, a/2]: height ``a`` in y,
    thickness ``b`` in x, inner face at x = (L - b)/2.
    """

    a: float
    b: float
    L: float

    def loops(self, h: float) -> list[np.ndarray]:
        return [_rect_loop(self.L / 2 - self.b / 2, self.L / 2 + self.b / 2,
                           -self.a / 2, self.a / 2, h)]


@dataclass(frozen=True)
class TwoFlatMirrors:
    """Mirror pair centered at x = +-L/2; gap between inner faces is L - b."""

    a: float
    b: float
    L: float

    def loops(self, h: float) -> list[np.ndarray]:
        return [
            _rect_loop(-self.L / 2 - self.b / 2, -self.L / 2 + self.b / 2,
                       -self.a / 2, self.a / 2, h),
            _rect_loop(self.L / 2 - self.b / 2, self.L / 2 + self.b / 2,
                       -self.a / 2, self.a / 2, h),
        ]


@dataclass(frozen=True)
class TwoCurvedMirrors:
    """Arc caps whose inner faces follow the inscribed ellipse.

    The inner face of the right mirror traces the ellipse with semi-axes
    (l1, l2) over parametric angle |s| <= pi/3, which puts the cap tips at
    polar angle theta_m = arctan((l2/l1) tan(pi/3)); the cap is offset
    outward by thickness ``b`` along the ellipse normal and closed with
    straight ends.
    """

    l1: float = 0.265
    l2: float = 0.53
    b: float = 0.17
    theta_m: float = math.atan(2.0 * math.tan(math.pi / 3))

    def loops(self, h: float) -> list[np.ndarray]:
        s_max = math.pi / 3
        arc_len = 1.2 * self.l2 * 2 * s_max  # generous estimate
        n = max(16, int(math.ceil(arc_len / h)))
        s = np.linspace(-s_max, s_max, n + 1)
        inner = np.column_stack([self.l1 * np.cos(s), self.l2 * np.sin(s)])
        # outward normal of the ellipse (l1 cos s, l2 sin s)
        nx = self.l2 * np.cos(s)
        ny = self.l1 * np.sin(s)
        nrm = np.hypot(nx, ny)
        outer = inner + self.b * np.column_stack([nx / nrm, ny / nrm])
        loop = np.vstack([inner, outer[::-1]])
        right = _dedupe_loop(loop)
        left = right * np.array([-1.0, 1.0])
        return [left[::-1].copy(), right]


Obstacle = NoObstacle | OneFlatMirror | TwoFlatMirrors | TwoCurvedMirrors


def _rect_loop(x0, x1, y0, y1, h) -> np.ndarray:
    """Closed CCW polygon of a rectangle, each side split into >= 8 segments
    of length <= h."""
    def side(p, q):
        n = max(8, int(math.ceil(math.hypot(q[0] - p[0], q[1] - p[1]) / h)))
        t = np.linspace(0.0, 1.0, n + 1)[:-1]
        return np.column_stack([p[0] + t * (q[0] - p[0]),
                                p[1] + t * (q[1] - p[1])])
    corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    parts = [side(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    return np.vstack(parts)


def _dedupe_loop(loop: np.ndarray) -> np.ndarray:
    keep = [0]
    for i in range(1, len(loop)):
        if np.hypot(*(loop[i] - loop[keep[-1]])) > 1e-12:
            keep.append(i)
    if np.hypot(*(loop[keep[-1]] - loop[keep[0]])) <= 1e-12:
        keep.pop()
    return loop[keep]


@dataclass(frozen=True)
class GeometrySpec:
    """Geometry of a computational domain.

    ``kind`` is one of ``rect_uniform``, ``rect_two_region``,
    ``disk_with_obstacle``.  For the disk, the physical region is
    r <= pml_inner_radius and the PML annulus extends to ``outer_radius``.
    """

    kind: str
    extents: tuple[float, float, float, float] | None = None
    obstacle: Obstacle = field(default_factory=NoObstacle)
    pml_inner_radius: float = 1.0
    outer_radius: float = 1.5

    def __post_init__(self):
        if self.kind not in ("rect_uniform", "rect_two_region",
                             "disk_with_obstacle"):
            raise MeshError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "disk_with_obstacle":
            if not 0 < self.pml_inner_radius < self.outer_radius:
                raise MeshError("need 0 < pml_inner_radius < outer_radius")
            for loop in self.obstacle.loops(h=0.05):
                rmax = float(np.max(np.hypot(loop[:, 0], loop[:, 1])))
                if rmax >= self.pml_inner_radius:
                    raise MeshError(
                        "obstacle reaches into the PML annulus "
                        f"(max radius {rmax:.3f} >= {self.pml_inner_radius})")


# ---------------------------------------------------------------------------
# Mesh container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation with region and boundary tags.

    vertices        (nv, 2) float
    triangles       (nt, 3) int, CCW orientation
    tri_regions     (nt,)   int region tag per triangle
    boundary_edges  (nbe, 2) int vertex pairs lying on exactly one triangle
    boundary_tags   (nbe,)  int
    element_diameters (nt,) float, longest edge per triangle
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tri_regions: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    element_diameters: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        r = np.ascontiguousarray(self.tri_regions, dtype=np.int64)
        be = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        bt = np.ascontiguousarray(self.boundary_tags, dtype=np.int64)
        d = _diameters(v, t)
        for name, arr in (("vertices", v), ("triangles", t),
                          ("tri_regions", r), ("boundary_edges", be),
                          ("boundary_tags", bt), ("element_diameters", d)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def signed_areas(self) -> np.ndarray:
        return _signed_areas(self.vertices, self.triangles)

    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)


def _signed_areas(vertices, triangles) -> np.ndarray:
    p = vertices[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _diameters(vertices, triangles) -> np.ndarray:
    p = vertices[triangles]
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
    return np.sqrt((e ** 2).sum(axis=2)).max(axis=0)


def _orient_ccw(vertices, triangles) -> np.ndarray:
    tri = np.array(triangles, dtype=np.int64)
    neg = _signed_areas(vertices, tri) < 0
    tri[neg] = tri[neg][:, [0, 2, 1]]
    return tri


def _edge_counts(triangles):
    """Map sorted-edge -> list of incident triangle indices."""
    edges = {}
    for it, tri in enumerate(triangles):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (a, b) if a < b else (b, a)
            edges.setdefault(key, []).append(it)
    return edges


def validate_mesh(mesh: Mesh) -> None:
    """Check orientation, conformity and boundary consistency; raise on failure."""
    if mesh.num_triangles == 0:
        raise MeshError("empty mesh")
    areas = mesh.signed_areas()
    if np.any(areas <= 0):
        raise MeshError(f"{int(np.sum(areas <= 0))} non-positively oriented triangles")
    edges = _edge_counts(mesh.triangles)
    bad = [e for e, tris in edges.items() if len(tris) > 2]
    if bad:
        raise MeshError(f"non-conforming edges: {bad[:5]}")
    boundary = {e for e, tris in edges.items() if len(tris) == 1}
    declared = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    if boundary != declared:
        missing = boundary - declared
        extra = declared - boundary
        raise MeshError(
            f"boundary mismatch: {len(missing)} undeclared, {len(extra)} spurious")
    used = np.zeros(mesh.num_vertices, dtype=bool)
    used[mesh.triangles.ravel()] = True
    if not used.all():
        raise MeshError(f"{int((~used).sum())} orphan vertices")


# ---------------------------------------------------------------------------
# Structured rectangle
# ---------------------------------------------------------------------------

def build_uniform_rect_mesh(extents: tuple[float, float, float, float],
                            h: float) -> Mesh:
    """Uniform structured mesh of [x0,x1]x[y0,y1] with target size ``h``.

    Cells of side <= h are split along alternating diagonals, so every
    element diameter lies in [h/2, 2h].
    """
    x0, x1, y0, y1 = extents
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate extents {extents}")
    if not 0 < h <= min(x1 - x0, y1 - y0):
        raise MeshError(f"h={h} must be positive and at most the shortest side")
    nx = int(math.ceil((x1 - x0) / h))
    ny = int(math.ceil((y1 - y0) / h))
    verts, tris = _structured_grid(x0, x1, y0, y1, nx, ny)
    return _finish_rect_mesh(verts, tris, np.zeros(len(tris), dtype=np.int64))


def _structured_grid(x0, x1, y0, y1, nx, ny):
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            if (i + j) % 2 == 0:
                tris.append((v00, v10, v11))
                tris.append((v00, v11, v01))
            else:
                tris.append((v00, v10, v01))
                tris.append((v10, v11, v01))
    return verts, np.array(tris, dtype=np.int64)


def _finish_rect_mesh(verts, tris, regions) -> Mesh:
    tris = _orient_ccw(verts, tris)
    edges = _edge_counts(tris)
    bedges = np.array([e for e, ts in edges.items() if len(ts) == 1],
                      dtype=np.int64)
    tags = np.full(len(bedges), TAG_OUTER, dtype=np.int64)
    mesh = Mesh(verts, tris, regions, bedges, tags)
    validate_mesh(mesh)
    return mesh


# ---------------------------------------------------------------------------
# Two-region rectangle with graded transition band
# ---------------------------------------------------------------------------

def build_rect_two_region_mesh(h1: float, h2: float) -> Mesh:
    """Mesh of [0,2.1]x[0,1]: size h1 on [0,1]^2, h2 on [1.1,2.1]x[0,1],
    with a transition band on [1,1.1]x[0,1].

    The two squares are structured; the band is stitched from vertical
    point columns whose x-spacing is sqrt(h1*h2) (the boundary mesh size on
    the top/bottom segments of the band) and whose y-spacing interpolates
    linearly between the square interface spacings.
    """
    if not (0 < h1 < 1 and 0 < h2 < 1):
        raise MeshError("h1 and h2 must lie in (0, 1)")
    n1 = int(math.ceil(1.0 / h1))
    n2 = int(math.ceil(1.0 / h2))
    s1, s2 = 1.0 / n1, 1.0 / n2

    left_v, left_t = _structured_grid(0.0, 1.0, 0.0, 1.0, n1, n1)
    right_v, right_t = _structured_grid(1.1, 2.1, 0.0, 1.0, n2, n2)

    g = math.sqrt(h1 * h2)
    ncol = max(1, round(0.1 / g))
    xs = np.linspace(1.0, 1.1, ncol + 1)
    columns = []
    for j, x in enumerate(xs):
        if j == 0:
            ys = np.linspace(0.0, 1.0, n1 + 1)
        elif j == ncol:
            ys = np.linspace(0.0, 1.0, n2 + 1)
        else:
            target = s1 + (x - 1.0) / 0.1 * (s2 - s1)
            ys = np.linspace(0.0, 1.0, int(math.ceil(1.0 / target)) + 1)
        columns.append(np.column_stack([np.full(len(ys), x), ys]))

    band_v = np.vstack(columns)
    offsets = np.cumsum([0] + [len(c) for c in columns])
    band_t = []
    for j in range(ncol):
        a0, b0 = offsets[j], offsets[j + 1]
        band_t.extend(_stitch_columns(columns[j][:, 1], columns[j + 1][:, 1],
                                      a0, b0))
    band_t = np.array(band_t, dtype=np.int64)

    verts, tris = _weld([left_v, band_v, right_v], [left_t, band_t, right_t])
    regions = np.zeros(len(tris), dtype=np.int64)
    cx = verts[tris].mean(axis=1)[:, 0]
    regions[cx > 1.0] = REGION_TRANSITION
    regions[cx > 1.1] = REGION_RIGHT
    return _finish_rect_mesh(verts, tris, regions)


def _stitch_columns(ya, yb, a0, b0):
    """Triangulate the strip between two sorted vertical point columns."""
    tris = []
    i = j = 0
    while i < len(ya) - 1 or j < len(yb) - 1:
        take_a = j == len(yb) - 1 or (
            i < len(ya) - 1 and ya[i + 1] <= yb[j + 1] + 1e-14)
        if take_a:
            tris.append((a0 + i, b0 + j, a0 + i + 1))
            i += 1
        else:
            tris.append((a0 + i, b0 + j, b0 + j + 1))
            j += 1
    return tris


def _weld(vertex_blocks, tri_blocks, tol=1e-9):
    """Concatenate vertex blocks, merging coincident vertices exactly."""
    all_v = np.vstack(vertex_blocks)
    keys = np.round(all_v / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True,
                                  return_inverse=True)
    verts = all_v[first]
    out_tris = []
    off = 0
    for vb, tb in zip(vertex_blocks, tri_blocks):
        out_tris.append(inverse[tb + off])
        off += len(vb)
    return verts, np.vstack(out_tris)


# ---------------------------------------------------------------------------
# Disk with obstacle and PML annulus
# ---------------------------------------------------------------------------

def build_disk_domain_mesh(spec: GeometrySpec, h: float) -> Mesh:
    """Disk of radius ``spec.outer_radius`` with obstacle holes.

    Interior points sit on concentric rings of spacing ~0.87h; triangles are
    Delaunay, holes are cut by centroid test, and obstacle boundary segments
    are enforced by midpoint insertion.  Triangles are tagged physical/pml by
    centroid radius against ``spec.pml_inner_radius``; obstacle boundaries
    get TAG_DIRICHLET, the outer circle TAG_OUTER.
    """
    if spec.kind != "disk_with_obstacle":
        raise MeshError("spec.kind must be 'disk_with_obstacle'")
    R = spec.outer_radius
    if not 0 < h < R / 4:
        raise MeshError(f"h={h} unreasonable for disk of radius {R}")

    loops = [np.asarray(lp, dtype=float) for lp in spec.obstacle.loops(h)]
    n_outer = max(16, int(math.ceil(2 * math.pi * R / h)))
    phi = 2 * math.pi * np.arange(n_outer) / n_outer
    circle = np.column_stack([R * np.cos(phi), R * np.sin(phi)])

    interior = _ring_points(R, h, loops)

    pts = [circle] + loops + [interior]
    points = np.vstack(pts)
    loop_slices = []
    off = n_outer
    for lp in loops:
        loop_slices.append(np.arange(off, off + len(lp)))
        off += len(lp)

    # enforce obstacle loop segments; insert midpoints where Delaunay misses them
    for _ in range(8):
        tri = Delaunay(points)
        missing = _missing_segments(tri, loop_slices)
        if not missing:
            break
        new_pts, new_ids = [], []
        for (a, b) in missing:
            new_pts.append(0.5 * (points[a] + points[b]))
            new_ids.append((a, b, len(points) + len(new_pts) - 1))
        points = np.vstack([points, np.array(new_pts)])
        loop_slices = _split_loop_chains(loop_slices, new_ids)
    else:
        raise MeshError("could not conform mesh to obstacle boundary")

    triangles = _orient_ccw(points, tri.simplices.astype(np.int64))
    cen = points[triangles].mean(axis=1)
    keep = np.ones(len(triangles), dtype=bool)
    for lp_ids in loop_slices:
        keep &= ~_points_in_polygon(cen, points[lp_ids])
    triangles = triangles[keep]

    # drop orphaned vertices, remap
    used = np.unique(triangles)
    remap = -np.ones(len(points), dtype=np.int64)
    remap[used] = np.arange(len(used))
    points = points[used]
    triangles = remap[triangles]
    obstacle_vids = set()
    for lp_ids in loop_slices:
        obstacle_vids.update(remap[lp_ids].tolist())

    edges = _edge_counts(triangles)
    bedges, btags = [], []
    for e, ts in edges.items():
        if len(ts) == 1:
            bedges.append(e)
            on_obstacle = e[0] in obstacle_vids and e[1] in obstacle_vids
            btags.append(TAG_DIRICHLET if on_obstacle else TAG_OUTER)
    bedges = np.array(bedges, dtype=np.int64)
    btags = np.array(btags, dtype=np.int64)

    cen = points[triangles].mean(axis=1)
    regions = np.where(np.hypot(cen[:, 0], cen[:, 1]) > spec.pml_inner_radius,
                       REGION_PML, REGION_PHYSICAL).astype(np.int64)
    mesh = Mesh(points, triangles, regions, bedges, btags)
    validate_mesh(mesh)
    return mesh


def _ring_points(R, h, loops):
    """Concentric-ring interior points, staying clear of obstacle loops."""
    dr = 0.87 * h
    n_r = max(2, round(R / dr))
    out = [np.zeros((1, 2))]
    for i in range(1, n_r):
        r = R * i / n_r
        n = max(6, round(2 * math.pi * r / h))
        a = 2 * math.pi * (np.arange(n) + 0.5 * (i % 2)) / n
        out.append(np.column_stack([r * np.cos(a), r * np.sin(a)]))
    pts = np.vstack(out)
    mask = np.ones(len(pts), dtype=bool)
    for lp in loops:
        mask &= ~_points_in_polygon(pts, lp)
        mask &= _dist_to_loop(pts, lp) > 0.6 * h
    return pts[mask]


def _dist_to_loop(pts, loop):
    seg_a = loop
    seg_b = np.roll(loop, -1, axis=0)
    d = np.full(len(pts), np.inf)
    for a, b in zip(seg_a, seg_b):
        ab = b - a
        t = np.clip(((pts - a) @ ab) / max(ab @ ab, 1e-300), 0.0, 1.0)
        proj = a + t[:, None] * ab
        d = np.minimum(d, np.hypot(*(pts - proj).T))
    return d


def _points_in_polygon(pts, poly):
    """Ray-casting test, vectorized over pts."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = (x2 - x1) * (y - y1) / (y2 - y1) + x1
        inside ^= crosses & (x < xint)
    return inside


def _missing_segments(tri, loop_slices):
    edge_set = set()
    for simplex in tri.simplices:
        for a, b in ((0, 1), (1, 2), (2, 0)):
            u, v = simplex[a], simplex[b]
            edge_set.add((u, v) if u < v else (v, u))
    missing = []
    for lp_ids in loop_slices:
        for i in range(len(lp_ids)):
            a, b = lp_ids[i], lp_ids[(i + 1) % len(lp_ids)]
            key = (a, b) if a < b else (b, a)
            if key not in edge_set:
                missing.append((int(a), int(b)))
    return missing


def _split_loop_chains(loop_slices, new_ids):
    """Insert midpoint vertex ids into the loop chains."""
    out = []
    for lp_ids in loop_slices:
        chain = list(lp_ids)
        for (a, b, m) in new_ids:
            for i in range(len(chain)):
                u, v = chain[i], chain[(i + 1) % len(chain)]
                if (u == a and v == b) or (u == b and v == a):
                    chain.insert(i + 1, m)
                    break
        out.append(np.array(chain, dtype=np.int64))
    return out


# ---------------------------------------------------------------------------
# Quality report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeshQualityReport:
    diameter_range_per_region: dict[int, tuple[float, float]]
    shape_regularity: float
    local_qu_ratio: float
    probe_radius: float


def shape_regularity(mesh: Mesh) -> float:
    """max over elements of h_K / (2 * inradius_K)."""
    p = mesh.vertices[mesh.triangles]
    e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]])
    lengths = np.sqrt((e ** 2).sum(axis=2))
    perim = lengths.sum(axis=0)
    area = np.abs(_signed_areas(mesh.vertices, mesh.triangles))
    inradius = 2.0 * area / perim
    return float((mesh.element_diameters / (2.0 * inradius)).max())


def local_quasiuniformity_ratio(mesh: Mesh, radius: float) -> float:
    """max over probe balls (one per vertex) of max h_K / min h_K among
    elements meeting the ball."""
    cen = mesh.centroids()
    diam = mesh.element_diameters
    tree = cKDTree(cen)
    # a triangle within distance r of a point has its centroid within r + diam
    pad = float(diam.max())
    worst = 1.0
    groups = tree.query_ball_point(mesh.vertices, radius + pad)
    tri_pts = mesh.vertices[mesh.triangles]
    for vid, cand in enumerate(groups):
        if not cand:
            continue
        cand = np.asarray(cand)
        d = _point_tri_distance(mesh.vertices[vid], tri_pts[cand])
        hit = cand[d <= radius]
        if len(hit) >= 2:
            worst = max(worst, float(diam[hit].max() / diam[hit].min()))
    return worst


def _point_tri_distance(p, tris):
    """Exact distance from point ``p`` to each triangle in ``tris`` (n,3,2)."""
    d = np.full(len(tris), np.inf)
    inside = np.ones(len(tris), dtype=bool)
    for i in range(3):
        a = tris[:, i]
        b = tris[:, (i + 1) % 3]
        ab = b - a
        ap = p[None, :] - a
        cross = ab[:, 0] * ap[:, 1] - ab[:, 1] * ap[:, 0]
        inside &= cross >= -1e-14
        t = np.clip((ap * ab).sum(axis=1) / np.maximum((ab * ab).sum(axis=1), 1e-300),
                    0.0, 1.0)
        proj = a + t[:, None] * ab
        d = np.minimum(d, np.hypot(p[0] - proj[:, 0], p[1] - proj[:, 1]))
    d[inside] = 0.0
    return d


def mesh_quality_report(mesh: Mesh, k: float) -> MeshQualityReport:
    """Size-field and shape diagnostics; the probe radius is 1/k."""
    if mesh.num_triangles == 0:
        raise MeshError("empty mesh")
    if k <= 0:
        raise MeshError("k must be positive")
    per_region = {}
    for tag in np.unique(mesh.tri_regions):
        d = mesh.element_diameters[mesh.tri_regions == tag]
        per_region[int(tag)] = (float(d.min()), float(d.max()))
    return MeshQualityReport(
        diameter_range_per_region=per_region,
        shape_regularity=shape_regularity(mesh),
        local_qu_ratio=local_quasiuniformity_ratio(mesh, 1.0 / k),
        probe_radius=1.0 / k,
    )


# ---------------------------------------------------------------------------
# ASCII mesh format
# ---------------------------------------------------------------------------

def write_mesh_txt(mesh: Mesh, path) -> None:
    """Header 'nv nt nbe', then vertices 'x y', triangles 'v0 v1 v2 region',
    boundary edges 'v0 v1 tag'."""
    with open(path, "w") as f:
        f.write(f"{mesh.num_vertices} {mesh.num_triangles} "
                f"{len(mesh.boundary_edges)}\n")
        for x, y in mesh.vertices:
            f.write(f"{x:.17g} {y:.17g}\n")
        for (a, b, c), r in zip(mesh.triangles, mesh.tri_regions):
            f.write(f"{a} {b} {c} {r}\n")
        for (a, b), t in zip(mesh.boundary_edges, mesh.boundary_tags):
            f.write(f"{a} {b} {t}\n")


def read_mesh_txt(path) -> Mesh:
    with open(path) as f:
        nv, nt, nbe = map(int, f.readline().split())
        verts = np.array([list(map(float, f.readline().split()))
                          for _ in range(nv)])
        rows = [list(map(int, f.readline().split())) for _ in range(nt)]
        tris = np.array([r[:3] for r in rows], dtype=np.int64)
        regions = np.array([r[3] for r in rows], dtype=np.int64)
        brows = [list(map(int, f.readline().split())) for _ in range(nbe)]
        bedges = np.array([r[:2] for r in brows], dtype=np.int64)
        btags = np.array([r[2] for r in brows], dtype=np.int64)
    mesh = Mesh(verts, tris, regions, bedges, btags)
    validate_mesh(mesh)
    return mesh
