"""Exact planar geometry of scene configurations and candidate contours.

A scene is a set of disjoint simple polygons (solid objects) plus an
optional bundle of open polylines (isolated boundary fragments).  A
candidate contour is a closed polygon that may touch object boundaries
but never enters an object.  The central operation is the split of a
contour into its *real* part (within a tolerance band of the scene
boundaries) and its *imaginary* part (unsupported, interpolated), from
which corner records, junction records and the angular quantities used
by the energy module are derived.

All functions here are pure; inputs are never mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Vertices whose one-sided tangents differ by less than this are treated as
# smooth points of the boundary (arc polygonization, not corners).
DEFAULT_KINK_TOL = 0.1

# Boundary-membership tolerance in pure-geometry mode.  Raster pipelines
# pass their own cell-scaled tolerance instead.
GEOMETRY_TOL = 1e-6

_MERGE_EPS = 1e-12


class GeometryError(ValueError):
    """A configuration or contour violates a structural requirement."""


# ---------------------------------------------------------------------------
# low-level predicates
# ---------------------------------------------------------------------------

def _as_points(a) -> np.ndarray:
    pts = np.asarray(a, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("expected an (n, 2) array of points")
    return pts


def polygon_signed_area(vertices: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise winding."""
    v = _as_points(vertices)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def points_in_polygon(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Crossing-number inside test, vectorized over `points`."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    v = _as_points(vertices)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    x0 = v[:, 0][None, :]
    y0 = v[:, 1][None, :]
    x1 = np.roll(v[:, 0], -1)[None, :]
    y1 = np.roll(v[:, 1], -1)[None, :]
    straddle = (y0 <= y) != (y1 <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (x < x_cross)
    return hits.sum(axis=1) % 2 == 1


def points_segments_distance(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Min distance from each point to a set of segments ((N, 2, 2) array)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    segs = np.asarray(segments, dtype=float)
    if segs.size == 0:
        return np.full(len(pts), np.inf)
    a = segs[:, 0][None, :, :]          # (1, N, 2)
    d = (segs[:, 1] - segs[:, 0])[None, :, :]
    pa = pts[:, None, :] - a            # (M, N, 2)
    dd = np.sum(d * d, axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.sum(pa * d, axis=2) / dd
    t = np.nan_to_num(t, nan=0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, :, None] * d
    dist = np.linalg.norm(pts[:, None, :] - closest, axis=2)
    return dist.min(axis=1)


def _orient(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def segments_cross(p, q, segs: np.ndarray, endpoint_eps: float = 1e-12) -> np.ndarray:
    """Proper-crossing test of segment pq against each segment in `segs`.

    Touching at an endpoint (within `endpoint_eps` of a parameter bound)
    does not count as a crossing.
    """
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    a = segs[:, 0]
    b = segs[:, 1]
    r = q - p
    s = b - a
    denom = r[0] * s[:, 1] - r[1] * s[:, 0]
    ap = a - p
    t_num = ap[:, 0] * s[:, 1] - ap[:, 1] * s[:, 0]
    u_num = ap[:, 0] * r[1] - ap[:, 1] * r[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        u = u_num / denom
    ok = np.abs(denom) > endpoint_eps
    lo, hi = endpoint_eps, 1.0 - endpoint_eps
    return ok & (t > lo) & (t < hi) & (u > lo) & (u < hi)


def polygon_is_simple(vertices: np.ndarray, eps: float = 1e-12) -> bool:
    """True when no two non-adjacent edges of the closed polygon intersect."""
    v = _as_points(vertices)
    n = len(v)
    if n < 3:
        return False
    if len(np.unique(np.round(v, 12), axis=0)) != n:
        return False
    nxt = np.roll(v, -1, axis=0)
    segs = np.stack([v, nxt], axis=1)
    for i in range(n - 2):
        j0 = i + 2
        j1 = n if i > 0 else n - 1   # first edge is adjacent to the last
        if j0 >= j1:
            continue
        if segments_cross(v[i], nxt[i], segs[j0:j1], eps).any():
            return False
    return True


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class Region:
    """A solid object: simple closed polygon, counter-clockwise.

    `smooth` flags mark vertices that come from arc polygonization and are
    never reported as corners, regardless of the angular tolerance.
    """

    vertices: np.ndarray
    smooth: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = _as_points(self.vertices)
        if len(self.vertices) < 3:
            raise GeometryError("region polygon needs at least 3 vertices")
        if self.smooth is None:
            self.smooth = np.zeros(len(self.vertices), dtype=bool)
        else:
            self.smooth = np.asarray(self.smooth, dtype=bool)
            if len(self.smooth) != len(self.vertices):
                raise GeometryError("smooth flags must match vertex count")
        if polygon_signed_area(self.vertices) < 0:
            self.vertices = self.vertices[::-1].copy()
            self.smooth = self.smooth[::-1].copy()

    @property
    def edges(self) -> np.ndarray:
        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def area(self) -> float:
        return polygon_signed_area(self.vertices)


@dataclass
class Configuration:
    """Disjoint solid regions plus an optional bundle of open polylines,
    all strictly inside an axis-aligned rectangular domain."""

    regions: list[Region] = field(default_factory=list)
    bundle: list[np.ndarray] = field(default_factory=list)
    domain: tuple[float, float, float, float] = (0.0, 0.0, 128.0, 128.0)

    def __post_init__(self):
        self.regions = [r if isinstance(r, Region) else Region(r) for r in self.regions]
        self.bundle = [_as_points(p) for p in self.bundle]
        for p in self.bundle:
            if len(p) < 2:
                raise GeometryError("bundle polyline needs at least 2 vertices")

    def region_segments(self) -> np.ndarray:
        if not self.regions:
            return np.zeros((0, 2, 2))
        return np.concatenate([r.edges for r in self.regions], axis=0)

    def bundle_segments(self) -> np.ndarray:
        if not self.bundle:
            return np.zeros((0, 2, 2))
        segs = [np.stack([p[:-1], p[1:]], axis=1) for p in self.bundle]
        return np.concatenate(segs, axis=0)

    def boundary_segments(self) -> np.ndarray:
        return np.concatenate([self.region_segments(), self.bundle_segments()], axis=0)

    def bundle_endpoints(self) -> np.ndarray:
        if not self.bundle:
            return np.zeros((0, 2))
        return np.array([p[i] for p in self.bundle for i in (0, -1)])

    def validate(self, min_separation: float = 0.0) -> None:
        """Raise GeometryError on any violated structural requirement."""
        xmin, ymin, xmax, ymax = self.domain
        if not (xmax > xmin and ymax > ymin):
            raise GeometryError("empty domain rectangle")
        for k, reg in enumerate(self.regions):
            if not polygon_is_simple(reg.vertices):
                raise GeometryError(f"region {k} is not a simple polygon")
            if reg.area() <= 0.0:
                raise GeometryError(f"region {k} has zero area")
        pieces = [r.vertices for r in self.regions] + list(self.bundle)
        for k, pts in enumerate(pieces):
            if (pts[:, 0].min() <= xmin or pts[:, 0].max() >= xmax
                    or pts[:, 1].min() <= ymin or pts[:, 1].max() >= ymax):
                raise GeometryError(f"scene piece {k} is not strictly inside the domain")
        for i in range(len(self.regions)):
            for j in range(i + 1, len(self.regions)):
                d = _polygon_gap(self.regions[i], self.regions[j])
                if d <= min_separation:
                    raise GeometryError(f"regions {i} and {j} overlap or touch")
        # bundle pieces must stay off the regions and off each other
        for i, p in enumerate(self.bundle):
            if self.regions:
                if points_segments_distance(p, self.region_segments()).min() <= min_separation \
                        or points_in_polygon(p, self.regions[0].vertices).any() \
                        or any(points_in_polygon(p, r.vertices).any() for r in self.regions):
                    raise GeometryError(f"bundle polyline {i} meets a region")
            for j in range(i + 1, len(self.bundle)):
                segs_j = np.stack([self.bundle[j][:-1], self.bundle[j][1:]], axis=1)
                if points_segments_distance(p, segs_j).min() <= min_separation:
                    raise GeometryError(f"bundle polylines {i} and {j} touch")
        # generic-corner requirement: computing the corner set raises on
        # degenerate (cusp-like) vertices
        kink_set(self, validate_only=True)


def _polygon_gap(a: Region, b: Region) -> float:
    """Boundary separation of two polygons; 0 when one contains the other."""
    if points_in_polygon(a.vertices, b.vertices).any():
        return 0.0
    if points_in_polygon(b.vertices, a.vertices).any():
        return 0.0
    d1 = points_segments_distance(a.vertices, b.edges).min()
    d2 = points_segments_distance(b.vertices, a.edges).min()
    return min(d1, d2)


@dataclass
class Contour:
    """Closed simple polygon given by its cyclic vertex list.

    After decomposition, `labels[i]` is True when edge i (vertices[i] to
    vertices[i+1], cyclically) lies on the scene boundary.
    """

    vertices: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.vertices = _as_points(self.vertices)
        if len(self.vertices) >= 2 and np.allclose(self.vertices[0], self.vertices[-1]):
            self.vertices = self.vertices[:-1]
            if self.labels is not None and len(self.labels) == len(self.vertices) + 1:
                self.labels = self.labels[:-1]
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=bool)
            if len(self.labels) != len(self.vertices):
                raise GeometryError("need one label per contour edge")

    @property
    def edges(self) -> np.ndarray:
        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)

    def length(self) -> float:
        return float(self.edge_lengths().sum())

    def real_length(self) -> float:
        self._require_labels()
        return float(self.edge_lengths()[self.labels].sum())

    def imaginary_length(self) -> float:
        self._require_labels()
        return float(self.edge_lengths()[~self.labels].sum())

    def _require_labels(self):
        if self.labels is None:
            raise GeometryError("contour has not been decomposed")


@dataclass(frozen=True)
class KinkRecord:
    """A boundary corner with its exterior and interior opening angles."""

    point: tuple[float, float]
    region: int
    vertex: int
    outer_span: float
    inner_span: float


@dataclass(frozen=True)
class JunctionRecord:
    """Endpoint of an unsupported contour piece, sitting on the scene boundary.

    `turn` is the angle between the incoming supported tangent and the
    outgoing unsupported tangent; `idle_angle` is measured against the
    unused boundary arm leaving the junction (pi when no such arm bends
    away, i.e. the junction sits inside a straight boundary edge).
    """

    point: tuple[float, float]
    turn: float
    idle_angle: float
    vertex: int
    component: int


# ---------------------------------------------------------------------------
# corner analysis
# ---------------------------------------------------------------------------

def kink_set(config: Configuration, tol: float = DEFAULT_KINK_TOL,
             validate_only: bool = False) -> list[KinkRecord]:
    """All boundary corners of the configuration, region by region.

    A vertex is a corner when its one-sided tangents differ by more than
    `tol` radians; generator-provided smooth flags override the test.
    Raises on degenerate (cusp-like) corners whose exterior or interior
    opening falls below `tol`.
    """
    records: list[KinkRecord] = []
    for ri, reg in enumerate(config.regions):
        v = reg.vertices
        d = np.roll(v, -1, axis=0) - v
        norms = np.linalg.norm(d, axis=1)
        if (norms < 1e-12).any():
            raise GeometryError(f"region {ri} has a zero-length edge")
        d = d / norms[:, None]
        d_prev = np.roll(d, 1, axis=0)
        turn = np.arctan2(d_prev[:, 0] * d[:, 1] - d_prev[:, 1] * d[:, 0],
                          np.sum(d_prev * d, axis=1))
        inner = math.pi - turn          # interior opening, CCW winding
        for vi in range(len(v)):
            if reg.smooth[vi]:
                continue
            if abs(turn[vi]) <= tol:
                continue
            th_in = float(inner[vi])
            th_out = TWO_PI - th_in
            if th_in < tol or th_out < tol:
                raise GeometryError(
                    f"non-generic configuration: degenerate corner at region "
                    f"{ri} vertex {vi}")
            if not validate_only:
                records.append(KinkRecord(
                    point=(float(v[vi, 0]), float(v[vi, 1])),
                    region=ri, vertex=vi,
                    outer_span=th_out, inner_span=th_in))
    return records


def min_spans(config: Configuration, tol: float = DEFAULT_KINK_TOL) -> tuple[float, float]:
    """Smallest exterior and interior corner openings over the whole scene."""
    kinks = kink_set(config, tol)
    if not kinks:
        raise GeometryError("no kinks: configuration is smooth at this tolerance")
    outer = min(k.outer_span for k in kinks)
    inner = min(k.inner_span for k in kinks)
    return outer, inner


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

def is_admissible(contour: Contour, config: Configuration,
                  eps: float = 1e-9) -> tuple[bool, str]:
    """Check that the contour is a simple closed polygon avoiding every
    region interior and crossing no bundle polyline at an interior point.

    Returns (verdict, diagnostic); the diagnostic names the first violated
    condition.  Boundary contact is allowed.
    """
    v = contour.vertices
    if len(v) < 3:
        return False, "fewer than 3 vertices"
    if not polygon_is_simple(v):
        return False, "not simple"
    for ri, reg in enumerate(config.regions):
        if _enters_polygon(contour, reg, eps):
            return False, f"intersects region {ri} interior"
    endpoint_guard = max(eps, 1e-9)
    bsegs = config.bundle_segments()
    if len(bsegs):
        endpoints = config.bundle_endpoints()
        edges = contour.edges
        for e in range(len(edges)):
            hit = segments_cross(edges[e, 0], edges[e, 1], bsegs)
            if not hit.any():
                continue
            # a crossing right at a polyline endpoint is a legal anchor touch
            for k in np.nonzero(hit)[0]:
                pt = _segment_intersection_point(edges[e], bsegs[k])
                if pt is None:
                    continue
                if np.linalg.norm(endpoints - pt, axis=1).min() > endpoint_guard * 10:
                    return False, "intersects bundle interior"
    return True, "ok"


def _segment_intersection_point(s1: np.ndarray, s2: np.ndarray):
    p, q = s1
    a, b = s2
    r = q - p
    s = b - a
    denom = r[0] * s[1] - r[1] * s[0]
    if abs(denom) < 1e-15:
        return None
    t = ((a[0] - p[0]) * s[1] - (a[1] - p[1]) * s[0]) / denom
    return p + t * r


def _enters_polygon(contour: Contour, reg: Region, eps: float) -> bool:
    """True when any contour point is strictly inside the region."""
    v = contour.vertices
    inside = points_in_polygon(v, reg.vertices)
    if inside.any():
        d = points_segments_distance(v[inside], reg.edges)
        if (d > eps).any():
            return True
    # an edge can dive through the interior with both ends outside: probe
    # the midpoints of the pieces cut by the region boundary
    edges = contour.edges
    redges = reg.edges
    for e in range(len(edges)):
        a, b = edges[e]
        ts = _edge_polygon_crossings(a, b, redges)
        probes = []
        cuts = np.concatenate([[0.0], ts, [1.0]])
        for k in range(len(cuts) - 1):
            probes.append(0.5 * (cuts[k] + cuts[k + 1]))
        pts = a[None, :] + np.asarray(probes)[:, None] * (b - a)[None, :]
        inside = points_in_polygon(pts, reg.vertices)
        if inside.any():
            d = points_segments_distance(pts[inside], redges)
            if (d > eps).any():
                return True
    return False


def _edge_polygon_crossings(a, b, redges: np.ndarray) -> np.ndarray:
    r = b - a
    s = redges[:, 1] - redges[:, 0]
    denom = r[0] * s[:, 1] - r[1] * s[:, 0]
    ap = redges[:, 0] - a
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ap[:, 0] * s[:, 1] - ap[:, 1] * s[:, 0]) / denom
        u = (ap[:, 0] * r[1] - ap[:, 1] * r[0]) / denom
    ok = (np.abs(denom) > 1e-15) & (t > 0) & (t < 1) & (u >= 0) & (u <= 1)
    return np.sort(t[ok])


# ---------------------------------------------------------------------------
# real/imaginary decomposition
# ---------------------------------------------------------------------------

def _capsule_intervals(a: np.ndarray, u: np.ndarray, segs: np.ndarray,
                       radius: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Parameter interval of {a + t u} within `radius` of each segment.

    Distance to a segment is convex along a line, so each sublevel set is
    one interval; it is the union of the two endpoint-disk intervals and
    the perpendicular-strip interval.  Vectorized over segments.
    """
    n = len(segs)
    uu = float(u @ u)
    ulen = math.sqrt(uu)
    q0 = segs[:, 0]
    q1 = segs[:, 1]
    lo = np.full((3, n), np.inf)
    hi = np.full((3, n), -np.inf)

    for row, q in enumerate((q0, q1)):
        aq = q - a
        t_mid = (aq @ u) / uu
        # distance from q to the edge line via the cross product: this form
        # stays well conditioned when q is nearly on the line, where the
        # textbook discriminant cancels catastrophically
        d_line = np.abs(u[0] * aq[:, 1] - u[1] * aq[:, 0]) / ulen
        room = radius * radius - d_line * d_line
        ok = room >= 0.0
        half = np.sqrt(np.maximum(room, 0.0)) / ulen
        lo[row, ok] = (t_mid - half)[ok]
        hi[row, ok] = (t_mid + half)[ok]

    w = q1 - q0
    wlen = np.linalg.norm(w, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        e = w / wlen[:, None]
    nvec = np.stack([-e[:, 1], e[:, 0]], axis=1)
    c_perp = np.sum((a - q0) * nvec, axis=1)
    m_perp = nvec @ u
    c_par = np.sum((a - q0) * e, axis=1)
    m_par = e @ u
    slo, shi = _linear_band(c_perp, m_perp, -radius, radius)
    plo, phi_ = _linear_band(c_par, m_par, np.zeros(n), wlen)
    strip_lo = np.maximum(slo, plo)
    strip_hi = np.minimum(shi, phi_)
    good = (strip_lo <= strip_hi) & (wlen > 1e-12)
    lo[2, good] = strip_lo[good]
    hi[2, good] = strip_hi[good]

    any_piece = hi[0] >= lo[0]
    for row in (1, 2):
        any_piece |= hi[row] >= lo[row]
    t0 = np.where(any_piece, np.minimum.reduce(lo, axis=0), np.nan)
    t1 = np.where(any_piece, np.maximum.reduce(hi, axis=0), np.nan)
    t0 = np.clip(t0, 0.0, 1.0)
    t1 = np.clip(t1, 0.0, 1.0)
    valid = any_piece & (t1 >= 0.0) & (t0 <= 1.0) & (t1 > t0 - 1e-15)
    return t0, t1, valid


def _linear_band(c: np.ndarray, m: np.ndarray, lo_val, hi_val):
    """Solve lo_val <= c + t m <= hi_val for t, per element."""
    n = len(c)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    flat = np.abs(m) < 1e-14
    inside = flat & (c >= lo_val) & (c <= hi_val)
    lo[flat & ~inside] = np.inf
    hi[flat & ~inside] = -np.inf
    nz = ~flat
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (np.asarray(lo_val) - c) / m
        t2 = (np.asarray(hi_val) - c) / m
    lo[nz] = np.minimum(t1, t2)[nz]
    hi[nz] = np.maximum(t1, t2)[nz]
    return lo, hi


def _merge_intervals(pairs: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if not pairs:
        return []
    pairs = sorted(pairs)
    merged = [list(pairs[0])]
    for lo, hi in pairs[1:]:
        if lo <= merged[-1][1] + _MERGE_EPS:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _real_intervals_per_edge(contour: Contour, segs: np.ndarray,
                             tol: float) -> list[list[tuple[float, float]]]:
    out = []
    verts = contour.vertices
    nxt = np.roll(verts, -1, axis=0)
    for i in range(len(verts)):
        a = verts[i]
        u = nxt[i] - a
        if u @ u < 1e-24 or len(segs) == 0:
            out.append([])
            continue
        t0, t1, valid = _capsule_intervals(a, u, segs, tol)
        pairs = [(max(0.0, float(t0[k])), min(1.0, float(t1[k])))
                 for k in np.nonzero(valid)[0]]
        out.append(_merge_intervals([p for p in pairs if p[1] > p[0] - 1e-15]))
    return out


def decompose(contour: Contour, config: Configuration,
              tol: float = GEOMETRY_TOL) -> tuple[float, float, Contour]:
    """Split the contour into supported (real) and unsupported (imaginary)
    parts against the tol-band of the scene boundaries.

    Returns (real_length, imaginary_length, labeled_contour); the two
    lengths partition the total exactly.  Raises when the contour enters a
    region interior, or when its only boundary contact is a single point
    (the unsupported loop would have coincident endpoints).
    """
    ok, why = is_admissible(contour, config, eps=tol)
    if not ok:
        raise GeometryError(f"inadmissible contour: {why}")
    real_len, imag_len, labeled, contacts = decompose_against(
        contour, config.boundary_segments(), tol)
    if real_len == 0.0 and contacts > 0:
        raise GeometryError(
            "imaginary endpoints coincide: contour touches the boundary at "
            "a single point")
    return real_len, imag_len, labeled


def decompose_against(contour: Contour, segs: np.ndarray,
                      tol: float) -> tuple[float, float, Contour, int]:
    """Label the contour against an explicit segment set; no admissibility
    check.  Also reports the number of dropped point contacts (boundary
    touches of zero arc length)."""
    per_edge = _real_intervals_per_edge(contour, segs, tol)

    verts = contour.vertices
    nxt = np.roll(verts, -1, axis=0)
    new_vertices: list[np.ndarray] = []
    new_labels: list[bool] = []
    point_contacts = 0
    for i in range(len(verts)):
        a, b = verts[i], nxt[i]
        elen = float(np.linalg.norm(b - a))
        intervals = per_edge[i]
        pos = 0.0
        pieces = []
        for lo, hi in intervals:
            if (hi - lo) * elen < 1e-9:
                point_contacts += 1
                continue
            if lo > pos + 1e-12:
                pieces.append((pos, lo, False))
            pieces.append((max(pos, lo), hi, True))
            pos = hi
        if pos < 1.0 - 1e-12:
            pieces.append((pos, 1.0, False))
        if not pieces:
            pieces = [(0.0, 1.0, False)]
        for lo, hi, lab in pieces:
            if hi - lo <= 1e-15:
                continue
            new_vertices.append(a + lo * (b - a))
            new_labels.append(lab)

    labeled = Contour(np.asarray(new_vertices), np.asarray(new_labels, dtype=bool))
    lengths = labeled.edge_lengths()
    real_len = float(lengths[labeled.labels].sum())
    imag_len = float(lengths[~labeled.labels].sum())
    return real_len, imag_len, labeled, point_contacts


def imaginary_components(contour: Contour) -> list[np.ndarray]:
    """Index runs of consecutive unsupported edges (cyclic).

    Each entry is the array of edge indices of one connected component.
    An all-imaginary contour yields a single closed component.
    """
    contour._require_labels()
    lab = contour.labels
    n = len(lab)
    if lab.all():
        return []
    if not lab.any():
        return [np.arange(n)]
    start = int(np.nonzero(lab)[0][0])
    order = [(start + k) % n for k in range(n)]
    comps = []
    run: list[int] = []
    for idx in order:
        if not lab[idx]:
            run.append(idx)
        elif run:
            comps.append(np.asarray(run))
            run = []
    if run:
        comps.append(np.asarray(run))
    return comps


def real_components(contour: Contour) -> list[np.ndarray]:
    """Index runs of consecutive supported edges (cyclic)."""
    contour._require_labels()
    flipped = Contour(contour.vertices.copy(), ~contour.labels)
    return imaginary_components(flipped)


def component_points(contour: Contour, comp: np.ndarray) -> np.ndarray:
    """Vertex polyline of a component, endpoints included."""
    v = contour.vertices
    n = len(v)
    idx = [comp[0]] + [(e + 1) % n for e in comp]
    return v[idx]


def component_chord_deviation(contour: Contour, comp: np.ndarray) -> float:
    """Max distance of a component's interior vertices from its endpoint chord."""
    pts = component_points(contour, comp)
    if _is_closed_component(contour, comp):
        chord = pts.mean(axis=0)
        return float(np.linalg.norm(pts - chord, axis=1).max())
    if len(pts) <= 2:
        return 0.0
    seg = np.asarray([[pts[0], pts[-1]]])
    return float(points_segments_distance(pts[1:-1], seg).max())


def _is_closed_component(contour: Contour, comp: np.ndarray) -> bool:
    return len(comp) == len(contour.vertices)


# ---------------------------------------------------------------------------
# junction analysis
# ---------------------------------------------------------------------------

def _unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n < 1e-15:
        raise GeometryError("degenerate zero-length tangent")
    return v / n


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    return float(math.acos(max(-1.0, min(1.0, float(u @ v)))))


def component_tangent(contour: Contour, comp: np.ndarray, at_head: bool,
                      lookback: float) -> np.ndarray:
    """Chord tangent of an unsupported component near one end, pointing
    away from that end.  Averaging over `lookback` of arc length filters
    the tiny boundary-band overhang at the component ends."""
    pts = component_points(contour, comp)
    seq = pts if at_head else pts[::-1]
    acc = 0.0
    target = seq[-1]
    for k in range(1, len(seq)):
        acc += float(np.linalg.norm(seq[k] - seq[k - 1]))
        if acc >= lookback:
            target = seq[k]
            break
    return _unit(target - seq[0])


def supported_run_tangent(contour: Contour, junction_vertex: int,
                          walk_forward: bool, lookback: float) -> np.ndarray:
    """Chord direction of the supported run meeting a junction, oriented
    as the travel direction arriving at the junction point."""
    v = contour.vertices
    lab = contour.labels
    n = len(v)
    z = v[junction_vertex]
    acc = 0.0
    cur = junction_vertex
    for _ in range(n):
        e = cur if walk_forward else (cur - 1) % n
        if not lab[e]:
            break
        nxt = (cur + 1) % n if walk_forward else (cur - 1) % n
        acc += float(np.linalg.norm(v[nxt] - v[cur]))
        cur = nxt
        if acc >= lookback:
            break
    return _unit(z - v[cur])


def boundary_arms_at(point: np.ndarray, config: Configuration,
                     snap: float) -> list[np.ndarray]:
    """Outgoing unit tangents of the scene boundary at a boundary point."""
    best = None   # (dist, arms)
    for reg in config.regions:
        v = reg.vertices
        n = len(v)
        dv = np.linalg.norm(v - point, axis=1)
        vi = int(np.argmin(dv))
        if dv[vi] <= snap:
            arms = [_unit(v[(vi + 1) % n] - v[vi]), _unit(v[(vi - 1) % n] - v[vi])]
            cand = (float(dv[vi]), arms)
            if best is None or cand[0] < best[0]:
                best = cand
            continue
        d = points_segments_distance(point[None, :], reg.edges)
        de = float(d[0])
        if de <= snap and (best is None or de < best[0]):
            dists = _per_segment_distance(point, reg.edges)
            ei = int(np.argmin(dists))
            e = _unit(reg.edges[ei, 1] - reg.edges[ei, 0])
            best = (de, [e, -e])
    for poly in config.bundle:
        segs = np.stack([poly[:-1], poly[1:]], axis=1)
        dv = np.linalg.norm(poly - point, axis=1)
        vi = int(np.argmin(dv))
        if dv[vi] <= snap:
            arms = []
            if vi + 1 < len(poly):
                arms.append(_unit(poly[vi + 1] - poly[vi]))
            if vi - 1 >= 0:
                arms.append(_unit(poly[vi - 1] - poly[vi]))
            cand = (float(dv[vi]), arms)
            if best is None or cand[0] < best[0]:
                best = cand
            continue
        de = float(points_segments_distance(point[None, :], segs)[0])
        if de <= snap and (best is None or de < best[0]):
            dists = _per_segment_distance(point, segs)
            ei = int(np.argmin(dists))
            e = _unit(segs[ei, 1] - segs[ei, 0])
            best = (de, [e, -e])
    return best[1] if best is not None else []


def _per_segment_distance(point: np.ndarray, segs: np.ndarray) -> np.ndarray:
    a = segs[:, 0]
    d = segs[:, 1] - segs[:, 0]
    pa = point[None, :] - a
    dd = np.sum(d * d, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip(np.sum(pa * d, axis=1) / dd, 0.0, 1.0)
    t = np.nan_to_num(t)
    closest = a + t[:, None] * d
    return np.linalg.norm(point[None, :] - closest, axis=1)


def junction_set(contour: Contour, config: Configuration,
                 tol: float = GEOMETRY_TOL) -> list[JunctionRecord]:
    """One record per endpoint of every unsupported component.

    The turn compares the incoming supported tangent with the outgoing
    unsupported tangent.  The idle angle compares the unused boundary arm
    with the unsupported tangent; when the junction sits inside a straight
    boundary edge (both arms collinear) no constraint is active and pi is
    reported.  Raises when an endpoint is farther than `tol` from the
    scene boundary.
    """
    contour._require_labels()
    comps = imaginary_components(contour)
    v = contour.vertices
    n = len(v)
    snap = max(tol * 2.0, 1e-9)
    lookback = max(tol * 8.0, 1e-9)
    records: list[JunctionRecord] = []
    segs = config.boundary_segments()
    for ci, comp in enumerate(comps):
        if _is_closed_component(contour, comp):
            continue
        head = int(comp[0])            # first imaginary edge
        tail = int(comp[-1])           # last imaginary edge
        for at_head in (True, False):
            jv = head if at_head else (tail + 1) % n
            z = v[jv]
            t_im = component_tangent(contour, comp, at_head, lookback)
            t_re = supported_run_tangent(contour, jv,
                                         walk_forward=not at_head,
                                         lookback=lookback)
            if len(segs) == 0 or points_segments_distance(z[None, :], segs)[0] > snap:
                raise GeometryError(
                    "dangling imaginary endpoint: junction off the scene boundary")
            turn = _angle_between(t_im, t_re)
            idle = _idle_angle(z, t_re, t_im, config, snap)
            records.append(JunctionRecord(
                point=(float(z[0]), float(z[1])),
                turn=turn, idle_angle=idle, vertex=jv, component=ci))
    return records


def _idle_angle(z: np.ndarray, t_re: np.ndarray, t_im: np.ndarray,
                config: Configuration, snap: float) -> float:
    arms = boundary_arms_at(z, config, snap)
    if not arms:
        return math.pi
    if len(arms) == 1:
        used = float(arms[0] @ (-t_re))
        if used > 0.5:
            return math.pi
        return _angle_between(arms[0], t_im)
    scores = [float(arm @ (-t_re)) for arm in arms]
    idle_arm = arms[int(np.argmin(scores))]
    used_arm = arms[int(np.argmax(scores))]
    # junction inside a straight edge: the two arms are collinear-opposite
    # and no boundary bends away, so the constraint is vacuous
    if abs(float(used_arm @ idle_arm) + 1.0) < 1e-9:
        return math.pi
    return _angle_between(idle_arm, t_im)


def boundary_walk(config: Configuration, point: np.ndarray,
                  direction: np.ndarray, dist: float,
                  snap: float) -> list[np.ndarray] | None:
    """Walk `dist` of arc length along the scene boundary from `point`,
    starting in (approximately) `direction`.

    Returns the polyline after the start point, ending at the walked-to
    position; None when the point is not on a boundary.  Open polylines
    clip the walk at their ends.
    """
    point = np.asarray(point, float)
    direction = np.asarray(direction, float)
    best = None   # (dist_to_chain, chain, closed, index kind)
    chains: list[tuple[np.ndarray, bool]] = \
        [(r.vertices, True) for r in config.regions] + \
        [(p, False) for p in config.bundle]
    for chain, closed in chains:
        segs = np.stack([chain, np.roll(chain, -1, axis=0)], axis=1) if closed \
            else np.stack([chain[:-1], chain[1:]], axis=1)
        d = float(points_segments_distance(point[None, :], segs)[0])
        if d <= snap and (best is None or d < best[0]):
            best = (d, chain, closed)
    if best is None:
        return None
    _, chain, closed = best
    m = len(chain)

    # locate the point: vertex index, or (edge, parameter)
    dv = np.linalg.norm(chain - point, axis=1)
    vi = int(np.argmin(dv))
    n_edges = m if closed else m - 1

    def edge_vec(e):
        return chain[(e + 1) % m] - chain[e]

    if dv[vi] <= snap:
        at_vertex, edge, t = True, vi, 0.0
    else:
        at_vertex = False
        segs = np.stack([chain, np.roll(chain, -1, axis=0)], axis=1)[:n_edges]
        dists = _per_segment_distance(point, segs)
        edge = int(np.argmin(dists))
        d = edge_vec(edge)
        t = float(np.clip((point - chain[edge]) @ d / (d @ d), 0.0, 1.0))

    # choose the walking orientation whose first tangent best matches
    candidates = []
    if at_vertex:
        if closed or vi < m - 1:
            candidates.append((+1, _unit(edge_vec(vi))))
        if closed or vi > 0:
            candidates.append((-1, _unit(-edge_vec((vi - 1) % m))))
    else:
        candidates.append((+1, _unit(edge_vec(edge))))
        candidates.append((-1, _unit(-edge_vec(edge))))
    sign = max(candidates, key=lambda c: float(c[1] @ _unit(direction)))[0]

    path: list[np.ndarray] = []
    remaining = dist
    cur_edge, cur_t = (edge, t) if not at_vertex else \
        ((vi, 0.0) if sign > 0 else ((vi - 1) % m if closed else vi - 1, 1.0))
    for _ in range(2 * m + 2):
        if remaining <= 0:
            break
        d = edge_vec(cur_edge)
        elen = float(np.linalg.norm(d))
        if sign > 0:
            avail = (1.0 - cur_t) * elen
            if remaining < avail:
                path.append(chain[cur_edge] + (cur_t + remaining / elen) * d)
                return path
            path.append(chain[(cur_edge + 1) % m])
            remaining -= avail
            nxt = cur_edge + 1
            if not closed and nxt >= n_edges:
                return path
            cur_edge, cur_t = nxt % n_edges if closed else nxt, 0.0
        else:
            avail = cur_t * elen
            if remaining < avail:
                path.append(chain[cur_edge] + (cur_t - remaining / elen) * d)
                return path
            path.append(chain[cur_edge])
            remaining -= avail
            nxt = cur_edge - 1
            if not closed and nxt < 0:
                return path
            cur_edge, cur_t = nxt % n_edges if closed else nxt, 1.0
    return path


# ---------------------------------------------------------------------------
# rigid motions (test support)
# ---------------------------------------------------------------------------

def transform_points(pts: np.ndarray, angle: float = 0.0,
                     shift=(0.0, 0.0), scale: float = 1.0) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return (np.asarray(pts, float) * scale) @ rot.T + np.asarray(shift, float)


def transform_configuration(config: Configuration, angle: float = 0.0,
                            shift=(0.0, 0.0), scale: float = 1.0,
                            domain=None) -> Configuration:
    regs = [Region(transform_points(r.vertices, angle, shift, scale), r.smooth.copy())
            for r in config.regions]
    bund = [transform_points(p, angle, shift, scale) for p in config.bundle]
    return Configuration(regs, bund, domain if domain is not None else config.domain)
