"""Zero-level-set extraction and contour comparison metrics.

Marching squares with linear interpolation turns a grid field into
closed polygon contours (plus open fragments where the isoline meets the
grid border).  Saddle cells are disambiguated by the cell-center average
sign.  Segments are oriented with the positive region on the left, so
every interior crossing edge is entered exactly once and left exactly
once, and stitching is a plain walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Configuration, Contour, GeometryError, decompose, \
    points_segments_distance, polygon_signed_area
from .scene import ScalarField, bilinear

# case -> list of (entry edge, exit edge); edges 0=bottom, 1=right, 2=top, 3=left
_B, _R, _T, _L = 0, 1, 2, 3
_CASES: dict[int, list[tuple[int, int]]] = {
    1: [(_B, _L)],
    2: [(_R, _B)],
    3: [(_R, _L)],
    4: [(_T, _R)],
    6: [(_T, _B)],
    7: [(_T, _L)],
    8: [(_L, _T)],
    9: [(_B, _T)],
    11: [(_R, _T)],
    12: [(_L, _R)],
    13: [(_B, _R)],
    14: [(_L, _B)],
}
_SADDLE_POS = {5: [(_B, _R), (_T, _L)], 10: [(_L, _B), (_R, _T)]}
_SADDLE_NEG = {5: [(_B, _L), (_T, _R)], 10: [(_R, _B), (_L, _T)]}


def segment_soup(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All oriented isoline segments of the field (no stitching).

    Returns (segments (M, 2, 2), edge ids (M, 2)); ids identify the grid
    edges each segment endpoint lies on.
    """
    v = np.asarray(values, dtype=float)
    w, h = v.shape
    pos = v > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = v[:-1, :] / (v[:-1, :] - v[1:, :])
        ty = v[:, :-1] / (v[:, :-1] - v[:, 1:])
    tx = np.clip(np.nan_to_num(tx, nan=0.5), 1e-9, 1.0 - 1e-9)
    ty = np.clip(np.nan_to_num(ty, nan=0.5), 1e-9, 1.0 - 1e-9)

    b0 = pos[:-1, :-1]
    b1 = pos[1:, :-1]
    b2 = pos[1:, 1:]
    b3 = pos[:-1, 1:]
    case = (b0.astype(np.int8) + 2 * b1.astype(np.int8)
            + 4 * b2.astype(np.int8) + 8 * b3.astype(np.int8))

    segs_list = []
    ids_list = []

    def edge_points(which: int, ii: np.ndarray, jj: np.ndarray):
        if which == _B:
            pts = np.stack([ii + tx[ii, jj], jj.astype(float)], axis=1)
            ids = (ii * h + jj) * 2
        elif which == _T:
            pts = np.stack([ii + tx[ii, jj + 1], (jj + 1).astype(float)], axis=1)
            ids = (ii * h + jj + 1) * 2
        elif which == _L:
            pts = np.stack([ii.astype(float), jj + ty[ii, jj]], axis=1)
            ids = (ii * h + jj) * 2 + 1
        else:
            pts = np.stack([(ii + 1).astype(float), jj + ty[ii + 1, jj]], axis=1)
            ids = ((ii + 1) * h + jj) * 2 + 1
        return pts, ids

    def emit(pairs, ii, jj):
        for e_from, e_to in pairs:
            p_from, id_from = edge_points(e_from, ii, jj)
            p_to, id_to = edge_points(e_to, ii, jj)
            segs_list.append(np.stack([p_from, p_to], axis=1))
            ids_list.append(np.stack([id_from, id_to], axis=1))

    for c, pairs in _CASES.items():
        ii, jj = np.nonzero(case == c)
        if len(ii):
            emit(pairs, ii, jj)
    for c in (5, 10):
        ii, jj = np.nonzero(case == c)
        if not len(ii):
            continue
        center = 0.25 * (v[ii, jj] + v[ii + 1, jj] + v[ii + 1, jj + 1] + v[ii, jj + 1])
        for mask, table in ((center > 0.0, _SADDLE_POS), (center <= 0.0, _SADDLE_NEG)):
            if mask.any():
                emit(table[c], ii[mask], jj[mask])

    if not segs_list:
        return np.zeros((0, 2, 2)), np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(segs_list), np.concatenate(ids_list).astype(np.int64)


@dataclass
class ExtractionResult:
    """Closed isoline contours (largest area first) plus any open
    border-clipped fragments."""

    contours: list[Contour] = field(default_factory=list)
    fragments: list[np.ndarray] = field(default_factory=list)
    areas: list[float] = field(default_factory=list)


def zero_contour(phi: ScalarField | np.ndarray) -> ExtractionResult:
    """Extract the zero isoline as stitched polygon contours."""
    values = phi.values if isinstance(phi, ScalarField) else np.asarray(phi, float)
    if not np.isfinite(values).all():
        raise ValueError("field contains non-finite values")
    segs, ids = segment_soup(values)
    if len(segs) == 0:
        return ExtractionResult()

    from_map = {int(ids[k, 0]): k for k in range(len(segs))}
    to_map = {int(ids[k, 1]): k for k in range(len(segs))}
    used = np.zeros(len(segs), dtype=bool)
    contours: list[Contour] = []
    areas: list[float] = []
    fragments: list[np.ndarray] = []

    for start in range(len(segs)):
        if used[start]:
            continue
        chain = [start]
        used[start] = True
        closed = False
        cur = start
        while True:
            nxt = from_map.get(int(ids[cur, 1]))
            if nxt is None:
                break
            if nxt == start:
                closed = True
                break
            if used[nxt]:
                break
            chain.append(nxt)
            used[nxt] = True
            cur = nxt
        if not closed:
            # walk backward from the start for border-clipped pieces
            cur = start
            while True:
                prv = to_map.get(int(ids[cur, 0]))
                if prv is None or used[prv]:
                    break
                chain.insert(0, prv)
                used[prv] = True
                cur = prv
        pts = np.asarray([segs[k, 0] for k in chain])
        if closed:
            pts = _dedupe(pts)
            if len(pts) >= 3:
                contours.append(Contour(pts))
                areas.append(abs(polygon_signed_area(pts)))
        else:
            pts = np.concatenate([pts, segs[chain[-1], 1][None, :]])
            fragments.append(_dedupe(pts))

    order = np.argsort(areas)[::-1]
    return ExtractionResult(
        contours=[contours[k] for k in order],
        fragments=fragments,
        areas=[areas[k] for k in order])


def _dedupe(pts: np.ndarray) -> np.ndarray:
    if len(pts) < 2:
        return pts
    keep = np.ones(len(pts), dtype=bool)
    for k in range(1, len(pts)):
        if np.linalg.norm(pts[k] - pts[k - 1]) < 1e-12:
            keep[k] = False
    return pts[keep]


def contour_length_total(values: np.ndarray) -> float:
    segs, _ = segment_soup(values)
    if len(segs) == 0:
        return 0.0
    return float(np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1).sum())


def isoline_integral(values: np.ndarray, field: ScalarField,
                     subdiv: int = 6) -> tuple[float, float]:
    """(total isoline length, line integral of `field` along the isoline).

    Midpoint quadrature on every isoline segment subdivided `subdiv`
    times; marching segments are at most sqrt(2) long, so subdiv=6 keeps
    steps under a quarter cell.
    """
    segs, _ = segment_soup(values)
    if len(segs) == 0:
        return 0.0, 0.0
    a = segs[:, 0]
    d = segs[:, 1] - segs[:, 0]
    lens = np.linalg.norm(d, axis=1)
    ts = (np.arange(subdiv) + 0.5) / subdiv
    pts = a[:, None, :] + ts[None, :, None] * d[:, None, :]
    samples = bilinear(field, pts.reshape(-1, 2)).reshape(len(segs), subdiv)
    integral = float((samples.mean(axis=1) * lens).sum())
    return float(lens.sum()), integral


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _resample_closed(pts: np.ndarray, step: float) -> np.ndarray:
    out = []
    n = len(pts)
    for k in range(n):
        a, b = pts[k], pts[(k + 1) % n]
        elen = float(np.linalg.norm(b - a))
        m = max(1, int(np.ceil(elen / step)))
        ts = np.arange(m) / m
        out.append(a[None, :] + ts[:, None] * (b - a)[None, :])
    return np.concatenate(out)


def hausdorff(a: Contour | np.ndarray, b: Contour | np.ndarray,
              step: float = 0.25) -> float:
    """Symmetric Hausdorff distance between two closed polygon contours,
    with dense resampling against exact segment distances."""
    pa = a.vertices if isinstance(a, Contour) else np.asarray(a, float)
    pb = b.vertices if isinstance(b, Contour) else np.asarray(b, float)
    if len(pa) < 3 or len(pb) < 3:
        raise GeometryError("degenerate contour in distance computation")
    sa = np.stack([pa, np.roll(pa, -1, axis=0)], axis=1)
    sb = np.stack([pb, np.roll(pb, -1, axis=0)], axis=1)
    ra = _resample_closed(pa, step)
    rb = _resample_closed(pb, step)
    d_ab = _max_min_distance(ra, sb)
    d_ba = _max_min_distance(rb, sa)
    return max(d_ab, d_ba)


def _max_min_distance(points: np.ndarray, segs: np.ndarray,
                      chunk: int = 2048) -> float:
    worst = 0.0
    for k in range(0, len(points), chunk):
        d = points_segments_distance(points[k:k + chunk], segs)
        worst = max(worst, float(d.max()))
    return worst


def classify(contour: Contour, config: Configuration,
             tol: float = 1.0) -> tuple[float, float, Contour]:
    """Supported/unsupported split of an extracted contour at raster
    tolerance (defaults to one cell)."""
    return decompose(contour, config, tol)
