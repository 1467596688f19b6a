"""Scene generation, rasterization and the field pipeline.

Canonical test scenes (pac-man triangle/square, the gapped contour-bundle
square, a multi-object bar scene) are generated as exact polygon
configurations together with the ground-truth completion contour where
one is defined.  Fields live on a unit-spaced grid; grid point (i, j) is
the cell center at coordinates x = i, y = j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .geometry import (
    Configuration,
    Contour,
    GeometryError,
    Region,
    points_in_polygon,
    points_segments_distance,
)


class SceneError(ValueError):
    """Raised for invalid scene specifications or field preconditions."""


@dataclass
class ScalarField:
    """Real values on a unit-spaced grid; values[i, j] sits at (x=i, y=j)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise SceneError("scalar field must be 2-D")
        if self.width < 8 or self.height < 8:
            raise SceneError("scalar field smaller than 8x8")

    @property
    def width(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @classmethod
    def full(cls, width: int, height: int, value: float = 0.0) -> "ScalarField":
        return cls(np.full((width, height), float(value)))


SCENE_KINDS = ("kanizsa-triangle", "kanizsa-square", "bundle-square",
               "complex-bar", "custom")


@dataclass
class SceneSpec:
    """Parameters of a generated scene; unset geometry falls back to
    per-kind defaults scaled to the grid size."""

    kind: str
    size: int = 128
    radius: float | None = None
    side: float | None = None
    mouth_deg: float | None = None
    arc_vertices: int = 64
    gap: float | None = None

    def __post_init__(self):
        if self.kind not in SCENE_KINDS:
            raise SceneError(f"unknown scene kind: {self.kind!r}")
        if self.size < 32:
            raise SceneError("grid size below 32 leaves no room for a scene")


def _pacman(center: np.ndarray, radius: float, mouth_dir: float,
            mouth_rad: float, arc_vertices: int) -> Region:
    """Disk with a wedge removed: apex at the center, two straight cut
    edges, and a polygonized outer arc flagged smooth."""
    half = mouth_rad / 2.0
    a0 = mouth_dir + half          # arc start (one mouth corner)
    a1 = mouth_dir - half + 2.0 * math.pi
    angles = np.linspace(a0, a1, arc_vertices + 2)
    rim = center[None, :] + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    verts = np.concatenate([center[None, :], rim], axis=0)
    smooth = np.zeros(len(verts), dtype=bool)
    smooth[2:-1] = True            # interior arc vertices only
    return Region(verts, smooth)


def _triangle_layout(size: int, side: float, radius: float,
                     mouth_deg: float, arc_vertices: int):
    center = np.array([size / 2.0, size / 2.0])
    circum = side / math.sqrt(3.0)
    angles = [math.pi / 2.0, math.pi / 2.0 + 2.0 * math.pi / 3.0,
              math.pi / 2.0 + 4.0 * math.pi / 3.0]
    apexes = [center + circum * np.array([math.cos(a), math.sin(a)]) for a in angles]
    regions = []
    for k, apex in enumerate(apexes):
        to_center = math.atan2(center[1] - apex[1], center[0] - apex[0])
        regions.append(_pacman(apex, radius, to_center,
                               math.radians(mouth_deg), arc_vertices))
    ideal = []
    n = len(apexes)
    for k in range(n):
        prev_dir = _unit(apexes[(k - 1) % n] - apexes[k])
        next_dir = _unit(apexes[(k + 1) % n] - apexes[k])
        ideal.append(apexes[k] + radius * prev_dir)
        ideal.append(apexes[k])
        ideal.append(apexes[k] + radius * next_dir)
    return regions, Contour(np.asarray(ideal))


def _square_layout(size: int, side: float, radius: float,
                   mouth_deg: float, arc_vertices: int):
    center = np.array([size / 2.0, size / 2.0])
    h = side / 2.0
    apexes = [center + np.array(d) for d in
              ((-h, -h), (h, -h), (h, h), (-h, h))]
    regions = []
    for apex in apexes:
        to_center = math.atan2(center[1] - apex[1], center[0] - apex[0])
        regions.append(_pacman(apex, radius, to_center,
                               math.radians(mouth_deg), arc_vertices))
    ideal = []
    n = len(apexes)
    for k in range(n):
        prev_dir = _unit(apexes[(k - 1) % n] - apexes[k])
        next_dir = _unit(apexes[(k + 1) % n] - apexes[k])
        ideal.append(apexes[k] + radius * prev_dir)
        ideal.append(apexes[k])
        ideal.append(apexes[k] + radius * next_dir)
    return regions, Contour(np.asarray(ideal))


def _bundle_square_layout(size: int, side: float, gap: float):
    """Four L-shaped strokes spanning the square corners, leaving a gap at
    each side midpoint; the eight stroke endpoints flank the gaps."""
    center = np.array([size / 2.0, size / 2.0])
    h = side / 2.0
    corners = [center + np.array(d) for d in
               ((-h, -h), (h, -h), (h, h), (-h, h))]
    mids = [(corners[k] + corners[(k + 1) % 4]) / 2.0 for k in range(4)]
    polylines = []
    flank_of_side = []
    for k in range(4):
        d = _unit(corners[(k + 1) % 4] - corners[k])
        flank_of_side.append((mids[k] - (gap / 2.0) * d, mids[k] + (gap / 2.0) * d))
    for k in range(4):
        start = flank_of_side[(k - 1) % 4][1]
        end = flank_of_side[k][0]
        polylines.append(np.asarray([start, corners[k], end]))
    ideal = []
    for k in range(4):
        ideal.append(corners[k])
        ideal.append(flank_of_side[k][0])
        ideal.append(flank_of_side[k][1])
    return polylines, Contour(np.asarray(ideal))


def _rect(x0, y0, x1, y1) -> Region:
    return Region(np.asarray([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], float))


def _complex_bar_layout(size: int):
    """Bar-shaped completion suggested by notched supports; one support
    near the left end protrudes into the bar band and forces a detour."""
    s = size / 128.0
    y0, y1 = 56.0 * s, 72.0 * s
    regions = [
        # left cap, notch opening to the right
        Region(np.asarray([(20, 48), (34, 48), (34, 56), (24, 56),
                           (24, 72), (34, 72), (34, 80), (20, 80)], float) * s),
        # right cap, mirrored
        Region(np.asarray([(108, 48), (108, 80), (94, 80), (94, 72),
                           (104, 72), (104, 56), (94, 56), (94, 48)], float) * s),
        # protruding upper post near the left end: reaches 4 cells into the bar
        _rect(40 * s, 68 * s, 46 * s, 96 * s),
        _rect(40 * s, 34 * s, 46 * s, y0),
        # regular post pairs
        _rect(52 * s, y1, 62 * s, 96 * s),
        _rect(52 * s, 34 * s, 62 * s, y0),
        _rect(76 * s, y1, 84 * s, 96 * s),
        _rect(76 * s, 34 * s, 84 * s, y0),
    ]
    return regions


_KIND_DEFAULTS = {
    "kanizsa-triangle": dict(side=64.0, radius=16.0, mouth_deg=60.0),
    "kanizsa-square": dict(side=56.0, radius=14.0, mouth_deg=90.0),
    "bundle-square": dict(side=56.0, gap=12.0),
}


def generate(spec: SceneSpec) -> tuple[Configuration, Contour | None]:
    """Build the configuration for a scene spec, plus the ideal completion
    contour where the scene defines one (the bar scene does not)."""
    scale = spec.size / 128.0
    defaults = _KIND_DEFAULTS.get(spec.kind, {})
    side = spec.side if spec.side is not None else defaults.get("side", 0.0) * scale
    radius = spec.radius if spec.radius is not None else defaults.get("radius", 0.0) * scale
    mouth = spec.mouth_deg if spec.mouth_deg is not None else defaults.get("mouth_deg", 0.0)
    gap = spec.gap if spec.gap is not None else defaults.get("gap", 0.0) * scale
    domain = (0.0, 0.0, float(spec.size), float(spec.size))

    if spec.kind == "kanizsa-triangle":
        regions, ideal = _triangle_layout(spec.size, side, radius, mouth,
                                          spec.arc_vertices)
        config = Configuration(regions, [], domain)
    elif spec.kind == "kanizsa-square":
        regions, ideal = _square_layout(spec.size, side, radius, mouth,
                                        spec.arc_vertices)
        config = Configuration(regions, [], domain)
    elif spec.kind == "bundle-square":
        polylines, ideal = _bundle_square_layout(spec.size, side, gap)
        config = Configuration([], polylines, domain)
    elif spec.kind == "complex-bar":
        config = Configuration(_complex_bar_layout(spec.size), [], domain)
        ideal = None
    else:
        raise SceneError("custom scenes are read from a scene file, not generated")

    try:
        config.validate()
    except GeometryError as exc:
        raise SceneError(f"scene parameters produce an invalid scene: {exc}") from exc
    return config, ideal


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

def rasterize(config: Configuration, width: int, height: int) -> ScalarField:
    """Binary image of the scene: 1 where a cell center lies inside a
    region, and along bundle strokes one cell wide."""
    xs, ys = np.meshgrid(np.arange(width, dtype=float),
                         np.arange(height, dtype=float), indexing="ij")
    pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
    values = np.zeros(width * height)
    for reg in config.regions:
        values = np.maximum(values, points_in_polygon(pts, reg.vertices).astype(float))
    segs = config.bundle_segments()
    if len(segs):
        d = points_segments_distance(pts, segs)
        values = np.maximum(values, (d <= 0.5).astype(float))
    field = ScalarField(values.reshape(width, height))
    fg = np.argwhere(field.values > 0.5)
    if len(fg):
        if (fg[:, 0].min() == 0 or fg[:, 0].max() == width - 1
                or fg[:, 1].min() == 0 or fg[:, 1].max() == height - 1):
            raise SceneError("scene touches the grid border")
    return field


def supervision_mask(config: Configuration, width: int, height: int) -> np.ndarray:
    """Boolean grid of supervised cells: region interiors plus bundle strokes."""
    return rasterize(config, width, height).values > 0.5


def _bump_kernel(sigma: float) -> np.ndarray:
    k = int(math.floor(sigma))
    offs = np.arange(-k, k + 1, dtype=float)
    dx, dy = np.meshgrid(offs, offs, indexing="ij")
    r2 = (dx * dx + dy * dy) / (sigma * sigma)
    w = np.where(r2 < 1.0, (1.0 - r2) ** 3, 0.0)
    total = w.sum()
    if total <= 0.0:
        raise SceneError("mollifier kernel degenerated to zero mass")
    return w / total


def mollify(u: ScalarField, sigma: float) -> ScalarField:
    """Convolve with a normalized compact bump of radius `sigma`.

    Requires the support of `u` to sit at least `sigma` cells away from
    the grid border so no kernel mass leaks off-grid.
    """
    if sigma <= 0.0:
        raise SceneError("mollification radius must be positive")
    fg = np.argwhere(np.abs(u.values) > 0.0)
    if len(fg) and not _is_constant(u.values):
        margin = min(fg[:, 0].min(), fg[:, 1].min(),
                     u.width - 1 - fg[:, 0].max(), u.height - 1 - fg[:, 1].max())
        if sigma > margin:
            raise SceneError(
                f"mollification radius {sigma} exceeds the free margin {margin}")
    kern = _bump_kernel(sigma)
    return ScalarField(ndimage.convolve(u.values, kern, mode="nearest"))


def _is_constant(a: np.ndarray) -> bool:
    return bool(np.all(a == a.flat[0]))


def edge_indicator(u_sigma: ScalarField, lam: float) -> ScalarField:
    """Soft edge map 1 / (1 + lam * |grad|^2); central differences inside,
    one-sided at the border.  Values in (0, 1], exactly 1 where the
    discrete gradient vanishes."""
    if lam <= 0.0:
        raise SceneError("edge indicator weight must be positive")
    gx, gy = np.gradient(u_sigma.values)
    return ScalarField(1.0 / (1.0 + lam * (gx * gx + gy * gy)))


def speed_field(g: ScalarField, alpha: float, beta: float) -> ScalarField:
    """Front speed alpha + beta * g; range within [alpha, alpha + beta]."""
    if alpha < 0.0 or beta <= 0.0:
        raise SceneError("speed weights need alpha >= 0 and beta > 0")
    return ScalarField(alpha + beta * g.values)


def bilinear(field: ScalarField, pts: np.ndarray) -> np.ndarray:
    """Sample the field at continuous coordinates (bilinear, clamped)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    return ndimage.map_coordinates(field.values, [pts[:, 0], pts[:, 1]],
                                   order=1, mode="nearest")


def line_integral(contour: Contour, field: ScalarField,
                  max_step: float = 0.25) -> float:
    """Integral of the field along the closed contour, sampled at midpoints
    of sub-steps no longer than `max_step` cells."""
    v = contour.vertices
    if (v[:, 0].min() < 0 or v[:, 1].min() < 0
            or v[:, 0].max() > field.width - 1 or v[:, 1].max() > field.height - 1):
        raise SceneError("contour outside grid extent")
    nxt = np.roll(v, -1, axis=0)
    total = 0.0
    for a, b in zip(v, nxt):
        elen = float(np.linalg.norm(b - a))
        if elen == 0.0:
            continue
        n = max(1, int(math.ceil(elen / max_step)))
        ts = (np.arange(n) + 0.5) / n
        mids = a[None, :] + ts[:, None] * (b - a)[None, :]
        total += float(bilinear(field, mids).sum()) * (elen / n)
    return total


def relaxed_energy(contour: Contour, speed: ScalarField,
                   max_step: float = 0.25) -> float:
    """Line integral of the front speed along the contour: the relaxed
    (edge-indicator weighted) contour energy."""
    return line_integral(contour, speed, max_step)


def add_uniform_noise(field: ScalarField, amplitude: float, seed: int = 0) -> ScalarField:
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-amplitude, amplitude, size=field.values.shape)
    return ScalarField(field.values + noise)


@dataclass
class SceneFields:
    """All grids the evolution needs, built once per run."""

    u: ScalarField
    u_sigma: ScalarField
    g: ScalarField
    speed: ScalarField
    mask: np.ndarray


def build_fields(config: Configuration, size: int, alpha: float, beta: float,
                 lam: float, sigma: float) -> SceneFields:
    u = rasterize(config, size, size)
    u_sigma = mollify(u, sigma)
    g = edge_indicator(u_sigma, lam)
    speed = speed_field(g, alpha, beta)
    mask = u.values > 0.5
    return SceneFields(u, u_sigma, g, speed, mask)
