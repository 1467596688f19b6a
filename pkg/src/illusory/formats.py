"""File formats: the structured-text interchange format, PGM images,
raw float grids, CSV logs and SVG overlays.

Structured-text grammar (used for scenes, contours, reports and run
configs)::

    document  = { item }
    item      = KEY block | KEY list | KEY atom
    block     = "{" { item } "}"
    list      = "[" { atom } "]"
    atom      = number | WORD | quoted string
    comment   = "#" to end of line

Keys may repeat; repeated keys accumulate in order.  Numbers are written
with shortest-round-trip precision, so parse/serialize round trips are
lossless (decimal inputs of up to 12 significant digits come back
verbatim).
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import Configuration, Contour, Region
from .scene import ScalarField


class FormatError(ValueError):
    """Malformed input to a parser."""


# ---------------------------------------------------------------------------
# structured text
# ---------------------------------------------------------------------------

@dataclass
class Node:
    """Parsed block: ordered (key, value) pairs where a value is an atom,
    a list of atoms, or a nested Node."""

    items: list[tuple[str, object]] = field(default_factory=list)

    def all(self, key: str) -> list[object]:
        return [v for k, v in self.items if k == key]

    def get(self, key: str, default=None):
        for k, v in self.items:
            if k == key:
                return v
        return default

    def one(self, key: str):
        vals = self.all(key)
        if len(vals) != 1:
            raise FormatError(f"expected exactly one {key!r}, found {len(vals)}")
        return vals[0]

    def add(self, key: str, value) -> "Node":
        self.items.append((key, value))
        return self


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "{}[]":
            tokens.append(c)
            i += 1
        elif c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 1
            if j >= n:
                raise FormatError("unterminated string")
            tokens.append(("str", text[i + 1:j]))
            i = j + 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "{}[]#":
                j += 1
            tokens.append(("word", text[i:j]))
            i = j
    return tokens


def _atom(tok) -> object:
    kind, val = tok
    if kind == "str":
        return val
    try:
        if any(c in val for c in ".eE") or val in ("inf", "-inf", "nan"):
            return float(val)
        return int(val)
    except ValueError:
        return val


def parse(text: str) -> Node:
    tokens = _tokenize(text)
    pos = 0

    def parse_items(closing: str | None) -> Node:
        nonlocal pos
        node = Node()
        while pos < len(tokens):
            tok = tokens[pos]
            if tok == closing:
                pos += 1
                return node
            if tok in ("{", "}", "[", "]"):
                raise FormatError(f"unexpected {tok!r}")
            if not isinstance(tok, tuple):
                raise FormatError(f"unexpected token {tok!r}")
            key = tok[1] if tok[0] == "word" else tok[1]
            pos += 1
            if pos >= len(tokens):
                raise FormatError(f"missing value for key {key!r}")
            nxt = tokens[pos]
            if nxt == "{":
                pos += 1
                node.add(key, parse_items("}"))
            elif nxt == "[":
                pos += 1
                vals = []
                while pos < len(tokens) and tokens[pos] != "]":
                    if tokens[pos] in ("{", "}", "["):
                        raise FormatError("nested structure inside a list")
                    vals.append(_atom(tokens[pos]))
                    pos += 1
                if pos >= len(tokens):
                    raise FormatError("unterminated list")
                pos += 1
                node.add(key, vals)
            else:
                pos += 1
                node.add(key, _atom(nxt))
        if closing is not None:
            raise FormatError("unbalanced braces")
        return node

    return parse_items(None)


def _fmt_atom(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    s = str(v)
    if s == "" or any(ch.isspace() for ch in s) or any(ch in s for ch in "{}[]#\""):
        return '"' + s + '"'
    return s


def serialize(node: Node, indent: int = 0) -> str:
    out = []
    pad = "  " * indent
    for key, value in node.items:
        if isinstance(value, Node):
            out.append(f"{pad}{key} {{\n{serialize(value, indent + 1)}{pad}}}\n")
        elif isinstance(value, (list, tuple, np.ndarray)):
            flat = np.asarray(value).ravel().tolist() \
                if isinstance(value, np.ndarray) else list(value)
            body = " ".join(_fmt_atom(v) for v in flat)
            out.append(f"{pad}{key} [ {body} ]\n")
        else:
            out.append(f"{pad}{key} {_fmt_atom(value)}\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# scenes and contours
# ---------------------------------------------------------------------------

def scene_to_node(config: Configuration, params: dict | None = None) -> Node:
    scene = Node()
    if params:
        scene.add("params", _dict_to_node(params))
    scene.add("domain", list(config.domain))
    for reg in config.regions:
        rn = Node()
        rn.add("vertices", reg.vertices.ravel())
        rn.add("smooth", reg.smooth.astype(int))
        scene.add("region", rn)
    for line in config.bundle:
        pn = Node()
        pn.add("vertices", line.ravel())
        scene.add("polyline", pn)
    return Node().add("scene", scene)


def node_to_scene(root: Node) -> Configuration:
    scene = root.one("scene")
    domain = tuple(float(x) for x in scene.one("domain"))
    if len(domain) != 4:
        raise FormatError("domain needs 4 numbers")
    regions = []
    for rn in scene.all("region"):
        verts = _coords(rn.one("vertices"))
        smooth = rn.get("smooth")
        smooth = np.asarray(smooth, dtype=bool) if smooth is not None else None
        regions.append(Region(verts, smooth))
    bundle = [_coords(pn.one("vertices")) for pn in scene.all("polyline")]
    return Configuration(regions, bundle, domain)


def contour_to_node(contour: Contour, params: dict | None = None) -> Node:
    cn = Node()
    if params:
        cn.add("params", _dict_to_node(params))
    cn.add("vertices", contour.vertices.ravel())
    if contour.labels is not None:
        cn.add("labels", contour.labels.astype(int))
    return Node().add("contour", cn)


def node_to_contour(root: Node) -> Contour:
    cn = root.one("contour")
    verts = _coords(cn.one("vertices"))
    labels = cn.get("labels")
    labels = np.asarray(labels, dtype=bool) if labels is not None else None
    return Contour(verts, labels)


def _coords(flat) -> np.ndarray:
    arr = np.asarray([float(x) for x in flat])
    if len(arr) % 2 != 0:
        raise FormatError("coordinate list must have even length")
    return arr.reshape(-1, 2)


def _dict_to_node(d: dict) -> Node:
    node = Node()
    for k, v in d.items():
        if isinstance(v, dict):
            node.add(k, _dict_to_node(v))
        elif isinstance(v, (list, tuple, np.ndarray)):
            node.add(k, v)
        else:
            node.add(k, v)
    return node


def write_scene(path, config: Configuration, params: dict | None = None) -> None:
    with open(path, "w") as f:
        f.write(serialize(scene_to_node(config, params)))


def read_scene(path) -> Configuration:
    with open(path) as f:
        return node_to_scene(parse(f.read()))


def write_contour(path, contour: Contour, params: dict | None = None) -> None:
    with open(path, "w") as f:
        f.write(serialize(contour_to_node(contour, params)))


def read_contour(path) -> Contour:
    with open(path) as f:
        return node_to_contour(parse(f.read()))


# ---------------------------------------------------------------------------
# minimality reports
# ---------------------------------------------------------------------------

def report_to_node(report) -> Node:
    rn = Node()
    rn.add("verdict", report.verdict)
    rn.add("critical_ratio", report.critical_ratio)
    rn.add("r1", report.r1)
    rn.add("r2", report.r2)
    rn.add("weight_ratio", report.ratio)
    rn.add("refutation_margin", report.eta)
    rn.add("seed", report.seed)
    rn.add("samples_tested", report.samples_tested)
    st = Node()
    s = report.structure
    st.add("straight", "pass" if s.straight_ok else "fail")
    st.add("hinge_free", "pass" if s.hinge_ok else "fail")
    st.add("turns", "pass" if s.turns_ok else "fail")
    st.add("idle_angles", "pass" if s.idle_ok else "fail")
    st.add("idle_slack", s.idle_slack)
    rn.add("structure", st)
    for w in report.witnesses:
        wn = Node()
        wn.add("id", w.pert_id)
        wn.add("family", w.family)
        wn.add("description", w.description)
        wn.add("eps", w.eps)
        wn.add("delta_e", w.delta_e)
        rn.add("witness", wn)
    for note in report.notes:
        rn.add("note", note)
    return Node().add("minimality_report", rn)


def write_report(path, report) -> None:
    with open(path, "w") as f:
        f.write(serialize(report_to_node(report)))


def write_perturbations_csv(path, report) -> None:
    """CSV of every evaluated perturbation: id, family, eps, delta_e."""
    with open(path, "w") as f:
        f.write(f"# seed={report.seed} eta={report.eta!r}\n")
        f.write("id,family,eps,delta_e\n")
        for r in report.samples:
            f.write(f"{r.pert_id},{r.family},{r.eps!r},{r.delta_e!r}\n")


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def write_pgm(path, fld: ScalarField, lo: float = 0.0, hi: float = 1.0,
              comment: str = "") -> None:
    """8-bit binary PGM; values are mapped linearly from [lo, hi] to
    [0, 255] and clipped.  Raster row r is the grid line y = r."""
    if hi <= lo:
        raise FormatError("empty value range")
    scaled = np.clip((fld.values - lo) / (hi - lo), 0.0, 1.0)
    img = np.round(scaled * 255.0).astype(np.uint8)
    header = f"P5\n# {comment} scale lo={lo!r} hi={hi!r}\n" \
             f"{fld.width} {fld.height}\n255\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(img.T.tobytes())   # rows are y-lines


def read_pgm(path) -> tuple[ScalarField, float, float]:
    """Read back an 8-bit PGM written by write_pgm; returns the field in
    the original value range."""
    with open(path, "rb") as f:
        data = f.read()
    parts = data.split(b"\n", 1)
    if parts[0] != b"P5":
        raise FormatError("not a binary PGM file")
    lo, hi = 0.0, 1.0
    rest = parts[1]
    fields = []
    while len(fields) < 3:
        line, rest = rest.split(b"\n", 1)
        if line.startswith(b"#"):
            text = line.decode("ascii", "replace")
            if "lo=" in text and "hi=" in text:
                lo = float(text.split("lo=")[1].split()[0])
                hi = float(text.split("hi=")[1].split()[0])
            continue
        fields.extend(line.split())
    width, height, maxval = (int(x) for x in fields[:3])
    if maxval != 255:
        raise FormatError("only 8-bit PGM supported")
    img = np.frombuffer(rest[:width * height], dtype=np.uint8)
    img = img.reshape(height, width).T.astype(float)
    return ScalarField(lo + (img / 255.0) * (hi - lo)), lo, hi


_RAW_MAGIC = b"RFLT64\n"


def write_raw_field(path, fld: ScalarField) -> None:
    """Raw grid format: magic 'RFLT64\\n', ASCII 'width height\\n', then
    width*height little-endian float64, x varying fastest within a y-row."""
    with open(path, "wb") as f:
        f.write(_RAW_MAGIC)
        f.write(f"{fld.width} {fld.height}\n".encode("ascii"))
        f.write(fld.values.T.astype("<f8").tobytes())


def read_raw_field(path) -> ScalarField:
    with open(path, "rb") as f:
        magic = f.read(len(_RAW_MAGIC))
        if magic != _RAW_MAGIC:
            raise FormatError("bad raw-field magic")
        header = b""
        while not header.endswith(b"\n"):
            c = f.read(1)
            if not c:
                raise FormatError("truncated raw-field header")
            header += c
        w, h = (int(x) for x in header.split())
        data = np.frombuffer(f.read(w * h * 8), dtype="<f8")
        if len(data) != w * h:
            raise FormatError("truncated raw-field payload")
        return ScalarField(data.reshape(h, w).T.copy())


# ---------------------------------------------------------------------------
# run logs and overlays
# ---------------------------------------------------------------------------

def write_run_csv(path, history, params_line: str) -> None:
    with open(path, "w") as f:
        f.write(f"# {params_line}\n")
        f.write("step,area,length,energy\n")
        for k in range(len(history.steps)):
            f.write(f"{history.steps[k]},{history.area[k]},"
                    f"{history.length[k]!r},{history.energy[k]!r}\n")


def overlay_field(u: ScalarField, phi: ScalarField) -> ScalarField:
    """Scene image dimmed to mid-gray with the current front painted white:
    a cell is front when its positive flag differs from a neighbor's."""
    base = 0.25 + 0.5 * np.clip(u.values, 0.0, 1.0)
    pos = phi.values > 0.0
    edge = np.zeros_like(pos)
    edge[:-1, :] |= pos[:-1, :] != pos[1:, :]
    edge[1:, :] |= pos[:-1, :] != pos[1:, :]
    edge[:, :-1] |= pos[:, :-1] != pos[:, 1:]
    edge[:, 1:] |= pos[:, :-1] != pos[:, 1:]
    out = base.copy()
    out[edge] = 1.0
    return ScalarField(out)


def write_svg_overlay(path, config: Configuration, contours,
                      size: float | None = None) -> None:
    """Scene polygons (gray) with extracted contours (red) for inspection."""
    xmax = config.domain[2]
    ymax = config.domain[3]
    size = size if size is not None else max(xmax, ymax)
    buf = io.StringIO()
    buf.write(f'<svg xmlns="http://www.w3.org/2000/svg" '
              f'viewBox="0 0 {xmax} {ymax}" width="{size}" height="{size}">\n')
    buf.write(f'<g transform="translate(0,{ymax}) scale(1,-1)">\n')
    for reg in config.regions:
        pts = " ".join(f"{x},{y}" for x, y in reg.vertices)
        buf.write(f'<polygon points="{pts}" fill="#888" stroke="none"/>\n')
    for line in config.bundle:
        pts = " ".join(f"{x},{y}" for x, y in line)
        buf.write(f'<polyline points="{pts}" fill="none" stroke="#888" '
                  f'stroke-width="1"/>\n')
    for contour in contours:
        v = contour.vertices if isinstance(contour, Contour) else contour
        pts = " ".join(f"{x},{y}" for x, y in v)
        buf.write(f'<polygon points="{pts}" fill="none" stroke="#c00" '
                  f'stroke-width="0.75"/>\n')
    buf.write("</g>\n</svg>\n")
    with open(path, "w") as f:
        f.write(buf.getvalue())
