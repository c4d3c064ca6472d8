"""Plain SVG dumps of shortest-path maps, overlays and solver results."""

from __future__ import annotations

import colorsys

from .geom import PolygonalDomain
from .spm import SOURCE, ShortestPathMap

WIDTH = 640
PAD = 16


class Canvas:
    """Maps domain coordinates to SVG pixels (y up) and collects layers."""

    def __init__(self, domain: PolygonalDomain, width: int = WIDTH):
        x0, y0, x1, y1 = domain.bbox
        span = max(x1 - x0, y1 - y0, 1e-12)
        self.s = (width - 2 * PAD) / span
        self.x0, self.y1 = x0, y1
        self.w = int(round((x1 - x0) * self.s)) + 2 * PAD
        self.h = int(round((y1 - y0) * self.s)) + 2 * PAD
        self.layers: list[tuple[str, list[str]]] = []
        self.domain = domain

    def xy(self, p) -> tuple[float, float]:
        return PAD + (p[0] - self.x0) * self.s, PAD + (self.y1 - p[1]) * self.s

    def pts(self, coords) -> str:
        return " ".join("{:.2f},{:.2f}".format(*self.xy(p)) for p in coords)

    def layer(self, name: str) -> list[str]:
        body: list[str] = []
        self.layers.append((name, body))
        return body

    def render(self) -> str:
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
               f'viewBox="0 0 {self.w} {self.h}">']
        for name, body in self.layers:
            out.append(f'<g id="{name}">')
            out.extend(body)
            out.append("</g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    # shapes
    def polygon(self, body, coords, **style):
        body.append(f'<polygon points="{self.pts(coords)}"{_style(style)}/>')

    def line(self, body, a, b, **style):
        (ax, ay), (bx, by) = self.xy(a), self.xy(b)
        body.append(f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}"{_style(style)}/>')

    def dot(self, body, p, r=3.0, **style):
        x, y = self.xy(p)
        body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}"{_style(style)}/>')

    def domain_layer(self):
        body = self.layer("domain")
        for ring in self.domain.rings:
            self.polygon(body, ring, fill="none", stroke="black", stroke_width=1.5)


def _style(style: dict) -> str:
    return "".join(f' {k.replace("_", "-")}="{v}"' for k, v in style.items())


def _colour(k: int) -> str:
    r, g, b = colorsys.hls_to_rgb((k * 0.61803398875) % 1.0, 0.78, 0.55)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _polys(geom):
    if geom.is_empty:
        return []
    return list(getattr(geom, "geoms", [geom]))


def spm_svg(m: ShortestPathMap) -> str:
    """Cells filled by root, crossable bisectors solid, watersheds dashed."""
    c = Canvas(m.domain)
    cells = c.layer("cells")
    for cell in m.cells:
        key = cell.root if cell.root != SOURCE else -1 - (cell.quadrant or 0)
        fill = "#ffffff" if cell.root == SOURCE else _colour(cell.root)
        for poly in _polys(cell.polygon):
            c.polygon(cells, poly.exterior.coords, fill=fill, stroke="#999999",
                      stroke_width=0.4, data_root=key)
    bis = c.layer("bisectors")
    ws = c.layer("watersheds")
    for b in m.bisectors:
        body, dash = (ws, "6,4") if b.kind == "watershed" else (bis, None)
        style = {"stroke": "#c0392b" if dash else "#34495e", "stroke_width": 1.6}
        if dash:
            style["stroke_dasharray"] = dash
        for a, e in b.segments:
            c.line(body, a, e, **style)
    c.domain_layer()
    marks = c.layer("source")
    c.dot(marks, m.source, r=4, fill="black")
    for v in m.domain.vertices:
        c.dot(marks, v, r=2, fill="#555555")
    return c.render()


def _candidates(c: Canvas, result):
    body = c.layer("candidates")
    for cand in result.candidates:
        c.dot(body, cand.point, r=1.8, fill="#2980b9")
    for t in result.ties:
        c.dot(body, t.point, r=4, fill="none", stroke="#e67e22", stroke_width=1.5)
    c.dot(body, result.optimum.point, r=4.5, fill="#e74c3c")


def overlay_svg(domain: PolygonalDomain, overlay, result=None) -> str:
    """Overlay faces and edges with candidate markers."""
    c = Canvas(domain)
    faces = c.layer("faces")
    for k, f in enumerate(overlay.faces):
        c.polygon(faces, f.exterior.coords, fill=_colour(k), fill_opacity=0.35, stroke="none")
    edges = c.layer("overlay")
    for a, b in overlay.edges:
        c.line(edges, a, b, stroke="#34495e", stroke_width=0.6)
    c.domain_layer()
    if result is not None:
        _candidates(c, result)
    return c.render()


def straight_svg(domain: PolygonalDomain, result) -> str:
    """L1 origin, the axis lines through vertices and the candidates."""
    c = Canvas(domain)
    x0, y0, x1, y1 = domain.bbox
    grid = c.layer("grid")
    for x in sorted({float(v) for v in domain.vertices[:, 0]}):
        c.line(grid, (x, y0), (x, y1), stroke="#bbbbbb", stroke_width=0.5)
    for y in sorted({float(v) for v in domain.vertices[:, 1]}):
        c.line(grid, (x0, y), (x1, y), stroke="#bbbbbb", stroke_width=0.5)
    c.domain_layer()
    origin = result.extra.get("l1_origin")
    if origin:
        o = c.layer("origin")
        p = (origin["x"], origin["y"])
        c.line(o, (p[0], y0), (p[0], y1), stroke="#8e44ad", stroke_dasharray="3,3")
        c.line(o, (x0, p[1]), (x1, p[1]), stroke="#8e44ad", stroke_dasharray="3,3")
        c.dot(o, p, r=4, fill="none" if not origin["feasible"] else "#8e44ad", stroke="#8e44ad")
    _candidates(c, result)
    return c.render()
