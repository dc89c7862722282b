"""Deterministic SVG rendering of payoff-region rasters and traced arcs."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .curve22 import ArcReport, landmarks
from .game import Game
from .konstanz import payoff_vars
from .region import INSIDE, UNCERTAIN, RegionRaster, boundary_candidates, payoff_polytope

SIZE = 600
PAD = 30


class _Canvas:
    def __init__(self, xlim, ylim, title=""):
        self.x0, self.x1 = (float(v) for v in xlim)
        self.y0, self.y1 = (float(v) for v in ylim)
        if self.x1 == self.x0:
            self.x0, self.x1 = self.x0 - 1, self.x1 + 1
        if self.y1 == self.y0:
            self.y0, self.y1 = self.y0 - 1, self.y1 + 1
        self.parts = []
        self.title = title

    def px(self, x, y):
        u = PAD + (float(x) - self.x0) / (self.x1 - self.x0) * (SIZE - 2 * PAD)
        v = SIZE - PAD - (float(y) - self.y0) / (self.y1 - self.y0) * (SIZE - 2 * PAD)
        return u, v

    def polygon(self, pts, **style):
        s = " ".join("%.3f,%.3f" % self.px(*p) for p in pts)
        self.parts.append(f'<polygon points="{s}"{_style(style)}/>')

    def polyline(self, pts, **style):
        s = " ".join("%.3f,%.3f" % self.px(*p) for p in pts)
        self.parts.append(f'<polyline points="{s}" fill="none"{_style(style)}/>')

    def line(self, p, q, **style):
        (a, b), (c, d) = self.px(*p), self.px(*q)
        self.parts.append(f'<line x1="{a:.3f}" y1="{b:.3f}" x2="{c:.3f}" y2="{d:.3f}"{_style(style)}/>')

    def rect(self, p, q, **style):
        (a, b), (c, d) = self.px(*p), self.px(*q)
        x, y = min(a, c), min(b, d)
        self.parts.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{abs(c - a):.3f}" height="{abs(d - b):.3f}"'
                          f'{_style(style)}/>')

    def dot(self, p, r=3, label=None, **style):
        u, v = self.px(*p)
        self.parts.append(f'<circle cx="{u:.3f}" cy="{v:.3f}" r="{r}"{_style(style)}/>')
        if label:
            self.parts.append(f'<text x="{u + 4:.3f}" y="{v - 4:.3f}" font-size="11">{label}</text>')

    def group(self, name):
        self.parts.append(f'<g id="{name}">')

    def end(self):
        self.parts.append("</g>")

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">')
        title = f"<title>{self.title}</title>" if self.title else ""
        return "\n".join([head, title, '<rect width="100%" height="100%" fill="white"/>'] + self.parts + ["</svg>"]) + "\n"


def _style(style) -> str:
    return "".join(f' {k.replace("_", "-")}="{v}"' for k, v in sorted(style.items()))


def contour_segments(F: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> list:
    """Marching-squares segments of ``F = 0``; ``F[i, j]`` sits at ``(xs[i], ys[j])``."""
    S = F >= 0
    segs = []
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            c = (S[i, j], S[i + 1, j], S[i + 1, j + 1], S[i, j + 1])
            if all(c) or not any(c):
                continue
            pts = []
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            for k in range(4):
                (a, b), (p, q) = corners[k], corners[(k + 1) % 4]
                if S[a, b] != S[p, q]:
                    va, vb = F[a, b], F[p, q]
                    t = va / (va - vb) if va != vb else 0.5
                    pts.append((xs[a] + t * (xs[p] - xs[a]), ys[b] + t * (ys[q] - ys[b])))
            for k in range(0, len(pts) - 1, 2):
                segs.append((pts[k], pts[k + 1]))
    return segs


def _hull_points(g: Game):
    hull = payoff_polytope(g)
    return [(float(p[0]), float(p[1])) for p in hull]


def region_svg(raster: RegionRaster, curves: bool = True, pareto_points=(), slice_index=None) -> str:
    """Hull, inside and boundary-uncertain cells, boundary candidate curves and
    Pareto-flagged samples.  Three-player rasters are drawn as one x1-x2
    slice (the middle one unless ``slice_index`` is given)."""
    g = raster.game
    status = raster.status
    title = "payoff region"
    if raster.n == 3:
        k = raster.resolution // 2 if slice_index is None else slice_index
        status = status[:, :, k]
        title += f" (slice x3 index {k})"
    (xlo, xhi), (ylo, yhi) = raster.bbox[0], raster.bbox[1]
    cv = _Canvas((xlo, xhi), (ylo, yhi), title)
    res = raster.resolution
    hx, hy = (xhi - xlo) / res, (yhi - ylo) / res
    cv.group("hull")
    if g.n == 2:
        hull = _hull_points(g)
        if len(hull) >= 3:
            cv.polygon(hull, fill="#fff3b0", stroke="#b08d00", stroke_width=1)
        elif len(hull) == 2:
            cv.line(hull[0], hull[1], stroke="#b08d00", stroke_width=1)
        else:
            cv.dot(hull[0], fill="#b08d00")
    else:
        cv.rect((xlo, ylo), (xhi, yhi), fill="none", stroke="#b08d00")
    cv.end()
    for name, code, colour in (("inside", INSIDE, "#2b6cb0"), ("uncertain", UNCERTAIN, "#e53e3e")):
        cv.group(name)
        for i in range(res):
            j = 0
            col = status[i]
            while j < res:
                if col[j] == code:
                    j0 = j
                    while j < res and col[j] == code:
                        j += 1
                    cv.rect((xlo + i * hx, ylo + j0 * hy), (xlo + (i + 1) * hx, ylo + j * hy),
                            fill=colour, stroke="none")
                else:
                    j += 1
        cv.end()
    if curves and g.n == 2:
        cv.group("boundary-candidates")
        m = 160
        xs = np.linspace(float(xlo), float(xhi), m + 1)
        ys = np.linspace(float(ylo), float(yhi), m + 1)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        names = payoff_vars(2)
        for bc in boundary_candidates(g):
            F = np.asarray(bc.poly.eval_float({names[0]: X, names[1]: Y}), dtype=float) * np.ones_like(X)
            for p, q in contour_segments(F, xs, ys):
                cv.line(p, q, stroke="#444444", stroke_width=0.6)
        cv.end()
    if len(pareto_points):
        cv.group("pareto")
        for p in pareto_points:
            cv.dot(p[:2], r=3, fill="#38a169")
        cv.end()
    return cv.render()


def arcs_svg(g: Game, report: ArcReport) -> str:
    """Payoff polygon, the curve ``det K = 0``, the traced arcs and landmarks."""
    x0, x1, y0, y1 = report.bbox
    cv = _Canvas((x0, x1), (y0, y1), "dependency equilibria of a 2x2 game")
    cv.group("hull")
    hull = _hull_points(g)
    if len(hull) >= 3:
        cv.polygon(hull, fill="#fff3b0", stroke="#b08d00", stroke_width=1)
    cv.end()
    cv.group("curve")
    for p, q in report.curve_segments:
        cv.line(p, q, stroke="#999999", stroke_width=0.5)
    cv.end()
    cv.group("arcs")
    for arc in report.arcs:
        cv.polyline([tuple(p) for p in arc.polyline], stroke="#2b6cb0", stroke_width=2.5)
    cv.end()
    cv.group("landmarks")
    a, b = g.payoffs
    for k, lab in enumerate(("11", "12", "21", "22")):
        cv.dot((a[k], b[k]), r=3, label="E" + lab, fill="black")
    try:
        L = landmarks(g)
    except ValueError:
        L = None
    if L is not None:
        for name, p in L.all_points().items():
            if name.startswith("D"):
                continue
            s = sum(p)
            if s == 0:
                continue
            x = sum(Fraction(ai) * pi for ai, pi in zip(a, p)) / s
            y = sum(Fraction(bi) * pi for bi, pi in zip(b, p)) / s
            if x0 <= x <= x1 and y0 <= y <= y1:
                cv.dot((x, y), r=3, label=name, fill="#dd6b20" if name == "N" else "#805ad5")
    cv.end()
    return cv.render()


def emit_svg(obj, path, game: Game | None = None, **kw):
    """Write ``region_svg`` or ``arcs_svg`` output to ``path``."""
    if isinstance(obj, RegionRaster):
        text = region_svg(obj, **kw)
    elif isinstance(obj, ArcReport):
        if game is None:
            raise ValueError("an ArcReport needs its game to be drawn")
        text = arcs_svg(game, obj)
    else:
        raise TypeError(f"cannot draw {type(obj).__name__}")
    with open(path, "w") as fh:
        fh.write(text)
    return path
