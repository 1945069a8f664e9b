"""SVG output for the diagnostics, written with ``xml.etree``.

Every panel is an ``<g class="panel">`` carrying its data-to-pixel map as
attributes (``data-sx``, ``data-x0``, ``data-sy``, ``data-y0``), so pixel
``px = x0 + sx * x`` and ``py = y0 + sy * y``. Animations are directories of
``frame_000001.svg``, ``frame_000002.svg``, ...
"""

import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .trace import get_interrupt, get_theo

WIDTH, HEIGHT = 800, 600
MARGIN = 0.05
PALETTE = ("#1b9e77", "#a6611a", "#7570b3", "#e7298a")
GREY = "#9e9e9e"
DARK_GREY = "#616161"


def _num(v):
    return format(float(v), ".3f")


class Panel:
    """A rectangular plotting area with an affine data-to-pixel map."""

    def __init__(self, parent, xlim, ylim, box, equal=False, name=None):
        x, y, w, h = box
        (x0, x1), (y0, y1) = xlim, ylim
        if x1 == x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        if y1 == y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        sx = w / (x1 - x0)
        sy = h / (y1 - y0)
        if equal:
            sx = sy = min(sx, sy)
        self.sx, self.sy = float(sx), float(-sy)
        # centre the data box inside the pixel box
        self.ox = float(x + (w - sx * (x1 - x0)) / 2 - sx * x0)
        self.oy = float(y + h - (h - sy * (y1 - y0)) / 2 + sy * y0)
        self.g = ET.SubElement(parent, "g", {
            "class": "panel",
            "data-sx": repr(self.sx), "data-x0": repr(self.ox),
            "data-sy": repr(self.sy), "data-y0": repr(self.oy),
            "data-xmin": repr(float(xlim[0])), "data-xmax": repr(float(xlim[1])),
        })
        if name:
            self.g.set("data-name", name)

    def px(self, x, y):
        return self.ox + self.sx * x, self.oy + self.sy * y

    def group(self, cls, parent=None, **attrs):
        attrs = {k.replace("_", "-"): str(v) for k, v in attrs.items()}
        return ET.SubElement(self.g if parent is None else parent, "g", {"class": cls, **attrs})

    def circle(self, parent, x, y, r, fill, opacity=1.0, cls=None, **attrs):
        cx, cy = self.px(x, y)
        el = ET.SubElement(parent, "circle", {
            "cx": _num(cx), "cy": _num(cy), "r": _num(r), "fill": fill,
            "fill-opacity": _num(opacity),
        })
        if cls:
            el.set("class", cls)
        for k, v in attrs.items():
            el.set(k.replace("_", "-"), str(v))
        return el

    def line(self, parent, a, b, stroke, width=1.0, opacity=1.0, dash=None, cls=None):
        (x1, y1), (x2, y2) = self.px(*a), self.px(*b)
        el = ET.SubElement(parent, "line", {
            "x1": _num(x1), "y1": _num(y1), "x2": _num(x2), "y2": _num(y2),
            "stroke": stroke, "stroke-width": _num(width), "stroke-opacity": _num(opacity),
        })
        if dash:
            el.set("stroke-dasharray", dash)
        if cls:
            el.set("class", cls)
        return el

    def polyline(self, parent, pts, stroke, width=1.0, cls=None):
        coords = " ".join(f"{_num(a)},{_num(b)}" for a, b in (self.px(x, y) for x, y in pts))
        el = ET.SubElement(parent, "polyline", {
            "points": coords, "fill": "none", "stroke": stroke, "stroke-width": _num(width),
        })
        if cls:
            el.set("class", cls)
        return el

    def text(self, parent, x, y, s, size=11, anchor="middle", fill="black", cls=None):
        px, py = self.px(x, y)
        el = ET.SubElement(parent, "text", {
            "x": _num(px), "y": _num(py), "font-size": str(size),
            "text-anchor": anchor, "fill": fill, "font-family": "sans-serif",
        })
        el.text = s
        if cls:
            el.set("class", cls)
        return el

    def star(self, parent, x, y, r, fill, cls="theoretical"):
        cx, cy = self.px(x, y)
        pts = []
        for k in range(10):
            rad = r if k % 2 == 0 else r * 0.45
            ang = -math.pi / 2 + k * math.pi / 5
            pts.append(f"{_num(cx + rad * math.cos(ang))},{_num(cy + rad * math.sin(ang))}")
        return ET.SubElement(parent, "polygon", {"points": " ".join(pts), "fill": fill,
                                                 "class": cls})

    def square(self, parent, x, y, size, fill, cls=None):
        cx, cy = self.px(x, y)
        el = ET.SubElement(parent, "rect", {
            "x": _num(cx - size / 2), "y": _num(cy - size / 2),
            "width": _num(size), "height": _num(size), "fill": fill,
        })
        if cls:
            el.set("class", cls)
        return el


def _svg_root(title=None):
    root = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg", "version": "1.1",
        "width": str(WIDTH), "height": str(HEIGHT), "viewBox": f"0 0 {WIDTH} {HEIGHT}",
    })
    ET.SubElement(root, "rect", {"width": str(WIDTH), "height": str(HEIGHT), "fill": "white"})
    if title:
        t = ET.SubElement(root, "title")
        t.text = title
    return root


def _write(root, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.indent(root)
    data = ET.tostring(root, encoding="unicode")
    path.write_text('<?xml version="1.0" encoding="UTF-8"?>\n' + data + "\n")
    return path


def _panel_boxes(k):
    mx, my = WIDTH * MARGIN, HEIGHT * MARGIN
    w = (WIDTH - 2 * mx) / k
    return [(mx + i * w + (8 if i else 0), my, w - (8 if i else 0), HEIGHT - 2 * my)
            for i in range(k)]


def _pad(lo, hi, frac=0.05):
    span = hi - lo if hi > lo else 1.0
    return lo - frac * span, hi + frac * span


# -- search summary ----------------------------------------------------------


def render_search(summary, path, color=PALETTE[0]):
    """Boxplot (or points) of index values per iteration, anchors joined by a line."""
    root = _svg_root(f"search summary: {summary.method}")
    rows = summary.rows
    values = [v for r in rows for v in r.values] or [0.0]
    lo, hi = _pad(min(values), max(values), 0.12)
    J = len(rows)
    panel = Panel(root, (0.4, J + 0.6), (lo, hi), _panel_boxes(1)[0])
    text_y = lo + 0.03 * (hi - lo)
    for k, r in enumerate(rows, start=1):
        col = GREY if r.last_iteration else color
        g = panel.group("iteration", data_j=r.j, data_tries=r.tries)
        if r.point_display:
            jit = np.random.default_rng(r.j).uniform(-0.15, 0.15, r.tries)
            for dx, v in zip(jit, r.values):
                panel.circle(g, k + dx, v, 2.5, col, 0.6, cls="try")
        else:
            vals = np.array(r.values)
            iqr = r.q3 - r.q1
            lo_w = vals[vals >= r.q1 - 1.5 * iqr].min()
            hi_w = vals[vals <= r.q3 + 1.5 * iqr].max()
            (x0, y0), (x1, y1) = panel.px(k - 0.25, r.q3), panel.px(k + 0.25, r.q1)
            ET.SubElement(g, "rect", {"class": "box", "x": _num(x0), "y": _num(y0),
                                      "width": _num(x1 - x0), "height": _num(y1 - y0),
                                      "fill": "none", "stroke": col})
            panel.line(g, (k - 0.25, r.median), (k + 0.25, r.median), col, 2, cls="median")
            panel.line(g, (k, r.q3), (k, hi_w), col, cls="whisker")
            panel.line(g, (k, r.q1), (k, lo_w), col, cls="whisker")
            for v in vals[(vals < lo_w) | (vals > hi_w)]:
                panel.circle(g, k, v, 2, col, 0.6, cls="outlier")
        panel.text(g, k, text_y, str(r.tries), size=10, fill=DARK_GREY, cls="count")
    # the last iteration joins the line with its best try, drawn grey
    shown = [(k, r) for k, r in enumerate(rows, start=1) if r.accepted_flag or r.last_iteration]
    ga = panel.group("anchors")
    if shown:
        panel.polyline(ga, [(k, r.accepted_index) for k, r in shown], color, 1.5,
                       cls="anchor-line")
        for k, r in shown:
            panel.circle(ga, k, r.accepted_index, 5, GREY if r.last_iteration else color,
                         cls="anchor")
    return _write(root, path)


# -- index trace over time ---------------------------------------------------


def render_trace(series, path, labels=None):
    """Index value against time: lines for interpolation, dots for new targets.

    ``series`` is one list of trace points or a list of them (one panel each).
    """
    if series and not isinstance(series[0], (list, tuple)):
        series = [series]
    labels = labels or [None] * len(series)
    root = _svg_root("index trace")
    vals = [p.index_value for s in series for p in s] or [0.0]
    lo, hi = _pad(min(vals), max(vals))
    for k, (s, box) in enumerate(zip(series, _panel_boxes(len(series)))):
        tmax = max((p.t for p in s), default=1)
        panel = Panel(root, (1, max(tmax, 2)), (lo, hi), box, name=labels[k])
        col = PALETTE[k % len(PALETTE)]
        g = panel.group("series", data_index=k)
        interp = [p for p in s if p.state == "interpolation"]
        # break the line between legs so each leg is its own polyline
        legs = {}
        for p in interp:
            legs.setdefault(p.j, []).append((p.t, p.index_value))
        for j in sorted(legs):
            panel.polyline(g, legs[j], col, 1.5, cls="interp")
        for p in s:
            if p.state == "new_basis":
                panel.circle(g, p.t, p.index_value, 3.5, col, cls="target")
        if labels[k]:
            panel.text(g, (1 + tmax) / 2, hi, labels[k], size=12)
    return _write(root, path)


# -- PCA embedding of the basis space ----------------------------------------


def _embedding_panel(root, emb):
    c, r = emb.center, emb.radius * 1.02
    return Panel(root, (c[0] - r, c[0] + r), (c[1] - r, c[1] + r), _panel_boxes(1)[0], equal=True)


def _draw_embedding(root, emb, details, t_limit=None, theoretical=None, show_background=True):
    panel = _embedding_panel(root, emb)
    space = panel.group("space")
    rx = abs(panel.sx) * emb.radius
    cx, cy = panel.px(*emb.center)
    ET.SubElement(space, "circle", {"class": "outline", "cx": _num(cx), "cy": _num(cy),
                                    "r": _num(rx), "fill": "none", "stroke": GREY})
    panel.circle(space, *emb.center, 2, GREY, cls="center")
    if show_background:
        bg = panel.group("background")
        for x, y in emb.background:
            panel.circle(bg, x, y, 1.2, GREY, 0.4, cls="bg")

    for k, log in enumerate(emb.logs):
        col = PALETTE[k % len(PALETTE)]
        method = log.metadata.get("method", log.records[0].method if log.records else "")
        g = panel.group("log", data_log=k, data_method=method,
                        data_flipped=int(emb.flipped[k]) if emb.flipped else 0)
        coords = emb.log_coords(k)
        recs = log.records
        visible = [i for i, rec in enumerate(recs) if t_limit is None or rec.t <= t_limit]
        if not visible:
            continue
        tmax = max(rec.t for rec in recs)
        path_idx = [i for i in visible if recs[i].state in ("start", "interpolation", "final")]
        gp = panel.group("interp-path", parent=g)
        for a, b in zip(path_idx, path_idx[1:]):
            op = 0.15 + 0.85 * recs[b].t / tmax
            panel.line(gp, coords[a], coords[b], col, 1.5, op, cls="interp")
        if details:
            gd = panel.group("details", parent=g)
            for i in visible:
                st = recs[i].state
                if st in ("random_search", "direction_search", "best_direction_search",
                          "best_line_search", "polish_search"):
                    panel.circle(gd, *coords[i], 1.5, col, 0.35, cls="search")
                elif st == "new_basis":
                    panel.circle(gd, *coords[i], 2.5, col, 0.7, cls="anchor")
        pos = {rec.t: i for i, rec in enumerate(recs)}
        gi = panel.group("interrupts", parent=g)
        for last, target in get_interrupt(log):
            if t_limit is None or target.t <= t_limit:
                panel.line(gi, coords[pos[last.t]], coords[pos[target.t]], col, 1.0,
                           dash="4,3", cls="interrupt")
        panel.square(g, *coords[visible[0]], 8, col, cls="start")
        last_vis = visible[-1]
        if recs[last_vis].state == "final":
            panel.circle(g, *coords[last_vis], 5.5, col, cls="end")
    theo = theoretical
    if theo is None:
        for log in emb.logs:
            if get_theo(log) is not None:
                theo = get_theo(log).basis
                break
    if theo is not None:
        gt = panel.group("theoretical-best")
        panel.star(gt, *emb.project_basis(theo), 9, "#d7191c")
    return panel


def render_embedding(emb, path, details=False, animate=False, n_checkpoints=6, theoretical=None):
    """PCA view of the basis space; with ``animate`` a directory of frames."""
    if not animate:
        root = _svg_root("basis space (PCA)")
        _draw_embedding(root, emb, details, theoretical=theoretical)
        return _write(root, path)
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    tmax = max(rec.t for log in emb.logs for rec in log.records)
    written = []
    for k in range(1, n_checkpoints + 1):
        limit = math.ceil(tmax * k / n_checkpoints)
        root = _svg_root(f"basis space (PCA), t <= {limit}")
        root.set("data-t-limit", str(limit))
        _draw_embedding(root, emb, details, t_limit=limit, theoretical=theoretical)
        written.append(_write(root, out / f"frame_{k:06d}.svg"))
    return written


# -- tour of the full basis space --------------------------------------------


def render_space_tour(frames, path, labels=None, methods=None):
    """One SVG per tour frame. ``labels[i]`` is -1 for background points, else a path number."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if not frames:
        return []
    n_pts = frames[0].coords.shape[0]
    labels = np.full(n_pts, -1) if labels is None else np.asarray(labels)
    lim = max(float(np.max(np.abs(f.coords))) for f in frames) * 1.05 or 1.0
    written = []
    for k, fr in enumerate(frames, start=1):
        root = _svg_root(f"basis space tour, frame {k}")
        panel = Panel(root, (-lim, lim), (-lim, lim), _panel_boxes(1)[0], equal=True)
        bg = panel.group("background")
        for (x, y), lab in zip(fr.coords, labels):
            if lab < 0:
                panel.circle(bg, x, y, 1.2, GREY, 0.45, cls="bg")
        for lab in sorted(set(labels[labels >= 0].tolist())):
            col = PALETTE[lab % len(PALETTE)]
            name = methods[lab] if methods else str(lab)
            g = panel.group("path", data_path=lab, data_method=name)
            pts = fr.coords[labels == lab]
            panel.polyline(g, pts, col, 1.2, cls="path-line")
            panel.circle(g, *pts[-1], 5, col, cls="end")
        written.append(_write(root, out / f"frame_{k:06d}.svg"))
    return written
