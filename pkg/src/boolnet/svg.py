"""Minimal self-contained SVG rendering for rasters and line charts.

Output depends only on the numbers passed in, so re-rendering from a CSV
reproduces the same bytes.
"""

import csv
import math

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _num(x):
    return f"{x:.2f}".rstrip("0").rstrip(".")


def raster(matrix, cell=12, title=""):
    """Neuron-by-time heat grid: +1 black, -1 white."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    top = 20 if title else 0
    w, h = cols * cell + 2, rows * cell + top + 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}">',
           f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>']
    if title:
        out.append(f'<text x="2" y="14" font-family="monospace" font-size="12">{title}</text>')
    for i, row in enumerate(matrix):
        for t, v in enumerate(row):
            if v > 0:
                out.append(f'<rect x="{1 + t * cell}" y="{top + 1 + i * cell}" '
                           f'width="{cell}" height="{cell}" fill="black"/>')
    out.append(f'<rect x="1" y="{top + 1}" width="{cols * cell}" height="{rows * cell}" '
               f'fill="none" stroke="gray"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_chart(series, width=640, height=320, title="", markers=None, log_y=False):
    """Polylines for ``{label: (xs, ys)}``; ``markers`` is an optional list of (x, y)."""
    pad = 40
    pts = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys)]
    if markers:
        pts += list(markers)
    if log_y:
        tr = lambda y: math.log10(max(y, 1e-6))  # noqa: E731
    else:
        tr = lambda y: y  # noqa: E731
    xs_all = [p[0] for p in pts] or [0, 1]
    ys_all = [tr(p[1]) for p in pts] or [0, 1]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (tr(y) - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{pad}" y="{height - pad + 14}" font-family="monospace" font-size="10">{_num(x0)}</text>',
           f'<text x="{width - pad}" y="{height - pad + 14}" font-family="monospace" '
           f'font-size="10" text-anchor="end">{_num(x1)}</text>',
           f'<text x="{pad - 4}" y="{height - pad}" font-family="monospace" font-size="10" '
           f'text-anchor="end">{_num(10 ** y0 if log_y else y0)}</text>',
           f'<text x="{pad - 4}" y="{pad + 4}" font-family="monospace" font-size="10" '
           f'text-anchor="end">{_num(10 ** y1 if log_y else y1)}</text>']
    if title:
        out.append(f'<text x="{pad}" y="16" font-family="monospace" font-size="12">{title}</text>')
    for k, (label, (xs, ys)) in enumerate(series.items()):
        color = _PALETTE[k % len(_PALETTE)]
        path = " ".join(f"{_num(sx(x))},{_num(sy(y))}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" points="{path}"/>')
        out.append(f'<text x="{width - pad}" y="{pad + 12 * k}" font-family="monospace" '
                   f'font-size="10" text-anchor="end" fill="{color}">{label}</text>')
    for x, y in markers or ():
        out.append(f'<circle cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="3" fill="none" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def choice_chart(modes, width=640, height=120):
    """One dot per trial: B' red stars row, D' green dots row, ties grey."""
    pad = 30
    n = max(len(modes), 1)
    step = (width - 2 * pad) / n
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<text x="4" y="{pad + 4}" font-family="monospace" font-size="10">B\'</text>',
           f'<text x="4" y="{height - pad + 4}" font-family="monospace" font-size="10">D\'</text>']
    for k, m in enumerate(modes):
        x = _num(pad + (k + 0.5) * step)
        if m == "B'":
            out.append(f'<text x="{x}" y="{pad + 4}" font-size="10" fill="red" '
                       f'text-anchor="middle">*</text>')
        elif m == "D'":
            out.append(f'<circle cx="{x}" cy="{height - pad}" r="2.5" fill="green"/>')
        else:
            out.append(f'<circle cx="{x}" cy="{height / 2}" r="2" fill="gray"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def raster_from_csv(path, title=""):
    rows = _read(path)[1:]
    return raster([[int(v) for v in r[1:]] for r in rows], title=title)


def trace_from_csv(path, title=""):
    """E against epoch, with E = 0 epochs circled."""
    rows = _read(path)[1:]
    xs = [int(r[0]) for r in rows]
    ys = [float(r[1]) for r in rows]
    zeros = [(x, y) for x, y in zip(xs, ys) if y == 0.0]
    return line_chart({"E": (xs, ys)}, title=title, markers=zeros)


def curves_from_csv(path, x_col, y_cols, title="", log_y=False):
    rows = _read(path)
    header, body = rows[0], rows[1:]
    xi = header.index(x_col)
    series = {}
    for col in y_cols:
        yi = header.index(col)
        series[col] = ([float(r[xi]) for r in body], [float(r[yi]) for r in body])
    return line_chart(series, title=title, log_y=log_y)


def modes_from_csv(path):
    rows = _read(path)
    header, body = rows[0], rows[1:]
    mi = header.index("mode_choice")
    return choice_chart([r[mi] for r in body])
