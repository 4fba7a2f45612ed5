"""Minimal deterministic SVG charts (no plotting libraries, stable bytes).

All output is produced by pure string formatting of the input data, so
identical data yields byte-identical documents.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 20, 20, 50
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1.0, 2.0, 5.0, 10.0) if s * mag >= raw)
    start = np.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


class _Frame:
    def __init__(self, x_range, y_range):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0

    def px(self, x):
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y):
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)


def _document(body: list[str]) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n'
            f'<rect width="{_W}" height="{_H}" fill="white"/>\n')
    return head + "\n".join(body) + "\n</svg>\n"


def _axes(frame: _Frame, x_label: str, y_label: str) -> list[str]:
    parts = [f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
             f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>']
    for tx in _ticks(frame.x0, frame.x1):
        px = frame.px(tx)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_H - _MB}" x2="{_fmt(px)}" '
                     f'y2="{_H - _MB + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_H - _MB + 18}" font-size="12" '
                     f'text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _ticks(frame.y0, frame.y1):
        py = frame.py(ty)
        parts.append(f'<line x1="{_ML - 5}" y1="{_fmt(py)}" x2="{_ML}" '
                     f'y2="{_fmt(py)}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{_fmt(py + 4)}" font-size="12" '
                     f'text-anchor="end">{_fmt(ty)}</text>')
    parts.append(f'<text x="{_fmt((_ML + _W - _MR) / 2)}" y="{_H - 12}" '
                 f'font-size="14" text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="16" y="{_fmt((_MT + _H - _MB) / 2)}" font-size="14" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{_fmt((_MT + _H - _MB) / 2)})">{y_label}</text>')
    return parts


def line_chart(series, x_label: str, y_label: str) -> str:
    """Polyline chart of (xs, ys[, label]) tuples; deterministic bytes."""
    if not series:
        raise DomainError("no data to plot")
    cleaned = []
    for item in series:
        xs, ys = np.asarray(item[0], float), np.asarray(item[1], float)
        if xs.size == 0 or xs.size != ys.size:
            raise DomainError("series need matching non-empty x and y")
        cleaned.append((xs, ys, item[2] if len(item) > 2 else None))
    x_lo = min(float(xs.min()) for xs, _, _ in cleaned)
    x_hi = max(float(xs.max()) for xs, _, _ in cleaned)
    y_lo = min(float(ys.min()) for _, ys, _ in cleaned)
    y_hi = max(float(ys.max()) for _, ys, _ in cleaned)
    pad = 0.05 * (y_hi - y_lo if y_hi > y_lo else abs(y_hi) + 1.0)
    frame = _Frame((x_lo, x_hi), (y_lo - pad, y_hi + pad))
    body = _axes(frame, x_label, y_label)
    for i, (xs, ys, label) in enumerate(cleaned):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{_fmt(frame.px(x))},{_fmt(frame.py(y))}"
                       for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    f'stroke-width="1.5"/>')
        if label:
            body.append(f'<text x="{_W - _MR - 8}" y="{_MT + 18 + 16 * i}" '
                        f'font-size="12" text-anchor="end" fill="{color}">{label}</text>')
    return _document(body)


def histogram_chart(bin_centers, counts, x_label: str, y_label: str) -> str:
    """Bar chart of a histogram; deterministic bytes."""
    centers = np.asarray(bin_centers, float)
    counts = np.asarray(counts, float)
    if centers.size == 0 or centers.size != counts.size:
        raise DomainError("histogram needs matching non-empty centers and counts")
    width = centers[1] - centers[0] if len(centers) > 1 else 1.0
    frame = _Frame((float(centers[0] - width / 2), float(centers[-1] + width / 2)),
                   (0.0, float(counts.max()) * 1.05 if counts.max() > 0 else 1.0))
    body = _axes(frame, x_label, y_label)
    for c, v in zip(centers, counts):
        x_left = frame.px(c - width / 2)
        x_right = frame.px(c + width / 2)
        y_top = frame.py(v)
        body.append(f'<rect x="{_fmt(x_left)}" y="{_fmt(y_top)}" '
                    f'width="{_fmt(x_right - x_left)}" '
                    f'height="{_fmt(frame.py(0.0) - y_top)}" '
                    f'fill="#1f77b4" stroke="none"/>')
    return _document(body)


def trajectory_chart(paths, lens_axis_coord: float | None, x_label: str,
                     y_label: str) -> str:
    """Side view of two-sided pair trajectories with an optional lens line.

    ``paths`` is a list of (z1, y1, z2, y2) arrays: axial and transverse
    coordinates of both particles.
    """
    if not paths:
        raise DomainError("no trajectories to plot")
    series = []
    for z1, y1, z2, y2 in paths:
        series.append((np.asarray(z1, float), np.asarray(y1, float)))
        series.append((np.asarray(z2, float), np.asarray(y2, float)))
    x_lo = min(float(s[0].min()) for s in series)
    x_hi = max(float(s[0].max()) for s in series)
    y_lo = min(float(s[1].min()) for s in series)
    y_hi = max(float(s[1].max()) for s in series)
    pad = 0.05 * (y_hi - y_lo if y_hi > y_lo else 1.0)
    frame = _Frame((x_lo, x_hi), (y_lo - pad, y_hi + pad))
    body = _axes(frame, x_label, y_label)
    if lens_axis_coord is not None:
        px = frame.px(lens_axis_coord)
        body.append(f'<line x1="{_fmt(px)}" y1="{_MT}" x2="{_fmt(px)}" '
                    f'y2="{_H - _MB}" stroke="#666666" stroke-width="2" '
                    f'stroke-dasharray="6,4"/>')
    for i, (xs, ys) in enumerate(series):
        color = _COLORS[(i // 2) % len(_COLORS)]
        dash = "" if i % 2 == 0 else ' stroke-dasharray="3,3"'
        pts = " ".join(f"{_fmt(frame.px(x))},{_fmt(frame.py(y))}"
                       for x, y in zip(xs, ys))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    f'stroke-width="1.2"{dash}/>')
    return _document(body)
