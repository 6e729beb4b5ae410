"""Deterministic SVG drawings of fronts.

Fronts are drawn in the (x, z) plane: the curve as one path, cusps as dots,
R1 loop windows as highlighted sub-paths, and for open curves the tangent
lines at the two ends as red arrows. Output depends only on the input
arrays, so identical inputs give identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .curves import SampledCurve
from .errors import IoFailure
from .fronts import Front
from .geiges import LegendrianCurve

SIZE = 480
MARGIN = 32
MAX_VERTICES = 1500


def _front_data(obj):
    """(params, xz points, cusp indices, loop windows, closed)."""
    from .rigidity import TorusDeformation

    if isinstance(obj, TorusDeformation):
        obj = obj.front
    if isinstance(obj, Front):
        return obj.params, obj.points, list(obj.cusp_indices()), list(obj.loop_windows), obj.closed
    if isinstance(obj, LegendrianCurve):
        s, P, closed = obj.params, obj.points[:, :2], obj.closed
    elif isinstance(obj, SampledCurve):
        s, P, closed = obj.params, obj.points[:, [0, 2]], obj.closed
    else:
        raise TypeError(f"cannot plot {type(obj).__name__}")
    dx = np.diff(P[:, 0])
    sign = np.sign(dx)
    nz = np.flatnonzero(sign)
    cusps = [int(nz[i + 1]) for i in range(len(nz) - 1) if sign[nz[i]] * sign[nz[i + 1]] < 0]
    return s, P, cusps, [], closed


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _polyline(Q: np.ndarray) -> str:
    return "M " + " L ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in Q)


def _thin(idx: np.ndarray) -> np.ndarray:
    if len(idx) <= MAX_VERTICES:
        return idx
    keep = np.linspace(0, len(idx) - 1, MAX_VERTICES).round().astype(int)
    return idx[keep]


def _end_direction(P: np.ndarray, span: float, step: int) -> np.ndarray:
    """Unit direction of travel at the start (step 1) or end (step -1),
    taken from the first sample noticeably away from the endpoint."""
    end = P[0] if step > 0 else P[-1]
    dist = np.hypot(*(P - end).T)
    order = range(1, len(P)) if step > 0 else range(len(P) - 2, -1, -1)
    for j in order:
        if dist[j] > 1e-3 * span:
            d = (P[j] - end) * step
            return d / np.hypot(*d)
    return np.array([1.0, 0.0])


def render_svg(obj, arrows: bool | None = None) -> str:
    s, P, cusps, windows, closed = _front_data(obj)
    P = np.asarray(P, dtype=float)
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    scale = (SIZE - 2 * MARGIN) / span
    mid = 0.5 * (lo + hi)

    def to_px(Q):
        Q = np.atleast_2d(Q)
        u = SIZE / 2 + (Q[:, 0] - mid[0]) * scale
        v = SIZE / 2 - (Q[:, 1] - mid[1]) * scale
        return np.column_stack([u, v])

    keep = _thin(np.arange(len(P)))
    keep = np.union1d(keep, np.asarray(cusps, dtype=int))
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<path class="front" d="{_polyline(to_px(P[keep]))}" fill="none" stroke="#1f4fbf" stroke-width="1.5"/>',
    ]
    for a, b in windows:
        idx = np.flatnonzero((s >= a) & (s <= b))
        if len(idx) > 1:
            lines.append(
                f'<path class="loop" d="{_polyline(to_px(P[_thin(idx)]))}" fill="none" '
                'stroke="#e08a00" stroke-width="2.5"/>'
            )
    for i in cusps:
        u, v = to_px(P[i])[0]
        lines.append(f'<circle class="cusp" cx="{_fmt(u)}" cy="{_fmt(v)}" r="3.5" fill="black"/>')
    if arrows is None:
        arrows = not closed
    if arrows and len(P) > 2:
        L = 0.12 * (SIZE - 2 * MARGIN)
        for k, d in ((0, _end_direction(P, span, 1)), (len(P) - 1, _end_direction(P, span, -1))):
            d = d * np.array([1.0, -1.0])
            u, v = to_px(P[k])[0]
            tip = np.array([u, v]) + L * d
            side = np.array([-d[1], d[0]])
            head = [tip, tip - 8 * d + 4 * side, tip - 8 * d - 4 * side]
            lines.append(
                f'<line class="tangent" x1="{_fmt(u)}" y1="{_fmt(v)}" x2="{_fmt(tip[0])}" y2="{_fmt(tip[1])}" '
                'stroke="red" stroke-width="1.5"/>'
            )
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in head)
            lines.append(f'<polygon class="arrowhead" points="{pts}" fill="red"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def plot_svg(obj, path, arrows: bool | None = None) -> Path:
    text = render_svg(obj, arrows)
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return Path(path)
