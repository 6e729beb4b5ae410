"""Connecting closed horizontal loops in the Darboux model.

The (x, t) projections of the two loops are joined by a regular homotopy
(edge angles interpolated linearly, edge lengths log-linearly, closure
restored by removing a length-weighted mean edge). Each slice is then corrected by two
t-bumps with a footprint fixed for the whole family so that both loop
integrals of ``t dx`` and ``z dx`` vanish, and lifted with ``z = int t dx``,
``y = int z dx``. Since the bumps sit where every slice has large ``|x'|``,
the (x, t) curves stay immersed and the rotation number is constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curves import (
    EVERYWHERE_TANGENT,
    SampledCurve,
    horizontality_residual,
    rotation_number,
    tangency_locus,
)
from .errors import (
    EverywhereTangentMember,
    NotHorizontalInput,
    NotImmersed,
    NumericallyDegenerate,
    RotationMismatch,
    SlopeBandExceeded,
    WindingMismatch,
)
from .loops import _areas, bump, window_candidates
from .models import darboux
from .quadrature import leapfrog, loop_integral

HORIZONTAL_TOL = 1e-6
CLOSURE_TOL = 1e-9
ENDPOINT_TOL = 1e-8


# ---------------------------------------------------------------------------
# regular homotopy of plane loops


@dataclass
class PlaneFamily:
    times: np.ndarray
    curves: list[np.ndarray]  # each (n, 2), closed (last == first)
    min_speed: float


def _edges(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    e = np.diff(P, axis=0)
    L = np.hypot(e[:, 0], e[:, 1])
    if np.any(L == 0):
        raise NotImmersed("repeated consecutive samples")
    ang = np.unwrap(np.arctan2(e[:, 1], e[:, 0]))
    return ang, L


def plane_winding(P: np.ndarray) -> int:
    """Turning number of a closed polygon (last sample == first)."""
    ang, _ = _edges(P)
    wrap = (ang[0] - ang[-1] + np.pi) % (2 * np.pi) - np.pi
    return int(round((ang[-1] - ang[0] + wrap) / (2 * np.pi)))


def wg_homotopy(l0: np.ndarray, l1: np.ndarray, times) -> PlaneFamily:
    """Regular homotopy between closed plane polygons with equal turning.

    Both inputs are ``(n, 2)`` arrays with matching sample count and the last
    sample equal to the first.
    """
    l0 = np.asarray(l0, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    if l0.shape != l1.shape:
        raise ValueError("loops must have the same number of samples")
    w0, w1 = plane_winding(l0), plane_winding(l1)
    if w0 != w1:
        raise WindingMismatch(f"windings differ: {w0} vs {w1}")
    a0, L0 = _edges(l0)
    a1, L1 = _edges(l1)
    a1 = a1 - 2 * np.pi * np.round((a1[0] - a0[0]) / (2 * np.pi))
    times = np.asarray(times, dtype=float)
    curves = []
    min_speed = np.inf
    for tau in times:
        ang = (1 - tau) * a0 + tau * a1
        L = np.exp((1 - tau) * np.log(L0) + tau * np.log(L1))
        e = np.column_stack([L * np.cos(ang), L * np.sin(ang)])
        # length-weighted mean: each edge becomes L_k (u_k - c) with |c| < 1,
        # so no edge can reverse and the turning number is kept
        c = e.sum(axis=0) / L.sum()
        if np.hypot(*c) >= 1:
            raise NotImmersed("interpolated edges are all parallel")
        e -= L[:, None] * c
        start = (1 - tau) * l0[0] + tau * l1[0]
        P = np.vstack([start, start + np.cumsum(e, axis=0)])
        P[-1] = P[0]
        speed = np.hypot(e[:, 0], e[:, 1]) / np.maximum(L, 1e-300)
        min_speed = min(min_speed, float(speed.min()))
        curves.append(P)
    if not min_speed > 0:
        raise NotImmersed("closure correction produced a stationary edge")
    return PlaneFamily(times, curves, min_speed)


# ---------------------------------------------------------------------------
# connecting horizontal loops


@dataclass
class FamilyReport:
    passed: bool
    first_bad: Optional[int]
    residuals: list[float]
    closure_defects: list[float]
    rotations: list[int]
    classes: list[str]
    reason: str = ""


@dataclass
class HomotopyFamily:
    time_grid: np.ndarray
    slices: list[SampledCurve]
    report: Optional[FamilyReport] = None
    amplitudes: Optional[np.ndarray] = None  # (slices, 2)
    windows: list[tuple[float, float]] = field(default_factory=list)
    pre_lift_areas: Optional[np.ndarray] = None  # (slices, 2): loop t dx, z dx


def _check_input(c: SampledCurve, m, name: str) -> int:
    if not c.closed:
        raise NotHorizontalInput(f"{name} is not closed")
    res = horizontality_residual(c, m)
    if res >= HORIZONTAL_TOL:
        raise NotHorizontalInput(f"{name} horizontality residual {res:.3g}")
    if tangency_locus(c, m).cls == EVERYWHERE_TANGENT:
        raise EverywhereTangentMember(f"{name} is everywhere tangent to the kernel")
    return rotation_number(c, m)


def _common_windows(s, xs, frac_levels=(0.7, 0.4, 0.2), widths=(0.06, 0.04, 0.025)):
    """Two bump windows where every slice has |x'| comparable to its median
    speed, chosen to keep
    the worst per-slice closing solve best conditioned."""
    probe = xs[:: max(1, len(xs) // 8)] + [xs[-1]]
    for frac in frac_levels:
        for width in widths:
            cand = None
            for x in xs:
                c = set(window_candidates(s, x, width, frac, count=10**9, ref="median"))
                cand = c if cand is None else cand & c
                if not cand:
                    break
            if not cand or len(cand) < 2:
                continue
            cand = sorted(cand)
            if len(cand) > 24:
                cand = [cand[int(j)] for j in np.linspace(0, len(cand) - 1, 24)]
            worst = None
            for x in probe:
                cols = np.array([_areas(x, bump(s, s[i], width)) for i in cand])
                scale = np.max(np.abs(cols)) or 1.0
                cols = cols / scale
                det = np.abs(cols[:, None, 0] * cols[None, :, 1] - cols[:, None, 1] * cols[None, :, 0])
                worst = det if worst is None else np.minimum(worst, det)
            i, j = np.unravel_index(np.argmax(worst), worst.shape)
            if worst[i, j] > 1e-8:
                return [(float(s[cand[i]]), width), (float(s[cand[j]]), width)]
    raise NumericallyDegenerate("no bump footprint shared by every slice")


def connect_loops(
    c0: SampledCurve,
    c1: SampledCurve,
    n_slices: int = 64,
    slope_bound: float = np.inf,
    verify: bool = True,
) -> HomotopyFamily:
    """Family of closed horizontal loops joining ``c0`` to ``c1``.

    Both loops must be closed, horizontal in the Darboux model, not
    everywhere tangent to the kernel, share a sample grid and rotation
    number, and satisfy ``|t| <= slope_bound``.
    """
    m = darboux()
    r0 = _check_input(c0, m, "c0")
    r1 = _check_input(c1, m, "c1")
    if r0 != r1:
        raise RotationMismatch(f"rotation numbers differ: {r0} vs {r1}")
    if c0.n != c1.n or np.max(np.abs(c0.params - c1.params)) > 1e-12:
        raise ValueError("loops must share the sample grid")
    for c, name in ((c0, "c0"), (c1, "c1")):
        if np.max(np.abs(c.t)) > slope_bound:
            raise SlopeBandExceeded(f"{name} leaves the slope band |t| <= {slope_bound}")
    s = c0.params
    times = np.linspace(0.0, 1.0, n_slices)
    plane = wg_homotopy(c0.points[:, [0, 3]], c1.points[:, [0, 3]], times)
    xs = [P[:, 0] for P in plane.curves]
    windows = _common_windows(s, xs)
    B = [bump(s, c, w) for c, w in windows]

    # endpoint corrections: differences between each input and its re-lift
    def relift(x, t, z0, y0):
        z = z0 + leapfrog(t, x, closed=True)
        y = y0 + leapfrog(z, x, closed=True)
        return z, y

    corr = []
    for c in (c0, c1):
        z, y = relift(c.x, c.t, c.z[0], c.y[0])
        corr.append((c.z - z, c.y - y))

    slices, amps, areas = [], [], []
    for k, (tau, P) in enumerate(zip(times, plane.curves)):
        x, t = P[:, 0], P[:, 1].copy()
        M = np.column_stack([_areas(x, b) for b in B])
        amp = np.linalg.solve(M, -_areas(x, t))
        t = t + amp[0] * B[0] + amp[1] * B[1]
        t[-1] = t[0]
        if np.max(np.abs(t)) > slope_bound:
            raise SlopeBandExceeded(f"slice {k} reaches |t| = {np.max(np.abs(t)):.3g}")
        z0 = (1 - tau) * c0.z[0] + tau * c1.z[0]
        y0 = (1 - tau) * c0.y[0] + tau * c1.y[0]
        z_raw = z0 + leapfrog(t, x, closed=True)
        areas.append((loop_integral(t, x), loop_integral(z_raw, x)))
        y_raw = y0 + leapfrog(z_raw, x, closed=True)
        z = z_raw + (1 - tau) * corr[0][0] + tau * corr[1][0]
        y = y_raw + (1 - tau) * corr[0][1] + tau * corr[1][1]
        pts = np.column_stack([x, y, z, t])
        pts[-1] = pts[0]
        slices.append(SampledCurve(s.copy(), pts, True))
        amps.append(amp)
    slices[0] = SampledCurve(s.copy(), c0.points.copy(), True) if _close(slices[0], c0) else slices[0]
    slices[-1] = SampledCurve(s.copy(), c1.points.copy(), True) if _close(slices[-1], c1) else slices[-1]
    fam = HomotopyFamily(times, slices, None, np.array(amps), windows, np.array(areas))
    if verify:
        fam.report = verify_family(fam, m)
    return fam


def _close(a: SampledCurve, b: SampledCurve) -> bool:
    return float(np.max(np.abs(a.points - b.points))) < ENDPOINT_TOL


def closure_defect(c: SampledCurve) -> float:
    return float(np.max(np.abs(c.points[-1] - c.points[0])))


def verify_family(
    h: HomotopyFamily, m=None, tol: float = HORIZONTAL_TOL, closure_tol: float = CLOSURE_TOL
) -> FamilyReport:
    """Recompute per-slice residual, closure, rotation and tangency class.

    Passes iff every slice is horizontal within ``tol``, closed within
    ``closure_tol``, not everywhere tangent, and the rotation number is the
    same as on the first slice.
    """
    m = m or darboux()
    res, defects, rots, classes = [], [], [], []
    first_bad, reason = None, ""
    for k, c in enumerate(h.slices):
        r = horizontality_residual(c, m)
        d = closure_defect(c) if c.closed else np.inf
        try:
            rot = rotation_number(c, m)
        except Exception:  # noqa: BLE001 - a failing slice is reported, not raised
            rot = None
        cls = tangency_locus(c, m).cls
        res.append(r)
        defects.append(d)
        rots.append(rot)
        classes.append(cls)
        if first_bad is None:
            if not r < tol:
                first_bad, reason = k, f"residual {r:.3g}"
            elif not d < closure_tol:
                first_bad, reason = k, f"closure defect {d:.3g}"
            elif rot is None or rot != rots[0]:
                first_bad, reason = k, f"rotation {rot} != {rots[0]}"
            elif cls == EVERYWHERE_TANGENT:
                first_bad, reason = k, "everywhere tangent"
    return FamilyReport(first_bad is None, first_bad, res, defects, rots, classes, reason)
