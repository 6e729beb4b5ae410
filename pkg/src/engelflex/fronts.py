"""Planar fronts: cusps, signed area, Reidemeister-I loops with prescribed
area under a slope bound, and the area-positivity certificate for fronts
whose Legendrian line turns monotonically through pi.

Conventions: the signed area of a closed front is the loop integral of
``z dx`` (composite trapezoid), so a counterclockwise square has area -1.
Line angles are measured counterclockwise from the x-axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    Infeasible,
    NoCuspFreeWindow,
    NotAdmissible,
    NotClosed,
    NumericallyDegenerate,
    SlopeBudgetExceeded,
    UnresolvedCusp,
)
from .quadrature import trapezoid

CUSP_FLOOR = 1e-4
LINE_TOL = 0.2


@dataclass
class Front:
    params: np.ndarray
    points: np.ndarray  # (n, 2), columns x, z
    cusp_marks: list[float] = field(default_factory=list)
    slope_bound: float = np.inf
    closed: bool = False
    loop_windows: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {self.points.shape}")
        if len(self.params) != len(self.points):
            raise ValueError("params and points differ in length")
        if self.closed and np.max(np.abs(self.points[-1] - self.points[0])) > 1e-10:
            raise NotClosed("closed front endpoints differ")
        self.cusp_marks = sorted(float(c) for c in self.cusp_marks)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def z(self):
        return self.points[:, 1]

    def cusp_indices(self) -> np.ndarray:
        return np.array([int(np.argmin(np.abs(self.params - c))) for c in self.cusp_marks], dtype=int)


def line_of(v: np.ndarray) -> np.ndarray:
    return np.arctan2(v[..., 1], v[..., 0])


# ---------------------------------------------------------------------------
# cusps


def detect_cusps(
    params,
    points,
    closed: bool = False,
    slope_bound: float = np.inf,
    check_alternation: bool = False,
    cusp_floor: float = CUSP_FLOOR,
    line_tol: float = LINE_TOL,
) -> Front:
    """Locate cusps of a sampled front and return it as a :class:`Front`.

    A cusp is a place where the direction of travel reverses (consecutive
    chords, or the chords around a very short chord, point in opposite
    directions) while the unoriented tangent line stays continuous. A
    reversal or a speed minimum below ``cusp_floor * mean speed`` at which
    the lines on the two sides disagree raises ``UnresolvedCusp``.
    """
    s = np.asarray(params, dtype=float)
    P = np.asarray(points, dtype=float)
    if len(s) < 32:
        raise ValueError("cusp detection needs at least 32 samples")
    m = len(P) - 1 if closed else len(P)
    Q = P[:m]
    if closed:
        C = np.roll(Q, -1, axis=0) - Q  # chord k joins vertex k and k+1
        vert = np.arange(m)
    else:
        C = Q[1:] - Q[:-1]
        vert = np.arange(1, m - 1)
    L = np.linalg.norm(C, axis=1)
    mean = float(np.mean(L)) if len(L) else 0.0
    if mean == 0:
        return Front(s, P, [], slope_bound, closed)
    nc = len(C)

    def chord(k):
        return C[k % nc] if closed else C[k]

    def par(k):
        if closed:
            period = s[m] - s[0]
            return s[k % m] + period * (k // m)
        return s[k]

    events: list[tuple[float, int, float]] = []  # (param, vertex index, chord length)
    for v in vert:
        kb, ka = v - 1, v  # chords before and after vertex v
        if not closed and (kb < 0 or ka >= nc):
            continue
        cb, ca = chord(kb), chord(ka)
        if np.dot(cb, ca) < 0:
            events.append((par(v), v, min(L[kb % nc], L[ka % nc])))
        elif closed or ka + 1 < nc:
            cn = chord(ka + 1)
            short = L[ka % nc] < 0.5 * min(L[kb % nc], L[(ka + 1) % nc])
            if short and np.dot(cb, cn) < 0 and np.dot(cb, ca) >= 0 and np.dot(ca, cn) >= 0:
                events.append((0.5 * (par(v) + par(v + 1)), v, L[ka % nc]))
    # speed minima below the floor without a reversal still need a regular line
    slow = np.flatnonzero(L < cusp_floor * mean)
    marks: list[float] = []
    used: list[int] = []
    for p, v, _ in sorted(events, key=lambda e: e[2]):
        if any(min(abs(v - u), m - abs(v - u)) <= 2 for u in used):
            continue
        _check_line(Q, v, m, closed, line_tol)
        used.append(v)
        marks.append(float(p % (s[m] - s[0]) + s[0]) if closed else float(p))
    for k in slow:
        v = int(k) + (0 if closed else 1)
        if any(min(abs(v - u), m - abs(v - u)) <= 2 for u in used):
            continue
        _check_line(Q, v, m, closed, line_tol)
    f = Front(s, P, sorted(marks), slope_bound, closed)
    if check_alternation:
        check_cusp_alternation(f)
    return f


def _check_line(Q, v, m, closed, tol):
    if closed:
        a, b, c = Q[(v - 2) % m], Q[v % m], Q[(v + 2) % m]
    else:
        if v - 2 < 0 or v + 2 >= m:
            return
        a, b, c = Q[v - 2], Q[v], Q[v + 2]
    u1, u2 = b - a, c - b
    n1, n2 = np.linalg.norm(u1), np.linalg.norm(u2)
    if n1 == 0 or n2 == 0:
        raise UnresolvedCusp("stationary point with undefined tangent line")
    if abs(u1[0] * u2[1] - u1[1] * u2[0]) / (n1 * n2) > tol:
        raise UnresolvedCusp("tangent line jumps at a reversal (corner, not a cusp)")


def check_cusp_alternation(f: Front) -> None:
    """Odd cusp count; away from the most horizontal cusp, departures
    alternate down, up, down, ... in the direction of travel."""
    idx = f.cusp_indices()
    if len(idx) % 2 == 0:
        raise NotAdmissible(f"even number of cusps ({len(idx)})")
    P = f.points[:-1] if f.closed else f.points
    m = len(P)
    line = [abs(np.sin(line_of(P[(i + 2) % m] - P[(i - 2) % m]))) for i in idx]
    start = int(np.argmin(line))
    order = [idx[(start + j) % len(idx)] for j in range(1, len(idx))]
    for j, i in enumerate(order):
        dz = P[(i + 3) % m, 1] - P[i % m, 1]
        want = -1 if j % 2 == 0 else 1
        if np.sign(dz) != want:
            raise NotAdmissible("cusps do not alternate")


# ---------------------------------------------------------------------------
# area


def signed_area(f: Front) -> float:
    if not f.closed:
        raise NotClosed("signed area needs a closed front")
    return trapezoid(f.z, f.x)


def path_integral(f: Front) -> float:
    """Integral of z dx along the (possibly open) front."""
    return trapezoid(f.z, f.x)


def max_slope(f: Front, margin: int = 3) -> float:
    """Largest |dz/dx| over chords at least ``margin`` samples from a cusp."""
    C = np.diff(f.points, axis=0)
    ok = np.ones(len(C), dtype=bool)
    for i in f.cusp_indices():
        ok[max(0, i - margin) : i + margin] = False
    C = C[ok]
    C = C[np.abs(C[:, 0]) > 0]
    return float(np.max(np.abs(C[:, 1] / C[:, 0]))) if len(C) else 0.0


# ---------------------------------------------------------------------------
# Reidemeister-I loop template
#
# Over a window of x-footprint l the front z = g(x) is replaced by
#     x(u) = x_a + l X(u),          X(u) = u + (kappa / 2 pi) sin(2 pi u)
#     z(u) = g(x(u)) + a l H(u),    H(u) = int_0^u T X',  T = sin^2(pi u) sin(2 pi u)
# so dz/dx = g'(x) + a T(u). X backtracks between the two zeros of X', which
# are the two cusps of the loop; H(1) = 0 and T vanishes to second order at
# both ends, so the loop joins the front smoothly. The added area is
# a l^2 C with C = int H X'. With |g' + a T| <= slope_bound this gives
# A_max = C0 * (slope_bound - max|g'|) * l^2,  C0 = |C| / max|T|.

KAPPA = 3.0


def template_X(u):
    return u + KAPPA / (2 * np.pi) * np.sin(2 * np.pi * u)


def template_dX(u):
    return 1 + KAPPA * np.cos(2 * np.pi * u)


def template_T(u):
    return np.sin(np.pi * u) ** 2 * np.sin(2 * np.pi * u)


def template_H(u):
    """Closed form of int_0^u T X' du (vanishes at u = 0 and u = 1)."""
    w = 2 * np.pi * u
    c = np.cos(w)
    return ((1 - c) + (KAPPA - 1) * np.sin(w) ** 2 / 2 + KAPPA * (c ** 3 - 1) / 3) / (4 * np.pi)


def _template_constants(n: int = 200001) -> tuple[float, float]:
    u = np.linspace(0.0, 1.0, n)
    return float(trapezoid(template_H(u), template_X(u))), float(np.max(np.abs(template_T(u))))


TEMPLATE_AREA, TEMPLATE_TMAX = _template_constants()
C0 = abs(TEMPLATE_AREA) / TEMPLATE_TMAX  # about 0.0153 for kappa = 3
CUSPS_PER_LOOP = 2


def r1_capacity(slope_bound: float, footprint: float, max_gprime: float = 0.0) -> float:
    """Largest |area| one template loop can add over a window."""
    if not np.isfinite(slope_bound):
        return np.inf
    return C0 * max(slope_bound - max_gprime, 0.0) * footprint ** 2


LOOP_CUSP_U = float(np.arccos(-1.0 / KAPPA) / (2 * np.pi))  # X'(u) = 0 at u and 1 - u


def _default_window(f: Front, s0: float, max_half: Optional[float] = None) -> tuple[int, int]:
    """Largest cusp-free window around ``s0`` on which x is strictly monotone."""
    s, x = f.params, f.x
    n = len(s)
    i0 = int(np.clip(np.searchsorted(s, s0), 1, n - 2))
    dx = np.sign(np.diff(x))
    if dx[i0] == 0:
        raise NoCuspFreeWindow("front is vertical or stationary at s0")
    busy = list(f.cusp_marks) + [p for w in f.loop_windows for p in w]
    if max_half is None:
        max_half = s[-1] - s[0]
    lo = hi = i0
    while lo > 0 and dx[lo - 1] == dx[i0] and s0 - s[lo - 1] <= max_half:
        lo -= 1
    while hi < n - 1 and dx[hi] == dx[i0] and s[hi + 1] - s0 <= max_half:
        hi += 1
    for c in busy:
        if c <= s0:
            while lo <= i0 and s[lo] <= c + 1e-12:
                lo += 1
        if c >= s0:
            while hi >= i0 and s[hi] >= c - 1e-12:
                hi -= 1
    # shrink to a symmetric window so the loop sits around s0
    half = min(s0 - s[lo], s[hi] - s0)
    lo = int(np.searchsorted(s, s0 - half - 1e-12))
    hi = int(np.searchsorted(s, s0 + half + 1e-12, side="right") - 1)
    if hi - lo < 4:
        raise NoCuspFreeWindow("no cusp-free, x-monotone window around s0")
    return lo, hi


def _window_graph(f: Front, lo: int, hi: int):
    x, z = f.x[lo : hi + 1], f.z[lo : hi + 1]
    if np.any(np.diff(x) == 0) or not (np.all(np.diff(x) > 0) or np.all(np.diff(x) < 0)):
        raise NoCuspFreeWindow("window is not a graph over x")
    order = np.argsort(x)
    g = CubicSpline(x[order], z[order])
    xs = np.linspace(x.min(), x.max(), 257)
    return g, float(np.max(np.abs(g(xs, 1))))


def window_capacity(f: Front, window: tuple[float, float]) -> float:
    lo = int(np.searchsorted(f.params, window[0] - 1e-12))
    hi = int(np.searchsorted(f.params, window[1] + 1e-12, side="right") - 1)
    _, gmax = _window_graph(f, lo, hi)
    return r1_capacity(f.slope_bound, abs(f.x[hi] - f.x[lo]), gmax)


def insert_r1_loop(
    f: Front,
    s0: float,
    dA: float,
    window: Optional[tuple[float, float]] = None,
    min_samples: int = 128,
) -> Front:
    """Insert one Reidemeister-I loop around ``s0`` changing the area by ``dA``.

    The front is untouched outside the window, gains two cusps, and keeps
    ``|dz/dx| <= slope_bound`` away from the new cusps.
    """
    if dA == 0:
        return Front(f.params.copy(), f.points.copy(), list(f.cusp_marks), f.slope_bound, f.closed, list(f.loop_windows))
    if window is None:
        lo, hi = _default_window(f, s0)
    else:
        lo = int(np.searchsorted(f.params, window[0] - 1e-12))
        hi = int(np.searchsorted(f.params, window[1] + 1e-12, side="right") - 1)
        a, b = f.params[lo], f.params[hi]
        cusp_inside = any(a <= c <= b for c in f.cusp_marks)
        loop_overlap = any(wa < b and wb > a for wa, wb in f.loop_windows)
        if hi - lo < 4 or cusp_inside or loop_overlap:
            raise NoCuspFreeWindow("requested window is not cusp-free")
    g, gmax = _window_graph(f, lo, hi)
    s_a, s_b = f.params[lo], f.params[hi]
    x_a, ell = f.x[lo], f.x[hi] - f.x[lo]
    cap = r1_capacity(f.slope_bound, abs(ell), gmax)
    if abs(dA) > cap:
        raise SlopeBudgetExceeded(f"|dA| = {abs(dA):.3g} exceeds A_max = {cap:.3g}")

    count = max(hi - lo + 1, min_samples)
    sw = np.linspace(s_a, s_b, count)
    u = (sw - s_a) / (s_b - s_a)
    xw = x_a + ell * template_X(u)
    xw[0], xw[-1] = f.x[lo], f.x[hi]
    zbase = g(xw)
    zbase[0], zbase[-1] = f.z[lo], f.z[hi]
    zloop = ell * template_H(u)
    zloop[0] = zloop[-1] = 0.0

    def assemble(a):
        pts = np.vstack([f.points[:lo], np.column_stack([xw, zbase + a * zloop]), f.points[hi + 1 :]])
        par = np.concatenate([f.params[:lo], sw, f.params[hi + 1 :]])
        return par, pts

    old = path_integral(f)
    par, p0 = assemble(0.0)
    _, p1 = assemble(1.0)
    a0, a1 = trapezoid(p0[:, 1], p0[:, 0]), trapezoid(p1[:, 1], p1[:, 0])
    amp = (old + dA - a0) / (a1 - a0)
    if np.isfinite(f.slope_bound) and abs(amp) * TEMPLATE_TMAX + gmax > f.slope_bound * (1 + 1e-9):
        raise SlopeBudgetExceeded("loop amplitude violates the slope bound")
    _, pts = assemble(amp)
    if f.closed:
        pts[-1] = pts[0]
    marks = list(f.cusp_marks) + [s_a + LOOP_CUSP_U * (s_b - s_a), s_b - LOOP_CUSP_U * (s_b - s_a)]
    return Front(par, pts, marks, f.slope_bound, f.closed, list(f.loop_windows) + [(float(s_a), float(s_b))])


def _allocate(caps: Sequence[float], n: int) -> list[int]:
    """Loop counts per window maximizing total capacity sum(cap_j / k_j)."""
    k = [0] * len(caps)
    for _ in range(n):
        gains = [c if kj == 0 else c / (kj + 1) - c / kj for c, kj in zip(caps, k)]
        j = int(np.argmax(gains))
        k[j] += 1
    return k


def cusp_free_windows(f: Front, margin: float = 0.1) -> list[tuple[float, float]]:
    """Parameter arcs between consecutive cusps, loop windows and vertical
    tangents (so each arc is a graph over x), each shrunk by ``margin`` of
    its length at both ends."""
    s = f.params
    sign = np.sign(np.diff(f.x))
    turns = [float(s[i + 1]) for i in range(len(sign) - 1) if sign[i] * sign[i + 1] < 0]
    marks = sorted(set(list(f.cusp_marks) + turns + [p for w in f.loop_windows for p in w]))
    if f.closed and marks:
        edges = list(zip(marks[:-1], marks[1:]))
    else:
        bounds = [float(s[0])] + marks + [float(s[-1])]
        edges = list(zip(bounds[:-1], bounds[1:]))
    out = []
    for a, b in edges:
        pad = margin * (b - a)
        if b - a > 0 and np.count_nonzero((s >= a + pad) & (s <= b - pad)) >= 8:
            out.append((a + pad, b - pad))
    return out


def adjust_area_to(
    f: Front, target: float, windows: Sequence[tuple[float, float]], n_max: int = 64
) -> Front:
    """Add an even number of R1 loops so the area becomes ``target``.

    Loop counts are the smallest even N whose best split of the windows has
    enough capacity; each loop gets a share of the area proportional to its
    capacity, so all loops carry the sign of the required change.
    """
    if not windows:
        raise ValueError("at least one window is required")
    ws = sorted((float(a), float(b)) for a, b in windows)
    for (a0, b0), (a1, b1) in zip(ws[:-1], ws[1:]):
        if a1 < b0:
            raise ValueError("windows overlap")
    area = signed_area(f) if f.closed else path_integral(f)
    delta = target - area
    if delta == 0:
        return f
    caps = [window_capacity(f, w) for w in ws]
    plan = None
    for n in range(2, n_max + 1, 2):
        k = _allocate(caps, n)
        total = sum(c / kj for c, kj in zip(caps, k) if kj)
        if total >= abs(delta):
            plan = k
            break
    if plan is None:
        best = max(sum(c / kj for c, kj in zip(caps, _allocate(caps, n)) if kj) for n in range(2, n_max + 1, 2))
        raise Infeasible(f"|target - area| = {abs(delta):.3g} exceeds capacity {best:.3g} with N <= {n_max}")
    pieces = []
    for (a, b), c, kj in zip(ws, caps, plan):
        for i in range(kj):
            pieces.append(((a + (b - a) * i / kj, a + (b - a) * (i + 1) / kj), c / kj ** 2))
    if any(np.isinf(c) for _, c in pieces):
        # no slope bound: split evenly over the unbounded windows
        pieces = [(w, 1.0 if np.isinf(c) else 0.0) for w, c in pieces]
    total = sum(c for _, c in pieces)
    out = f
    for w, c in pieces:
        if c:
            out = insert_r1_loop(out, 0.5 * (w[0] + w[1]), delta * c / total, window=w)
    return out


# ---------------------------------------------------------------------------
# admissible fronts: the Legendrian line turns monotonically through pi


def front_from_speed(theta: np.ndarray, angle: np.ndarray, speed: np.ndarray) -> np.ndarray:
    """Integrate ``speed * (cos angle, sin angle)`` by the trapezoid rule."""
    v = speed[:, None] * np.column_stack([np.cos(angle), np.sin(angle)])
    dt = np.diff(theta)[:, None]
    return np.vstack([[0.0, 0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * dt, axis=0)])


def admissible_front(
    n_cusps: int, rng: np.random.Generator, samples: int = 2048, max_tries: int = 200
) -> Front:
    """Seeded closed front with ``n_cusps`` (odd) alternating cusps.

    The line angle is a random strictly increasing function from 0 to pi;
    the signed speed is a sum of one sine arch per interval between
    consecutive cusps, with alternating signs and positive random weights.
    Two of the weights are solved for so that the front closes.
    """
    if n_cusps < 3 or n_cusps % 2 == 0:
        raise NotAdmissible("admissible fronts have an odd number (>= 3) of cusps")
    theta = np.linspace(0.0, 1.0, samples)
    m = samples - 1
    min_gap = max(8, m // (4 * n_cusps))
    for _ in range(max_tries):
        c = rng.uniform(-0.6, 0.6)
        angle = np.pi * (theta + c * np.sin(2 * np.pi * theta) / (2 * np.pi))
        inner = np.sort(rng.choice(np.arange(min_gap, m - min_gap), size=n_cusps - 1, replace=False))
        if np.any(np.diff(inner) < min_gap):
            continue
        knots = np.concatenate([[0], inner, [m]])
        arches = []
        for j in range(n_cusps):
            a, b = knots[j], knots[j + 1]
            arch = np.zeros(samples)
            u = (theta[a : b + 1] - theta[a]) / (theta[b] - theta[a])
            arch[a : b + 1] = (-1) ** j * np.sin(np.pi * u)
            arches.append(arch)
        cols = np.array([front_from_speed(theta, angle, b)[-1] for b in arches])  # (n_cusps, 2)
        w = rng.uniform(0.5, 1.5, size=n_cusps)
        pairs = [(i, j) for i in range(n_cusps) for j in range(i + 1, n_cusps)]
        rng.shuffle(pairs)
        for i, j in pairs:
            M = np.column_stack([cols[i], cols[j]])
            if abs(np.linalg.det(M)) < 1e-8:
                continue
            rest = sum(w[k] * cols[k] for k in range(n_cusps) if k not in (i, j))
            wi, wj = np.linalg.solve(M, -rest)
            if wi > 0.2 and wj > 0.2:
                w[i], w[j] = wi, wj
                speed = sum(wk * b for wk, b in zip(w, arches))
                pts = front_from_speed(theta, angle, speed)
                pts[-1] = pts[0]
                marks = [float(theta[k]) for k in knots[:-1]]
                return Front(theta, pts, marks, np.inf, True)
    raise NumericallyDegenerate("admissible front generator did not find positive weights")


def line_angle_total(f: Front) -> tuple[float, bool]:
    """Total unwrapped line-angle change over a closed front and whether it
    is monotone non-decreasing."""
    Q = f.points[:-1]
    C = np.roll(Q, -1, axis=0) - Q
    C = C[np.linalg.norm(C, axis=1) > 0]
    ang = np.mod(line_of(C), np.pi)
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + np.pi / 2) % np.pi - np.pi / 2
    return float(np.sum(d)), bool(np.all(d >= -1e-9))


@dataclass
class AreaCertificate:
    total_area: float
    reduction_trace: list[dict]
    final_area: float
    enlarged_area: float


def _polyline_area(P: np.ndarray) -> float:
    return trapezoid(P[:, 1], P[:, 0])


def _enlarge_cusps(Q: np.ndarray, cusps: Sequence[int]) -> tuple[np.ndarray, list[int]]:
    """Glue an out-and-back needle to every cusp but the first.

    Odd cusps are pushed up to a common height above the front and even
    cusps down to a common depth below it. A needle retraces itself, so the
    area is unchanged exactly.
    """
    zt = Q[:, 1].max()
    zb = Q[:, 1].min()
    pad = 0.05 * max(zt - zb, np.ptp(Q[:, 0]), 1e-12)
    z_top, z_bot = zt + pad, zb - pad
    m = len(Q)
    out: list[np.ndarray] = []
    tips: list[int] = [0]
    cset = {int(c): j for j, c in enumerate(cusps)}
    for k in range(m):
        out.append(Q[k])
        j = cset.get(k)
        if j is None or j == 0:
            continue
        u = Q[k] - Q[(k - 2) % m]
        u = u / np.linalg.norm(u)
        want = 1 if j % 2 == 1 else -1
        if np.sign(u[1]) != want:
            raise NotAdmissible("cusp tip points the wrong way for alternation")
        target = z_top if want > 0 else z_bot
        far = Q[k] + (target - Q[k, 1]) / u[1] * u
        far[1] = target
        tips.append(len(out))
        out.append(far)
        out.append(Q[k].copy())
    out.append(Q[0])
    return np.array(out), tips


def _arc_crossing(A: np.ndarray, B: np.ndarray) -> tuple[float, float, int, int]:
    """Crossing of two z-monotone polylines; returns (x, z, segA, segB)."""
    for P in (A, B):
        dz = np.diff(P[:, 1])
        if not (np.all(dz < 0) or np.all(dz > 0)):
            raise NotAdmissible("arc between cusps is not monotone in z")
    zs = np.union1d(A[:, 1], B[:, 1])
    lo = max(A[:, 1].min(), B[:, 1].min())
    hi = min(A[:, 1].max(), B[:, 1].max())
    zs = zs[(zs >= lo) & (zs <= hi)]

    def xof(P, z):
        o = np.argsort(P[:, 1])
        return np.interp(z, P[o, 1], P[o, 0])

    D = xof(A, zs) - xof(B, zs)
    nz = np.flatnonzero(np.sign(D[:-1]) * np.sign(D[1:]) <= 0)
    if len(nz) == 0:
        raise NumericallyDegenerate("arcs do not cross")
    k = int(nz[-1])  # topmost crossing
    d0, d1 = D[k], D[k + 1]
    w = 0.0 if d0 == d1 else d0 / (d0 - d1)
    z = zs[k] + w * (zs[k + 1] - zs[k])
    if not np.isfinite(z):
        raise NumericallyDegenerate("crossing could not be localized")
    x = float(xof(A, np.array([z]))[0])

    def seg(P):
        dz = P[1:, 1] - P[:-1, 1]
        inside = (np.minimum(P[1:, 1], P[:-1, 1]) <= z) & (z <= np.maximum(P[1:, 1], P[:-1, 1])) & (dz != 0)
        return int(np.flatnonzero(inside)[0])

    return x, float(z), seg(A), seg(B)


def _rotate_to_origin_cusp(f: Front) -> tuple[np.ndarray, list[int]]:
    Q = f.points[:-1]
    m = len(Q)
    idx = [int(i) % m for i in f.cusp_indices()]
    line = [abs(np.sin(line_of(Q[(i + 2) % m] - Q[(i - 2) % m]))) for i in idx]
    start = idx[int(np.argmin(line))]
    Q = np.roll(Q, -start, axis=0)
    cusps = sorted((i - start) % m for i in idx)
    return Q, cusps


def positive_area_certificate(f: Front, area_tol: float = 1e-10) -> AreaCertificate:
    """Run the cusp-reduction argument on an admissible closed front.

    Checks: closed, odd alternating cusps, line angle increasing through
    exactly pi. The front is normalized by needles, then the R1
    configuration between cusps 1 and 4 is cut out at the crossing of the
    arcs (1 -> 2) and (3 -> 4) until three cusps remain; the removed areas
    and the final three-cusp area are recorded.
    """
    if not f.closed:
        raise NotAdmissible("front must be closed")
    n = len(f.cusp_marks)
    if n % 2 == 0 or n < 3:
        raise NotAdmissible(f"cusp count {n} is not odd and >= 3")
    total, mono = line_angle_total(f)
    if not mono:
        raise NotAdmissible("line angle is not monotone (front not piecewise convex)")
    if abs(total - np.pi) > 1e-6:
        raise NotAdmissible(f"line angle turns by {total:.6g}, not pi")
    check_cusp_alternation(f)
    area = signed_area(f)
    Q, cusps = _rotate_to_origin_cusp(f)
    Q = np.vstack([Q, Q[:1]])
    E, tips = _enlarge_cusps(Q[:-1], cusps)
    enlarged = _polyline_area(E)
    if abs(enlarged - area) > area_tol * max(1.0, abs(area)):
        raise NumericallyDegenerate("cusp enlargement changed the area")
    trace: list[dict] = []
    cur = E
    while len(tips) > 3:
        t1, t2, t3, t4 = tips[1:5]
        A = cur[t1 : t2 + 1]
        B = cur[t3 : t4 + 1]
        x, z, a, b = _arc_crossing(A, B)
        X = np.array([x, z])
        loop = np.vstack([[X], cur[t1 + a + 1 : t3 + b + 1], [X]])
        removed = _polyline_area(loop)
        new = np.vstack([cur[: t1 + a + 1], [X], cur[t3 + b + 1 :]])
        shift = (t3 + b + 1) - (t1 + a + 2)
        before = len(tips)
        tips = tips[:2] + [t - shift for t in tips[4:]]
        if abs(_polyline_area(new) + removed - _polyline_area(cur)) > area_tol * max(1.0, abs(area)):
            raise NumericallyDegenerate("area bookkeeping failed while removing a loop")
        trace.append(
            {
                "cusps": (1, 2, 3, 4),
                "crossing": (float(x), float(z)),
                "removed_area": float(removed),
                "cusps_before": before,
                "cusps_after": len(tips),
            }
        )
        cur = new
    final = _polyline_area(cur)
    if final <= 0 or any(t["removed_area"] < 0 for t in trace):
        raise NumericallyDegenerate(f"certificate failed: final area {final:.3g}")
    return AreaCertificate(float(area), trace, float(final), float(enlarged))
