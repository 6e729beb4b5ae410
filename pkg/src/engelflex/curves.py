"""Sampled curves in an Engel model: horizontality, tangency to the kernel,
rotation numbers and the developing map along kernel orbits."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateSpeed,
    GridTooCoarse,
    NonFinitePoint,
    NotClosed,
    NotKernelTangent,
    VanishingSection,
)
from .models import EngelModel

SPEED_FLOOR = 1e-6
TOL_ANGLE = 1e-3
CLOSURE_TOL = 1e-10

EVERYWHERE_TANGENT = "EverywhereTangent"
NOT_EVERYWHERE_TANGENT = "NotEverywhereTangent"
GENERIC = "Generic"
TRANSVERSE = "Transverse"


@dataclass
class SampledCurve:
    params: np.ndarray
    points: np.ndarray  # (n, 4), columns x, y, z, t
    closed: bool = False
    framing: Optional[np.ndarray] = None

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 4:
            raise ValueError(f"points must have shape (n, 4), got {self.points.shape}")
        if len(self.params) != len(self.points):
            raise ValueError("params and points differ in length")
        if not np.all(np.isfinite(self.points)):
            raise NonFinitePoint("curve has non-finite samples")
        if len(self.params) > 1 and np.any(np.diff(self.params) <= 0):
            raise ValueError("params must be strictly increasing")
        if self.framing is not None:
            self.framing = np.asarray(self.framing, dtype=float)
            if self.framing.shape != self.points.shape:
                raise ValueError("framing must match points in shape")
        if self.closed:
            if np.max(np.abs(self.points[-1] - self.points[0])) > CLOSURE_TOL:
                raise NotClosed("closed curve endpoints differ")
            if self.framing is not None and np.max(np.abs(self.framing[-1] - self.framing[0])) > CLOSURE_TOL:
                raise NotClosed("closed curve framing endpoints differ")

    @property
    def n(self) -> int:
        return len(self.params)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    @property
    def z(self):
        return self.points[:, 2]

    @property
    def t(self):
        return self.points[:, 3]

    def reversed(self) -> "SampledCurve":
        p = self.params
        fr = None if self.framing is None else -self.framing[::-1]
        return SampledCurve(p[0] + p[-1] - p[::-1], self.points[::-1].copy(), self.closed, fr)

    def closure_defect(self) -> float:
        return float(np.max(np.abs(self.points[-1] - self.points[0])))


@dataclass
class TangencyLocus:
    intervals: list[tuple[float, float]]
    cls: str
    crossings: list[float] = field(default_factory=list)


@dataclass
class FamilyOfCurves:
    k_grid: np.ndarray
    curves: list[SampledCurve]

    def __post_init__(self):
        self.k_grid = np.asarray(self.k_grid, dtype=float)
        if len(self.k_grid) != len(self.curves):
            raise ValueError("k_grid and curves differ in length")
        if self.curves:
            c0 = self.curves[0]
            for c in self.curves[1:]:
                if c.closed != c0.closed or c.n != c0.n or np.max(np.abs(c.params - c0.params)) > 0:
                    raise ValueError("family members must share the parameter grid and closure flag")


def curve_from_function(fn, n: int = 2048, closed: bool = False, a: float = 0.0, b: float = 1.0) -> SampledCurve:
    """Sample ``fn(s) -> (n, 4)`` on ``n`` points of ``[a, b]``."""
    s = np.linspace(a, b, n)
    pts = np.asarray(fn(s), dtype=float)
    if pts.shape == (4, n):
        pts = pts.T
    if closed:
        pts[-1] = pts[0]
    return SampledCurve(s, pts, closed)


# ---------------------------------------------------------------------------
# finite differences


def tangent_data(c: SampledCurve) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference tangent and the point at which it is attached.

    Interior samples use centred differences. On closed curves the seam is
    treated periodically. On open curves the two ends use one-sided
    differences attached to the midpoint of the end chord, which keeps the
    end samples second-order accurate.
    """
    P, s = c.points, c.params
    n = len(s)
    if n < 2:
        raise DegenerateSpeed("curve needs at least two samples")
    T = np.empty_like(P)
    at = P.copy()
    if n > 2:
        T[1:-1] = (P[2:] - P[:-2]) / (s[2:] - s[:-2])[:, None]
    if c.closed and n > 2:
        period = s[-1] - s[0]
        T[0] = (P[1] - P[-2]) / (s[1] - s[-2] + period)
        T[-1] = T[0]
    else:
        T[0] = (P[1] - P[0]) / (s[1] - s[0])
        T[-1] = (P[-1] - P[-2]) / (s[-1] - s[-2])
        at[0] = 0.5 * (P[0] + P[1])
        at[-1] = 0.5 * (P[-1] + P[-2])
    return T, at


def _speeds(T: np.ndarray, speed_floor: float) -> np.ndarray:
    sp = np.linalg.norm(T, axis=1)
    mean = float(np.mean(sp))
    if mean == 0 or np.any(sp < speed_floor * mean):
        raise DegenerateSpeed("finite-difference speed below the floor")
    return sp


def horizontality_residual(c: SampledCurve, m: EngelModel, speed_floor: float = SPEED_FLOOR) -> float:
    if c.n < 8:
        raise ValueError("horizontality residual needs at least 8 samples")
    T, at = tangent_data(c)
    sp = _speeds(T, speed_floor)
    a, b = m.coframe(at)
    r = (np.abs(np.sum(a * T, axis=1)) + np.abs(np.sum(b * T, axis=1))) / sp
    if not c.closed:
        # centred differences exist only at interior samples of an open curve
        r = r[1:-1]
    return float(np.max(r))


def frame_coordinates(vectors: np.ndarray, at: np.ndarray, m: EngelModel) -> np.ndarray:
    """Least-squares coordinates of vectors in the (kernel, complement) frame."""
    K, C = m.oriented_frame(at)
    kk = np.sum(K * K, axis=-1)
    kc = np.sum(K * C, axis=-1)
    cc = np.sum(C * C, axis=-1)
    kv = np.sum(K * vectors, axis=-1)
    cv = np.sum(C * vectors, axis=-1)
    det = kk * cc - kc * kc
    c1 = (cc * kv - kc * cv) / det
    c2 = (kk * cv - kc * kv) / det
    return np.stack([c1, c2], axis=-1)


def tangency_indicator(c: SampledCurve, m: EngelModel, speed_floor: float = SPEED_FLOOR) -> np.ndarray:
    """Signed sine of the angle between the tangent and the kernel line."""
    T, at = tangent_data(c)
    _speeds(T, speed_floor)
    co = frame_coordinates(T, at, m)
    nrm = np.linalg.norm(co, axis=1)
    if np.any(nrm == 0):
        raise DegenerateSpeed("tangent has no component in the distribution")
    return co[:, 1] / nrm


# ---------------------------------------------------------------------------
# tangency locus


def _runs(mask: np.ndarray, cyclic: bool) -> list[tuple[int, int]]:
    """Maximal runs ``[i, j]`` (inclusive) of True in ``mask``."""
    n = len(mask)
    if not mask.any():
        return []
    if mask.all():
        return [(0, n - 1)]
    d = np.diff(np.concatenate([[0], mask.astype(int), [0]]))
    starts = list(np.flatnonzero(d == 1))
    ends = list(np.flatnonzero(d == -1) - 1)
    runs = list(zip(starts, ends))
    if cyclic and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        last = runs.pop()
        first = runs.pop(0)
        runs.append((last[0], first[1] + n))
    return runs


def _sign_changes(seg: np.ndarray, pos: Sequence[float]) -> list[float]:
    """Locations where ``seg`` changes sign, exact zeros included."""
    nz = np.flatnonzero(seg != 0)
    out = []
    for p, q in zip(nz[:-1], nz[1:]):
        if seg[p] * seg[q] < 0:
            if q == p + 1:
                a, b = seg[p], seg[q]
                out.append(pos[p] + a / (a - b) * (pos[q] - pos[p]))
            else:
                out.append(pos[(p + q) // 2])
    return out


def _classify_runs(sig: np.ndarray, s: np.ndarray, tol: float, tol_d: float, cyclic: bool):
    """Split near-tangent runs into transverse crossings and genuine tangency.

    A run counts as transverse crossings when the indicator changes sign in
    it (flanking samples included) and its discrete derivative stays above
    ``tol_d`` throughout the run.
    """
    n = len(sig)
    period = s[n] - s[0] if cyclic else 0.0
    if cyclic:
        prev = np.roll(sig, 1)
        nxt = np.roll(sig, -1)
        sp = np.roll(s[:n], 1)
        sp[0] -= period
        sn = np.roll(s[:n], -1)
        sn[-1] += period
        ds = (nxt - prev) / (sn - sp)
    else:
        ds = np.gradient(sig, s)
    near = np.abs(sig) < np.sin(tol)
    crossings, tangent, degenerate = [], [], []

    def param(i):
        return s[i % n] + period * (i // n)

    for i, j in _runs(near, cyclic):
        lo, hi = i - 1, j + 1
        flank = (lo >= 0 or cyclic) and (hi < n or cyclic)
        idx = np.arange(i, j + 1) % n
        steep = np.all(np.abs(ds[idx]) >= tol_d)
        seg_idx = np.arange(lo if flank else i, (hi if flank else j) + 1)
        seg = sig[seg_idx % n]
        found = _sign_changes(seg, [param(q) for q in seg_idx])
        if steep and found:
            crossings.extend(found)
        else:
            tangent.append((param(i), param(j)))
            if not steep or not flank:
                degenerate.append((i, j))
    # sign changes between two samples that are both outside the band
    sgn = np.sign(sig)
    for k in range(n if cyclic else n - 1):
        k1 = (k + 1) % n
        if not near[k] and not near[k1] and sgn[k] * sgn[k1] < 0:
            a, b = sig[k], sig[k1]
            crossings.append(param(k) + a / (a - b) * (param(k + 1) - param(k)))
    return sorted(crossings), tangent, degenerate


def tangency_locus(
    c: SampledCurve,
    m: EngelModel,
    tol_angle: float = TOL_ANGLE,
    tol_deriv: Optional[float] = None,
    speed_floor: float = SPEED_FLOOR,
) -> TangencyLocus:
    """Where the tangent lies in the kernel line, within ``tol_angle``.

    Transverse crossings of the kernel collapse to zero-length intervals;
    runs without a sign change, or with a flat indicator, stay as intervals.
    """
    sig = tangency_indicator(c, m, speed_floor)
    s = c.params
    if np.all(np.abs(sig) < np.sin(tol_angle)):
        return TangencyLocus([(float(s[0]), float(s[-1]))], EVERYWHERE_TANGENT)
    tol_d = tol_angle if tol_deriv is None else tol_deriv
    cyclic = c.closed
    crossings, tangent, _ = _classify_runs(sig[:-1] if cyclic else sig, s, tol_angle, tol_d, cyclic)
    intervals = sorted([(float(a), float(b)) for a, b in tangent] + [(float(p), float(p)) for p in crossings])
    if not intervals:
        cls = TRANSVERSE
    elif all(b - a <= 0 for a, b in intervals):
        cls = GENERIC
    else:
        cls = NOT_EVERYWHERE_TANGENT
    return TangencyLocus(intervals, cls, [float(p) for p in crossings])


def discretely_transverse(
    c: SampledCurve, m: EngelModel, tol_angle: float = TOL_ANGLE, tol_deriv: Optional[float] = None
) -> bool:
    """True when every near-tangent run is a sign-changing crossing with a
    non-vanishing discrete derivative of the indicator."""
    sig = tangency_indicator(c, m)
    tol_d = tol_angle if tol_deriv is None else tol_deriv
    if c.closed:
        _, tangent, _ = _classify_runs(sig[:-1], c.params, tol_angle, tol_d, True)
    else:
        _, tangent, _ = _classify_runs(sig, c.params, tol_angle, tol_d, False)
    return not tangent


# ---------------------------------------------------------------------------
# rotation number and developing map


def _winding(v: np.ndarray) -> float:
    ang = np.arctan2(v[:, 1], v[:, 0])
    d = np.diff(ang)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return float(np.sum(d) / (2 * np.pi))


def planar_winding(v: np.ndarray) -> int:
    """Winding number about the origin of a closed sampled plane loop."""
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v[-1] - v[0])) > 0:
        v = np.vstack([v, v[:1]])
    return int(round(_winding(v)))


def rotation_number(c: SampledCurve, m: EngelModel, use_framing: bool = True) -> int:
    """Winding of the tangent (or framing) in the (kernel, complement) frame."""
    if not c.closed:
        raise NotClosed("rotation number needs a closed curve")
    if use_framing and c.framing is not None:
        vec, at = c.framing, c.points
    else:
        vec, at = tangent_data(c)
    co = frame_coordinates(vec, at, m)
    if np.any(np.linalg.norm(co, axis=1) < 1e-10):
        raise VanishingSection("section vanishes in frame coordinates")
    co = co.copy()
    co[-1] = co[0]
    return int(round(_winding(co)))


def legendrian_angle(m: EngelModel, points: np.ndarray) -> np.ndarray:
    """Angle of the non-kernel frame vector's (x, z) part against (X, Z).

    Only meaningful for models whose kernel is ``d/dt``, where the remaining
    frame vector projects into the contact plane ``ker(dy - z dx)`` framed by
    ``X = d/dx + z d/dy`` and ``Z = d/dz``.
    """
    if not m.kernel_is_dt:
        raise NotImplementedError("developing map is implemented for models with kernel d/dt")
    L = m.frame(points).v2
    return np.arctan2(L[:, 2], L[:, 0])


def developing_angle(seg: SampledCurve, m: EngelModel, check: bool = True) -> float:
    """Total projective turning (radians) of the Legendrian line along ``seg``."""
    if seg.n < 2 or seg.params[-1] == seg.params[0]:
        return 0.0
    if check:
        loc = tangency_locus(seg, m)
        if loc.cls != EVERYWHERE_TANGENT:
            raise NotKernelTangent(f"segment tangency class is {loc.cls}")
    ang = legendrian_angle(m, seg.points)
    d = np.diff(ang)
    d = (d + np.pi / 2) % np.pi - np.pi / 2
    if np.any(np.abs(d) >= np.pi / 4):
        raise GridTooCoarse("projective angle step exceeds pi/4")
    return float(np.sum(d))


def developing_turns(seg: SampledCurve, m: EngelModel) -> int:
    """Integer number of projective (half) turns of the developing map."""
    a = developing_angle(seg, m)
    return int(np.trunc(a / np.pi + np.copysign(1e-9, a)))


def reparametrize(c: SampledCurve, phi: np.ndarray) -> SampledCurve:
    """Resample ``c`` at increasing parameter values ``phi`` (cubic spline).

    ``phi`` maps ``c.params[0]`` and ``c.params[-1]`` to themselves.
    """
    from scipy.interpolate import CubicSpline

    bc = "periodic" if c.closed else "not-a-knot"
    spl = CubicSpline(c.params, c.points, axis=0, bc_type=bc)
    pts = spl(phi)
    if c.closed:
        pts[-1] = pts[0]
    return SampledCurve(c.params.copy(), pts, c.closed)


# ---------------------------------------------------------------------------
# genericity of tangency in families


def family_indicator(fam: FamilyOfCurves, m: EngelModel) -> np.ndarray:
    """Tangency indicator on the (k, s) grid; closed members drop the seam copy."""
    sig = np.array([tangency_indicator(c, m) for c in fam.curves])
    return sig[:, :-1] if fam.curves[0].closed else sig


def degenerate_cells(
    fam: FamilyOfCurves, m: EngelModel, tol_angle: float = TOL_ANGLE, tol_deriv: Optional[float] = None
) -> np.ndarray:
    """Boolean (k, s) mask of grid cells where the indicator and its discrete
    gradient vanish together: the zero set is not transverse there."""
    sig = family_indicator(fam, m)
    tol_d = tol_angle if tol_deriv is None else tol_deriv
    s = fam.curves[0].params
    if fam.curves[0].closed:
        per = s[-1] - s[0]
        sp = np.roll(s[:-1], 1)
        sp[0] -= per
        sn = np.roll(s[:-1], -1)
        sn[-1] += per
        ds = (np.roll(sig, -1, axis=1) - np.roll(sig, 1, axis=1)) / (sn - sp)
    else:
        ds = np.gradient(sig, s, axis=1)
    flat = np.abs(ds) < tol_d
    if len(fam.k_grid) > 1:
        dk = np.gradient(sig, fam.k_grid, axis=0)
        flat &= np.abs(dk) < tol_d
    return (np.abs(sig) < np.sin(tol_angle)) & flat


def _relift(c: SampledCurve, m: EngelModel, coord: np.ndarray) -> SampledCurve:
    """Rebuild a horizontal curve after replacing its perturbed coordinate."""
    P = c.points
    y0, z0 = P[0, 1], P[0, 2]
    if m.kind == "Darboux":
        x, t = coord, P[:, 3]
        z = z0 + _leapfrog(t, x, c.closed)
        y = y0 + _leapfrog(z, x, c.closed)
    else:
        x, t = P[:, 0], coord
        y = y0 + _leapfrog(t, x, c.closed)
        z = z0 + _leapfrog(t * t, x, c.closed)
    pts = np.column_stack([x, y, z, t])
    if c.closed:
        pts[-1] = pts[0]
    return SampledCurve(c.params.copy(), pts, c.closed)


def _leapfrog(g, x, closed):
    from .quadrature import leapfrog

    return leapfrog(g, x, closed=closed)


def _closure(c: SampledCurve, m: EngelModel, coord: np.ndarray) -> np.ndarray:
    from .quadrature import leapfrog, loop_integral

    if m.kind == "Darboux":
        x, t = coord, c.points[:, 3]
        z = leapfrog(t, x, closed=True)
        return np.array([loop_integral(t, x), loop_integral(z, x)])
    x, t = c.points[:, 0], coord
    return np.array([loop_integral(t, x), loop_integral(t * t, x)])


def _perturbed_member(c, m, col, psi, eps, aux):
    from scipy.optimize import fsolve

    from .errors import NoConvergence

    base = c.points[:, col] + eps * psi
    if not c.closed:
        return _relift(c, m, base)
    target = _closure(c, m, c.points[:, col])

    def resid(a):
        coord = base + a[0] * aux[0] + a[1] * aux[1]
        return _closure(c, m, coord) - target

    a, info, ier, _ = fsolve(resid, np.zeros(2), full_output=True, xtol=1e-14)
    if ier != 1 and np.max(np.abs(resid(a))) > 1e-13:
        raise NoConvergence("closure solve for the perturbed member failed")
    coord = base + a[0] * aux[0] + a[1] * aux[1]
    coord[-1] = coord[0]
    return _relift(c, m, coord)


def tilt(s: np.ndarray, center: float, half: float, period: Optional[float] = None) -> np.ndarray:
    """Compactly supported profile whose derivative is ``s - center`` on
    ``|s - center| <= half``, fading to zero by ``1.5 * half``."""
    d = s - center
    if period:
        d = (d + 0.5 * period) % period - 0.5 * period
    r = np.abs(d) / half
    plateau = np.where(r <= 1, 1.0, np.where(r < 1.5, 0.5 * (1 + np.cos(2 * np.pi * (r - 1))), 0.0))
    dpsi = d * plateau
    psi = np.concatenate([[0.0], np.cumsum(0.5 * (dpsi[1:] + dpsi[:-1]) * np.diff(s))])
    psi -= psi[0]
    if period:
        psi[-1] = psi[0]
    return psi


def family_distance(a: FamilyOfCurves, b: FamilyOfCurves) -> tuple[float, float]:
    """(C^0, finite-difference C^1) distance between two families."""
    d0 = max(float(np.max(np.abs(p.points - q.points))) for p, q in zip(a.curves, b.curves))
    d1 = max(float(np.max(np.abs(tangent_data(p)[0] - tangent_data(q)[0]))) for p, q in zip(a.curves, b.curves))
    return d0, d1


def make_generic(
    fam: FamilyOfCurves,
    m: EngelModel,
    delta: float,
    tol_angle: float = TOL_ANGLE,
    tol_deriv: Optional[float] = None,
    seed: int = 0,
    max_tries: int = 12,
) -> FamilyOfCurves:
    """Perturb a family so its tangency set in (k, s) is cut out transversally.

    The coordinate whose derivative is the complement frame component (x for
    Darboux, t for Lorentzian) receives a smooth bump over each degenerate
    region; the remaining coordinates are re-integrated so members stay
    horizontal. Closed members get two extra bumps, solved for, that restore
    closure.
    """
    from .errors import BudgetExceeded, EverywhereTangentMember
    from .loops import bump, transverse_windows

    if delta <= 0:
        raise ValueError("delta must be positive")
    if m.kind not in ("Darboux", "Lorentzian"):
        raise NotImplementedError("make_generic supports the Darboux and Lorentzian models")
    for c in fam.curves:
        if tangency_locus(c, m, tol_angle).cls == EVERYWHERE_TANGENT:
            raise EverywhereTangentMember("family contains a kernel orbit")
    bad = degenerate_cells(fam, m, tol_angle, tol_deriv)
    if not bad.any():
        return fam

    c0 = fam.curves[0]
    s = c0.params
    closed = c0.closed
    h = float(np.min(np.diff(s)))
    col = 0 if m.kind == "Darboux" else 3
    regions = [(s[i], s[j]) for i, j in _runs(bad.any(axis=0), closed)]
    rng = np.random.default_rng(seed)
    aux = None
    if closed:
        win = transverse_windows(s, c0.points[:, col], width=0.04)
        if len(win) < 2:
            raise BudgetExceeded("no transverse room for closing bumps")
        aux = [bump(s, cw, w) for cw, w in win]
    period = (s[-1] - s[0]) if closed else None

    for attempt in range(max_tries):
        psi = np.zeros_like(s)
        for a, b in regions:
            if b < a:
                b += period
            half = 0.5 * (b - a) + 0.25 * (b - a) + 4 * h
            center = 0.5 * (a + b) + (0.0 if attempt == 0 else rng.uniform(-0.1, 0.1) * half)
            if not closed and min(center - s[0], s[-1] - center) < 1.5 * half + 2 * h:
                raise BudgetExceeded("degenerate region too close to the curve end")
            psi += tilt(s, center, half, period)
        # probe the linear response, then use most of the budget
        probe = 1e-3 * delta
        trial = FamilyOfCurves(fam.k_grid, [_perturbed_member(c, m, col, psi, probe, aux) for c in fam.curves])
        d0, d1 = family_distance(fam, trial)
        scale = max(d0, d1) / probe
        if scale == 0:
            continue
        eps = 0.9 * delta / scale * (1.0 if attempt < 2 else rng.uniform(0.3, 1.0))
        out = FamilyOfCurves(fam.k_grid, [_perturbed_member(c, m, col, psi, eps, aux) for c in fam.curves])
        d0, d1 = family_distance(fam, out)
        if max(d0, d1) > delta:
            continue
        if degenerate_cells(out, m, tol_angle, tol_deriv).any():
            continue
        if any(tangency_locus(c, m, tol_angle).cls == EVERYWHERE_TANGENT for c in out.curves):
            continue
        return out
    raise BudgetExceeded(f"transversality not reached within delta={delta:g}")


# ---------------------------------------------------------------------------
# transversality of maps to the distribution


def annihilator(m: EngelModel, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two covectors spanning the annihilator of the distribution at ``pts``."""
    if m.coframe_fn is not None:
        return m.coframe(pts)
    fr = m.frame(pts)
    A = np.stack([fr.v1, fr.v2], axis=-2)
    _, _, Vt = np.linalg.svd(A)
    return Vt[..., 2, :], Vt[..., 3, :]


def transverse_residual(surface: np.ndarray, m: EngelModel, axes: Optional[Sequence[np.ndarray]] = None) -> float:
    """Smallest singular value of ``TV -> TM -> TM/D`` over interior grid points.

    ``surface`` has shape ``(n1, ..., nd, 4)``; ``axes`` are the coordinate
    grids of the domain (default ``linspace(0, 1, ni)``).
    """
    from .errors import SubcriticalDomain

    F = np.asarray(surface, dtype=float)
    d = F.ndim - 1
    if d < 2:
        raise SubcriticalDomain("the domain must be at least 2-dimensional")
    if d > 3:
        raise ValueError("domain dimension must be 2 or 3")
    if axes is None:
        axes = [np.linspace(0.0, 1.0, k) for k in F.shape[:-1]]
    inner = tuple(slice(1, -1) for _ in range(d))
    cols = []
    for i in range(d):
        hi = [slice(1, -1)] * d
        lo = [slice(1, -1)] * d
        hi[i] = slice(2, None)
        lo[i] = slice(None, -2)
        step = (axes[i][2:] - axes[i][:-2]).reshape([-1 if j == i else 1 for j in range(d)] + [1])
        cols.append((F[tuple(hi)] - F[tuple(lo)]) / step)
    P = F[inner]
    a, b = annihilator(m, P)
    M = np.stack(
        [np.stack([np.sum(a * v, axis=-1) for v in cols], axis=-1), np.stack([np.sum(b * v, axis=-1) for v in cols], axis=-1)],
        axis=-2,
    )
    sv = np.linalg.svd(M, compute_uv=False)
    return float(np.min(sv[..., -1]))
