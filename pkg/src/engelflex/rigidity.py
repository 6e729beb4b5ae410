"""Rigidity checks and explicit deformations of kernel orbits in mapping tori.

A deformation of the orbit ``t -> (0, 0, 0, t)`` is a curve
``eta(theta) = (x, y, z, theta)`` whose front ``(x, z)`` has tangent line at
angle ``f(theta)`` and whose y is the integral of ``z dx``. Fronts are built
from a signed speed ``s = sum_j w_j b_j`` along the direction
``(cos f, sin f)``; endpoint conditions are linear in ``w`` and the
y-increment is a quadratic form in ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev

from .curves import SampledCurve, horizontality_residual, tangent_data
from .errors import (
    AngleMismatch,
    BadAngle,
    Infeasible,
    NoConvergence,
    StrictConformal,
)
from .fronts import Front
from .models import (
    Contactomorphism3,
    EngelModel,
    contact_conformal_factor,
    example4_scaling,
    example5_psi,
    linear_turning,
    mapping_torus,
    smallest_turning,
)
from .quadrature import cumulative_trapezoid, leapfrog

SAMPLES = 2048
N_BASIS = 10
ANGLE_TOL = 1e-6


@dataclass
class TorusDeformation:
    front: Front
    reconstructed: SampledCurve
    closure_defect: float
    angle_residual: float = 0.0
    y_residual: float = 0.0
    model: Optional[EngelModel] = None
    info: dict = field(default_factory=dict)

    @property
    def y0(self) -> float:
        return float(self.reconstructed.y[0])

    @property
    def y1(self) -> float:
        return float(self.reconstructed.y[-1])


# ---------------------------------------------------------------------------
# no deformation with fixed ends


@dataclass
class Lemma2Result:
    x: np.ndarray
    t: np.ndarray
    defect: float
    max_abs_t: float
    best_start: int
    start_max_abs_t: list[float]
    iterations: list[int]


def lemma2_search(
    z0: float,
    z1: float,
    interval: tuple[float, float] = (0.0, 1.0),
    n_starts: int = 20,
    seed: int = 0,
    grid: int = 512,
    max_iter: int = 10_000,
    step: float = 0.5,
    tol: float = 1e-14,
) -> Lemma2Result:
    """Projected-gradient search for t(x) with ``int t^2 dx = z1 - z0``.

    The objective is the weighted variance of t (it prefers the flattest
    deformation); each iterate is projected radially onto the quadric
    ``sum w_i t_i^2 = z1 - z0``. When ``z1 = z0`` the quadric is the single
    point ``t = 0``.
    """
    a, b = interval
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    if n_starts < 1:
        raise ValueError("n_starts must be positive")
    target = z1 - z0
    if target < 0:
        raise Infeasible("int t^2 dx is non-negative, so z1 < z0 is unreachable")
    x = np.linspace(a, b, grid)
    w = np.zeros(grid)
    dx = np.diff(x)
    w[:-1] += dx / 2
    w[1:] += dx / 2

    def project(t):
        q = float(np.sum(w * t * t))
        if target == 0 or q == 0:
            return np.zeros_like(t) if target == 0 else np.full_like(t, np.sqrt(target / (b - a)))
        return t * np.sqrt(target / q)

    rng = np.random.default_rng(seed)
    results = []
    for k in range(n_starts):
        t = project(rng.normal(size=grid))
        for it in range(1, max_iter + 1):
            mean = np.sum(w * t) / (b - a)
            nxt = project(t - step * (t - mean))
            if np.max(np.abs(nxt - t)) < tol:
                t = nxt
                break
            t = nxt
        else:
            raise NoConvergence(f"start {k} hit the iteration cap")
        defect = abs(float(np.sum(w * t * t)) - target)
        results.append((defect, k, t, it))
    defect, k, t, _ = min(results, key=lambda r: (r[0], r[1]))
    return Lemma2Result(
        x, t, defect, float(np.max(np.abs(t))), k,
        [float(np.max(np.abs(r[2]))) for r in results], [r[3] for r in results],
    )


# ---------------------------------------------------------------------------
# fronts with prescribed line angle


def speed_basis(theta: np.ndarray, n: int = N_BASIS) -> np.ndarray:
    """``e(theta)^2 T_j(2 theta - 1)`` with ``e`` a parabola vanishing at the
    second and second-to-last samples. The speed is then zero on the two
    end samples at each side, so the discrete front is exactly tangent to
    its line field there as well, and the deformation leaves the orbit
    tangentially."""
    a, b = theta[1], theta[-2]
    env = np.clip((theta - a) * (b - theta), 0.0, None) ** 2
    u = 2 * theta - 1
    return np.array([env * chebyshev.chebval(u, np.eye(n)[j]) for j in range(n)])


@dataclass
class _Builder:
    theta: np.ndarray
    angle: np.ndarray
    basis: np.ndarray
    xs: np.ndarray  # per-basis x increments
    zs: np.ndarray
    Q: np.ndarray  # y-increment quadratic form
    E: np.ndarray  # w -> (x(1) - x(0), z(1) - z(0), last x chord, last z chord)

    @classmethod
    def make(cls, angle_fn, samples: int = SAMPLES, n: int = N_BASIS) -> "_Builder":
        theta = np.linspace(0.0, 1.0, samples)
        angle = angle_fn(theta)
        B = speed_basis(theta, n)
        xs = np.array([leapfrog(b * np.cos(angle), theta) for b in B])
        zs = np.array([leapfrog(b * np.sin(angle), theta) for b in B])
        Q = np.array([[leapfrog(zi, xj)[-1] for xj in xs] for zi in zs])
        Q = 0.5 * (Q + Q.T)
        # the last chord joins the two leapfrog chains; pinning it to zero
        # keeps the one-sided end tangent exactly on the line field
        E = np.array([xs[:, -1], zs[:, -1], xs[:, -1] - xs[:, -2], zs[:, -1] - zs[:, -2]])
        return cls(theta, angle, B, xs, zs, Q, E)

    def curve(self, w, p0, y0):
        x = p0[0] + w @ self.xs
        z = p0[1] + w @ self.zs
        y = y0 + leapfrog(z, x)
        return x, y, z

    def dy(self, w, p0) -> float:
        x = p0[0] + w @ self.xs
        z = p0[1] + w @ self.zs
        return float(leapfrog(z, x)[-1])

    def null(self) -> np.ndarray:
        _, _, Vt = np.linalg.svd(self.E)
        return Vt[len(self.E):].T


def _closed_front_weights(bld: _Builder, area: float) -> np.ndarray:
    """Weights of a front returning to its start with y-increment ``area``."""
    N = bld.null()
    QN = N.T @ bld.Q @ N
    vals, vecs = np.linalg.eigh(QN)
    j = int(np.argmax(vals)) if area > 0 else int(np.argmin(vals))
    lam = vals[j]
    if lam * area <= 0:
        raise NoConvergence("no closed front with an area of the required sign")
    w = N @ vecs[:, j] * np.sqrt(area / lam)
    if w[np.argmax(np.abs(w))] < 0:
        w = -w
    got = bld.dy(w, (0.0, 0.0))
    return w * np.sqrt(area / got)


def _deformation_from(bld, w, p0, y0, model, phi) -> TorusDeformation:
    x, y, z = bld.curve(w, p0, y0)
    pts = np.column_stack([x, z])
    speed = w @ bld.basis
    inner = np.flatnonzero(speed[:-1] * speed[1:] < 0)
    cusps = [float(bld.theta[i] - speed[i] * (bld.theta[i + 1] - bld.theta[i]) / (speed[i + 1] - speed[i])) for i in inner]
    front = Front(bld.theta, pts, cusps)
    return torus_reconstruct(front, model, y0, phi=phi)


def torus_reconstruct(
    front: Front,
    m: EngelModel,
    y0: float,
    phi: Optional[Contactomorphism3] = None,
    angle_tol: float = ANGLE_TOL,
    speed_rel: float = 1e-3,
) -> TorusDeformation:
    """Lift a front parametrized by theta in [0, 1] to ``eta = (x, y, z, theta)``.

    Checks that the front's tangent line has angle ``f`` (skipping samples
    whose chord speed is below ``speed_rel`` of the maximum, i.e. near
    cusps) and evaluates ``|phi(eta(1)) - eta(0)|``.
    """
    if m.turning is None:
        raise ValueError("torus reconstruction needs a mapping-torus model")
    phi = phi or m.return_map
    th = front.params
    x, z = front.x, front.z
    y = y0 + leapfrog(z, x)
    P = np.column_stack([x, y, z, th])
    curve = SampledCurve(th, P, False)
    T, at = tangent_data(curve)
    f = m.turning(at[:, 0], at[:, 1], at[:, 2], at[:, 3])
    sp = np.hypot(T[:, 0], T[:, 2])
    ok = sp > speed_rel * sp.max() if sp.max() > 0 else np.zeros(len(sp), dtype=bool)
    res = np.abs(T[:, 0] * np.sin(f) - T[:, 2] * np.cos(f))
    angle_res = float(np.max(res[ok] / sp[ok])) if ok.any() else 0.0
    if angle_res > angle_tol:
        raise AngleMismatch(f"front angle residual {angle_res:.3g}")
    y_res = float(np.max(np.abs((y - y0) - cumulative_trapezoid(z, x))))
    end = phi(P[-1, :3])
    defect = float(np.max(np.abs(end - P[0, :3])))
    return TorusDeformation(front, curve, defect, angle_res, y_res, m)


# ---------------------------------------------------------------------------
# the examples


def orbit_deformation(m: EngelModel, samples: int = SAMPLES) -> TorusDeformation:
    """The undeformed kernel orbit through the origin."""
    th = np.linspace(0.0, 1.0, samples)
    front = Front(th, np.zeros((samples, 2)))
    return torus_reconstruct(front, m, 0.0)


def build_example4(A: float, samples: int = SAMPLES) -> TorusDeformation:
    """Closed front with turning pi and area A; y(0) = A, y(1) = 2A, so the
    return map (x, y, z) -> (x, y/2, z/2) closes the curve."""
    if A < 0:
        raise ValueError("A must be non-negative")
    phi = example4_scaling()
    m = mapping_torus({"linear": np.pi}, phi)
    if A == 0:
        return orbit_deformation(m, samples)
    bld = _Builder.make(lambda th: np.pi * th, samples)
    w = _closed_front_weights(bld, A)
    d = _deformation_from(bld, w, (0.0, 0.0), A, m, phi)
    d.info.update(area=A, turning=np.pi)
    return d


def example5_endpoints(alpha: float, r: float) -> tuple[np.ndarray, np.ndarray]:
    p1 = r * np.array([np.sin(alpha / 2), np.cos(alpha / 2)])
    p0 = r * np.array([np.sin(1.5 * alpha), np.cos(1.5 * alpha)])
    return p0, p1


def example5_area_identity(alpha: float, r: float) -> tuple[float, float]:
    """(closed-form right-hand side, integral of z dx over P0 -> 0 -> P1)."""
    (x0, z0), (x1, z1) = example5_endpoints(alpha, r)
    sa, ca = np.sin(alpha), np.cos(alpha)
    rhs = sa * sa * z1 * x1 - 0.5 * ca * sa * (z1 * z1 - x1 * x1)
    poly = np.array([[x0, z0], [0.0, 0.0], [x1, z1]])
    segs = 0.5 * (poly[1:, 1] + poly[:-1, 1]) * np.diff(poly[:, 0])
    return float(rhs), float(np.sum(segs))


def _affine_area_solve(bld: _Builder, wp: np.ndarray, p0, target: float) -> np.ndarray:
    """Weights in ``wp + null(E)`` with y-increment ``target``.

    The y-increment is a convex quadratic on the affine set (the area form
    restricted to closed fronts is positive here), so moving from ``wp``
    towards its minimizer, or away from it along the top eigenvector, hits
    every value above the minimum; each move is a scalar quadratic.
    """
    N = bld.null()
    QN = N.T @ bld.Q @ N
    g = np.array([0.5 * (bld.dy(wp + n, p0) - bld.dy(wp - n, p0)) for n in N.T])
    base = bld.dy(wp, p0)
    if target < base:
        u = -np.linalg.lstsq(2 * QN, g, rcond=1e-12)[0]
        v = N @ u
    else:
        vals, vecs = np.linalg.eigh(QN)
        v = N @ vecs[:, -1]
    cp, cm = bld.dy(wp + v, p0), bld.dy(wp - v, p0)
    qa, qb, qc = 0.5 * (cp + cm) - base, 0.5 * (cp - cm), base - target
    disc = qb * qb - 4 * qa * qc
    if qa <= 0 or disc < 0:
        raise NoConvergence("no front with the required area in this family")
    roots = [(-qb + sgn * np.sqrt(disc)) / (2 * qa) for sgn in (1, -1)]
    return wp + min(roots, key=abs) * v


def build_example5(alpha: float, r: float = 1.0, samples: int = SAMPLES, y0: float = 0.0) -> TorusDeformation:
    """Front from P0 to P1 with line angle alpha*theta whose z dx integral
    matches the y-shift of the strict return map psi."""
    if not (0 < alpha < np.pi):
        raise BadAngle("alpha must lie in (0, pi)")
    if r <= 0:
        raise ValueError("r must be positive")
    psi = example5_psi(alpha)
    m = mapping_torus({"linear": alpha}, psi)
    rhs, poly = example5_area_identity(alpha, r)
    if abs(rhs - poly) > 1e-12 * max(1.0, r * r):
        raise NoConvergence("area identity failed")
    p0, p1 = example5_endpoints(alpha, r)
    bld = _Builder.make(lambda th: alpha * th, samples)
    wp = np.linalg.lstsq(bld.E, np.r_[p1 - p0, 0.0, 0.0], rcond=None)[0]
    w = _affine_area_solve(bld, wp, p0, rhs)
    d = _deformation_from(bld, w, p0, y0, m, psi)
    d.info.update(area=rhs, polyline_area=poly, alpha=alpha, r=r)
    return d


def random_linear_contact(c: float, rng: np.random.Generator) -> Contactomorphism3:
    """Linear contactomorphism with conformal factor ``c > 0``."""
    from .models import linear_contactomorphism

    def rot(a):
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])

    s = rng.uniform(-0.5, 0.5)
    A = np.sqrt(c) * rot(rng.uniform(0, 2 * np.pi)) @ np.diag([np.exp(s), np.exp(-s)]) @ rot(rng.uniform(0, 2 * np.pi))
    return linear_contactomorphism(A, "linear")


def prop7_deform(phi: Contactomorphism3, area: float = 0.05, samples: int = SAMPLES) -> TorusDeformation:
    """Closed-front deformation over the origin for a non-strict linear return.

    With turning F the smallest angle compatible with ``phi``, and a front
    closing at the origin with area ``area``, ``y(1) = area / (1 - c)`` and
    ``y(0) = c y(1)``.
    """
    if phi.matrix is None:
        raise ValueError("prop7_deform needs a linear contactomorphism")
    c = contact_conformal_factor(phi, np.zeros(3))
    if abs(c - 1) <= 1e-6:
        raise StrictConformal(f"conformal factor {c:.9g} is 1")
    F = smallest_turning(phi)
    m = mapping_torus({"linear": F}, phi)
    bld = _Builder.make(lambda th: F * th, samples)
    try:
        w = _closed_front_weights(bld, area)
    except NoConvergence:
        area = -area
        w = _closed_front_weights(bld, area)
    y1 = area / (1 - c)
    d = _deformation_from(bld, w, (0.0, 0.0), c * y1, m, phi)
    d.info.update(area=area, conformal_factor=c, turning=F)
    return d


def deformation_residual(d: TorusDeformation) -> float:
    return horizontality_residual(d.reconstructed, d.model)
