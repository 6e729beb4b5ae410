"""Projection of Darboux horizontal curves to Legendrian curves of
``ker(dz - t dx)`` and the integral lift back."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import SampledCurve, horizontality_residual
from .errors import NotClosed, NotHorizontal, NotLegendrian
from .models import darboux
from .quadrature import leapfrog, loop_integral

LEGENDRIAN_TOL = 1e-6
HORIZONTAL_TOL = 1e-6
AREA_CLOSE_TOL = 1e-10


@dataclass
class LegendrianCurve:
    params: np.ndarray
    points: np.ndarray  # (n, 3), columns x, z, t
    closed: bool = False

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {self.points.shape}")
        if len(self.params) != len(self.points):
            raise ValueError("params and points differ in length")
        if self.closed and np.max(np.abs(self.points[-1] - self.points[0])) > 1e-10:
            raise NotClosed("closed Legendrian endpoints differ")

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def z(self):
        return self.points[:, 1]

    @property
    def t(self):
        return self.points[:, 2]

    def residual(self) -> float:
        """max |z' - t x'| / (|x'| + |z'| + |t'|) with centred differences."""
        as4 = np.column_stack([self.x, np.zeros(len(self.x)), self.z, self.t])
        from .curves import tangent_data

        T, at = tangent_data(SampledCurve(self.params, as4, self.closed))
        num = np.abs(T[:, 2] - at[:, 3] * T[:, 0])
        den = np.abs(T[:, 0]) + np.abs(T[:, 2]) + np.abs(T[:, 3])
        if np.any(den == 0):
            raise NotLegendrian("Legendrian curve has zero speed")
        return float(np.max(num / den))


def legendrian_from_xt(params, x, t, z0: float = 0.0, closed: bool = False) -> LegendrianCurve:
    """Legendrian curve with z obtained by integrating ``t dx``."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    z = z0 + leapfrog(t, x, closed=closed)
    if closed:
        if abs(z[-1] - z[0]) > AREA_CLOSE_TOL:
            raise NotClosed(f"loop integral of t dx is {z[-1] - z[0]:.3g}")
        z[-1] = z[0]
    return LegendrianCurve(params, np.column_stack([x, z, t]), closed)


def geiges_project(c: SampledCurve, tol: float = HORIZONTAL_TOL) -> LegendrianCurve:
    res = horizontality_residual(c, darboux())
    if res >= tol:
        raise NotHorizontal(f"horizontality residual {res:.3g}")
    return LegendrianCurve(c.params.copy(), c.points[:, [0, 2, 3]].copy(), c.closed)


def front_signed_area(l: LegendrianCurve) -> float:
    if not l.closed:
        raise NotClosed("signed area needs a closed curve")
    return loop_integral(l.z, l.x)


def geiges_lift(l: LegendrianCurve, y0: float = 0.0, tol: float = LEGENDRIAN_TOL) -> SampledCurve:
    """Horizontal lift with ``y = y0 + integral of z dx``.

    A closed Legendrian whose front area vanishes lifts to a closed curve;
    otherwise the lift is returned open with y-defect equal to the area.
    """
    res = l.residual()
    if res >= tol:
        raise NotLegendrian(f"Legendrian residual {res:.3g}")
    y = y0 + leapfrog(l.z, l.x, closed=l.closed)
    closed = False
    if l.closed and abs(y[-1] - y[0]) < AREA_CLOSE_TOL:
        y[-1] = y[0]
        closed = True
    pts = np.column_stack([l.x, y, l.z, l.t])
    return SampledCurve(l.params.copy(), pts, closed)


def lift_defect(c: SampledCurve) -> float:
    """y(end) - y(start) of a lift."""
    return float(c.y[-1] - c.y[0])
