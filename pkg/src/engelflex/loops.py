"""Generators of closed horizontal loops in the Darboux model.

A loop is specified by its (x, t) projection. Two localized bumps in t,
placed where |x'| is large, make both loop integrals of ``t dx`` and
``z dx`` vanish; the areas are linear in the bump amplitudes so this is a
2x2 linear solve. The bumps live where the (x, t) curve is transverse to the
t-direction, so they change neither the immersion nor the rotation number.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .curves import SampledCurve
from .errors import NotImmersed, NumericallyDegenerate
from .quadrature import leapfrog, loop_integral

DEFAULT_SAMPLES = 2048  # stored samples; 2047 distinct, odd, as the closed lift needs


def bump(s: np.ndarray, center: float, width: float, period: Optional[float] = 1.0) -> np.ndarray:
    """``(1 - u^2)^4`` on ``|u| < 1`` with ``u = (s - center) / width``."""
    d = s - center
    if period:
        d = (d + 0.5 * period) % period - 0.5 * period
    u = d / width
    return np.where(np.abs(u) < 1, (1 - u * u) ** 4, 0.0)


def periodic_derivative(v: np.ndarray, s: np.ndarray) -> np.ndarray:
    m = len(v) - 1
    period = s[-1] - s[0]
    core = v[:m]
    sp = np.roll(s[:m], 1)
    sp[0] -= period
    sn = np.roll(s[:m], -1)
    sn[-1] += period
    d = (np.roll(core, -1) - np.roll(core, 1)) / (sn - sp)
    return np.append(d, d[0])


def window_candidates(
    s: np.ndarray, x: np.ndarray, width: float, frac: float = 0.5, count: int = 32, ref: str = "max"
) -> list[int]:
    """Sample indices whose window of half-width ``width`` keeps
    ``|x'| >= frac * ref`` throughout, thinned to at most ``count``; ``ref``
    is ``max|x'|`` or ``median|x'|``."""
    xp = np.abs(periodic_derivative(x, s))[:-1]
    ok = xp >= frac * (np.median(xp) if ref == "median" else xp.max())
    m = len(ok)
    h = (s[-1] - s[0]) / m
    half = max(2, int(np.ceil(width / h)))
    good = [i for i in range(m) if ok[np.arange(i - half, i + half + 1) % m].all()]
    if len(good) > count:
        good = [good[int(j)] for j in np.linspace(0, len(good) - 1, count)]
    return good


def transverse_windows(s: np.ndarray, x: np.ndarray, width: float = 0.06, frac: float = 0.5) -> list[tuple[float, float]]:
    """Two windows ``(center, width)`` in the transverse part of the loop,
    chosen so the closing solve is as well conditioned as possible."""
    cand = window_candidates(s, x, width, frac)
    if len(cand) < 2:
        return []
    cols = np.array([_areas(x, bump(s, s[i], width)) for i in cand])
    det = np.abs(cols[:, None, 0] * cols[None, :, 1] - cols[:, None, 1] * cols[None, :, 0])
    i, j = np.unravel_index(np.argmax(det), det.shape)
    if det[i, j] == 0:
        return []
    return [(float(s[cand[i]]), width), (float(s[cand[j]]), width)]


def lift_xt(s, x, t, y0: float = 0.0, z0: float = 0.0, closed: bool = True) -> SampledCurve:
    """Horizontal curve with ``z = z0 + int t dx`` and ``y = y0 + int z dx``."""
    z = z0 + leapfrog(t, x, closed=closed)
    y = y0 + leapfrog(z, x, closed=closed)
    pts = np.column_stack([x, y, z, t])
    if closed:
        pts[-1] = pts[0]
    return SampledCurve(np.asarray(s, dtype=float), pts, closed)


def _areas(x, t):
    z = leapfrog(t, x, closed=True)
    return np.array([loop_integral(t, x), loop_integral(z, x)])


def closing_bumps(s, x, t, windows: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    """Amplitudes and the corrected t making both loop integrals vanish."""
    B = [bump(s, c, w) for c, w in windows]
    base = _areas(x, t)
    M = np.column_stack([_areas(x, b) for b in B])
    if np.linalg.cond(M) > 1e10:
        raise NumericallyDegenerate("closing bumps are linearly dependent")
    amp = np.linalg.solve(M, -base)
    t_new = t + sum(a * b for a, b in zip(amp, B))
    t_new[-1] = t_new[0]
    return amp, t_new


def close_loop(s, x, t, y0=0.0, z0=0.0, windows=None) -> SampledCurve:
    if windows is None:
        for w in (0.06, 0.04, 0.025, 0.015):
            windows = transverse_windows(s, x, width=w)
            if len(windows) >= 2:
                break
    if len(windows) < 2:
        raise NumericallyDegenerate("no room for two closing bumps")
    _, t_new = closing_bumps(s, x, t, windows)
    return lift_xt(s, x, t_new, y0, z0)


def standard_xt(n: int, samples: int = DEFAULT_SAMPLES) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, t) loop whose tangent winds ``n`` times in the (t', x') plane."""
    s = np.linspace(0.0, 1.0, samples)
    if n == 0:
        x = np.sin(2 * np.pi * s)
        t = 0.5 * np.sin(4 * np.pi * s)
    else:
        phi = 2 * np.pi * abs(n) * s
        x = np.cos(phi)
        t = -np.sign(n) * np.sin(phi)
    x[-1], t[-1] = x[0], t[0]
    return s, x, t


def standard_loop(n: int, samples: int = DEFAULT_SAMPLES, y0: float = 0.0, z0: float = 0.0) -> SampledCurve:
    """Closed horizontal loop with rotation number ``n``."""
    s, x, t = standard_xt(n, samples)
    return close_loop(s, x, t, y0, z0)


def random_xt(
    n: int, rng: np.random.Generator, samples: int = DEFAULT_SAMPLES, amp: float = 0.15, modes: int = 3
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Standard (x, t) loop plus a random smooth perturbation and offset.

    The perturbation is small in C^1 compared to the base speed, so the
    rotation number is unchanged.
    """
    s, x, t = standard_xt(n, samples)
    k0 = max(abs(n), 1)
    for j in range(1, modes + 1):
        a = rng.normal(size=4) * amp / (j * j * (1 + j / k0))
        x = x + a[0] * np.cos(2 * np.pi * j * s) + a[1] * np.sin(2 * np.pi * j * s)
        t = t + a[2] * np.cos(2 * np.pi * j * s) + a[3] * np.sin(2 * np.pi * j * s)
    scale = np.exp(rng.uniform(-0.2, 0.2))
    x = scale * x + rng.uniform(-0.5, 0.5)
    t = scale * t + rng.uniform(-0.2, 0.2)
    x[-1], t[-1] = x[0], t[0]
    return s, x, t


def random_loop(n: int, rng: np.random.Generator, samples: int = DEFAULT_SAMPLES) -> SampledCurve:
    s, x, t = random_xt(n, rng, samples)
    xp = periodic_derivative(x, s)
    tp = periodic_derivative(t, s)
    if np.min(np.hypot(xp, tp)) < 1e-3:
        raise NotImmersed("random loop lost immersion")
    return close_loop(s, x, t, y0=float(rng.uniform(-1, 1)), z0=float(rng.uniform(-1, 1)))


def degenerate_family(
    model: str = "darboux",
    center: float = 0.5,
    half: float = 0.1,
    k0: float = 0.5,
    k_range: tuple[float, float] = (0.3, 0.7),
    n_k: int = 9,
    samples: int = DEFAULT_SAMPLES,
):
    """One-parameter family of open horizontal curves whose member ``k0`` is
    tangent to the kernel on ``[center - half, center + half]``.

    The kernel-tangency coordinate (x for Darboux, t for Lorentzian) has
    derivative ``10 max(0, |s - center| - half)^2 + (k - k0)^2``, so the
    tangency set in (k, s) is degenerate: both the s- and k-derivatives of
    the indicator vanish on the plateau.
    """
    from .curves import FamilyOfCurves
    from .quadrature import cumulative_trapezoid

    s = np.linspace(0.0, 1.0, samples)
    ks = np.linspace(k_range[0], k_range[1], n_k)
    curves = []
    for k in ks:
        rate = 10 * np.maximum(0.0, np.abs(s - center) - half) ** 2 + (k - k0) ** 2
        if model.lower() == "darboux":
            curves.append(lift_xt(s, cumulative_trapezoid(rate, s), s - center, closed=False))
        elif model.lower() == "lorentzian":
            x = s.copy()
            t = cumulative_trapezoid(rate, s) - 0.05
            y = leapfrog(t, x)
            z = leapfrog(t * t, x)
            curves.append(SampledCurve(s.copy(), np.column_stack([x, y, z, t]), False))
        else:
            raise ValueError(f"no degenerate family for model {model!r}")
    return FamilyOfCurves(ks, curves)
