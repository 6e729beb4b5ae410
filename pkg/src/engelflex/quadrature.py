"""Path integrals of ``g dx`` along sampled curves.

Two rules live here. ``trapezoid`` is the plain composite rule. ``leapfrog``
builds the running integral ``I`` so that its centred difference matches the
integrand exactly, ``I[k+1] - I[k-1] == g[k] * (x[k+1] - x[k-1])``. Lifting
with it gives curves whose centred-difference horizontality residual is zero
to rounding, whatever the sampling density.

For a closed curve with an odd number of distinct samples, the leapfrog
recurrence runs as a single chain through every index. The lift then closes
exactly when the trapezoid value of the loop integral is zero, and its end
defect always equals that trapezoid value.
"""

from __future__ import annotations

import numpy as np


def trapezoid(g: np.ndarray, x: np.ndarray) -> float:
    """Composite trapezoid value of the path integral of ``g dx``."""
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(0.5 * np.sum((g[1:] + g[:-1]) * np.diff(x)))


def cumulative_trapezoid(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(g)
    out[1:] = np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(x))
    return out


def leapfrog(g: np.ndarray, x: np.ndarray, closed: bool = False) -> np.ndarray:
    """Running integral of ``g dx`` on the stored samples, starting at 0.

    ``closed`` means the last stored sample repeats the first. With an odd
    number of distinct samples the odd chain is offset so that the end value
    equals the trapezoid loop integral; otherwise the first step is a
    trapezoid step.
    """
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    n = len(g)
    out = np.zeros(n)
    if n < 2:
        return out
    if n == 2:
        out[1] = 0.5 * (g[0] + g[1]) * (x[1] - x[0])
        return out
    # dk = x[k+1] - x[k-1] for k = 1..n-2
    inc = g[1:-1] * (x[2:] - x[:-2])
    m = n - 1
    if closed and m % 2 == 1:
        d0 = x[1] - x[m - 1]
        total = g[0] * d0 + np.sum(inc)
        area = 0.5 * total
        even_sum = np.sum(inc[1::2])  # k = 2, 4, ..., m-1
        out[1] = area - even_sum
    else:
        out[1] = 0.5 * (g[0] + g[1]) * (x[1] - x[0])
    # even chain uses odd k, odd chain uses even k
    out[2::2] = out[0] + np.cumsum(inc[0::2])
    out[3::2] = out[1] + np.cumsum(inc[1::2])[: len(out[3::2])]
    return out


def loop_integral(g: np.ndarray, x: np.ndarray) -> float:
    """Trapezoid loop integral on a closed sample array (last == first)."""
    return trapezoid(g, x)
