"""Coordinate Engel models, bracket-based Engel checks and contact maps.

All frame and coframe functions are vectorised: they take points of shape
``(..., 4)`` ordered ``(x, y, z, t)`` and return arrays of the same leading
shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    NonFinitePoint,
    NotContact,
    NotEngel,
    RankAmbiguous,
    UnknownIdentifier,
)

VectorField = Callable[[np.ndarray], np.ndarray]
Turning = Callable[..., np.ndarray]

DARBOUX = "Darboux"
LORENTZIAN = "Lorentzian"
CARTAN_D0 = "CartanD0"
MAPPING_TORUS = "MappingTorus"
CUSTOM = "Custom"

RANK_THRESHOLD = 1e-6


@dataclass(frozen=True)
class Point4:
    x: float
    y: float
    z: float
    t: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.x, self.y, self.z, self.t])):
            raise NonFinitePoint(f"non-finite point {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.t], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Point4":
        a = np.asarray(a, dtype=float)
        return cls(*map(float, a))


def as_points(p) -> np.ndarray:
    if isinstance(p, Point4):
        p = p.as_array()
    a = np.asarray(p, dtype=float)
    if a.shape[-1] != 4:
        raise ValueError(f"expected trailing dimension 4, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinitePoint("point has non-finite coordinates")
    return a


@dataclass(frozen=True)
class Frame:
    v1: np.ndarray
    v2: np.ndarray

    def gram_det(self) -> np.ndarray:
        g11 = np.sum(self.v1 * self.v1, axis=-1)
        g22 = np.sum(self.v2 * self.v2, axis=-1)
        g12 = np.sum(self.v1 * self.v2, axis=-1)
        return g11 * g22 - g12 ** 2


# ---------------------------------------------------------------------------
# turning functions for mapping tori


def _pi_t(x, y, z, t):
    return np.pi * np.asarray(t, dtype=float) + 0.0 * np.asarray(x, dtype=float)


def _two_pi_t(x, y, z, t):
    return 2 * np.pi * np.asarray(t, dtype=float) + 0.0 * np.asarray(x, dtype=float)


TURNING_REGISTRY: dict[str, Turning] = {
    "pi_t": _pi_t,
    "two_pi_t": _two_pi_t,
}


def linear_turning(total: float) -> Turning:
    """``f = total * t``: a constant-rate Legendrian rotation."""

    def f(x, y, z, t):
        return total * np.asarray(t, dtype=float) + 0.0 * np.asarray(x, dtype=float)

    return f


def polynomial_turning(monomials: Sequence[Sequence[float]]) -> Turning:
    """Turning function from rows ``[ex, ey, ez, et, coeff]``."""
    rows = [tuple(r) for r in monomials]

    def f(x, y, z, t):
        x, y, z, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z, t)))
        out = np.zeros_like(x)
        for ex, ey, ez, et, c in rows:
            out = out + c * x ** int(ex) * y ** int(ey) * z ** int(ez) * t ** int(et)
        return out

    return f


def check_turning(
    f: Turning,
    bbox: Sequence[tuple[float, float]] = ((-1, 1), (-1, 1), (-1, 1)),
    grid: tuple[int, int, int, int] = (32, 32, 32, 64),
    h: float = 1e-6,
) -> float:
    """Spot-check ``f(., 0) = 0`` and ``d f / dt > 0`` on a grid.

    Returns the smallest sampled ``d f / dt``; raises ``NotEngel`` when the
    boundary data or the monotonicity fails.
    """
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(bbox, grid[:3])]
    ts = np.linspace(0.0, 1.0, grid[3])
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    X, Y, Z = X[..., None], Y[..., None], Z[..., None]
    f0 = f(X[..., 0], Y[..., 0], Z[..., 0], np.zeros_like(X[..., 0]))
    if np.max(np.abs(f0)) > 1e-12:
        raise NotEngel("turning function does not vanish at t = 0")
    T = ts[None, None, None, :]
    dft = (f(X, Y, Z, T + h) - f(X, Y, Z, T - h)) / (2 * h)
    worst = float(np.min(dft))
    if worst <= 0:
        raise NotEngel(f"turning function not increasing in t (min rate {worst:.3g})")
    return worst


# ---------------------------------------------------------------------------
# contactomorphisms of (R^3, ker(dy - z dx))


@dataclass(frozen=True)
class Contactomorphism3:
    """A self-map of (x, y, z)-space meant to preserve ``ker(dy - z dx)``."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)
    matrix: Optional[np.ndarray] = None  # (x, z)-linear part, when linear

    def __call__(self, q) -> np.ndarray:
        return self.fn(np.asarray(q, dtype=float))

    def jacobian(self, q, h: float = 1e-6) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.jac is not None:
            return self.jac(q)
        J = np.empty(q.shape + (3,))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            J[..., :, j] = (self.fn(q + e) - self.fn(q - e)) / (2 * h)
        return J

    def compose(self, other: "Contactomorphism3") -> "Contactomorphism3":
        """``self ∘ other``."""

        def fn(q):
            return self.fn(other.fn(q))

        def jac(q):
            return self.jacobian(other.fn(q)) @ other.jacobian(q)

        return Contactomorphism3(f"{self.name}∘{other.name}", fn, jac)


def linear_contactomorphism(A, name: str = "linear") -> Contactomorphism3:
    """Lift of a linear map ``A`` of the (x, z)-plane to a contactomorphism.

    The y-component is ``det(A) * y + Q(x, z)`` with the unique quadratic
    ``Q`` making the pullback of ``dy - z dx`` equal ``det(A) (dy - z dx)``.
    """
    A = np.asarray(A, dtype=float)
    (a11, a12), (a21, a22) = A
    c = float(np.linalg.det(A))
    qxx, qzz, qxz = a11 * a21 / 2, a12 * a22 / 2, a12 * a21

    def fn(q):
        x, y, z = q[..., 0], q[..., 1], q[..., 2]
        return np.stack(
            [a11 * x + a12 * z, c * y + qxx * x * x + qzz * z * z + qxz * x * z, a21 * x + a22 * z],
            axis=-1,
        )

    def jac(q):
        x, z = q[..., 0], q[..., 2]
        one = np.ones_like(x)
        zero = np.zeros_like(x)
        rows = [
            [a11 * one, zero, a12 * one],
            [2 * qxx * x + qxz * z, c * one, 2 * qzz * z + qxz * x],
            [a21 * one, zero, a22 * one],
        ]
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)

    return Contactomorphism3(name, fn, jac, {"matrix": A.tolist()}, A)


def identity_map() -> Contactomorphism3:
    return linear_contactomorphism(np.eye(2), "identity")


def example4_scaling() -> Contactomorphism3:
    """(x, y, z) -> (x, y/2, z/2)."""
    return linear_contactomorphism([[1.0, 0.0], [0.0, 0.5]], "example4")


def example5_psi(alpha: float) -> Contactomorphism3:
    """Lift of the rotation by ``-alpha`` in the (x, z)-plane, closed form."""
    ca, sa = np.cos(alpha), np.sin(alpha)

    def fn(q):
        x, y, z = q[..., 0], q[..., 1], q[..., 2]
        return np.stack(
            [
                ca * x + sa * z,
                y - sa * sa * z * x + 0.5 * ca * sa * (z * z - x * x),
                ca * z - sa * x,
            ],
            axis=-1,
        )

    def jac(q):
        x, z = q[..., 0], q[..., 2]
        one = np.ones_like(x)
        zero = np.zeros_like(x)
        rows = [
            [ca * one, zero, sa * one],
            [-sa * sa * z - ca * sa * x, one, -sa * sa * x + ca * sa * z],
            [-sa * one, zero, ca * one],
        ]
        return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)

    A = np.array([[ca, sa], [-sa, ca]])
    return Contactomorphism3("example5", fn, jac, {"alpha": float(alpha)}, A)


RETURN_MAP_REGISTRY: dict[str, Callable[..., Contactomorphism3]] = {
    "identity": lambda: identity_map(),
    "example4": lambda: example4_scaling(),
    "example5": lambda alpha: example5_psi(alpha),
    "linear": lambda matrix: linear_contactomorphism(matrix),
}


def contact_conformal_factor(phi: Contactomorphism3, q, tol: float = 1e-8) -> float:
    """``lambda(q)`` with ``phi^*(dy - z dx) = lambda (dy - z dx)`` at ``q``."""
    q = np.asarray(q, dtype=float)
    J = phi.jacobian(q)
    img = phi(q)
    pull = J[1, :] - img[2] * J[0, :]
    alpha0 = np.array([-q[2], 1.0, 0.0])
    lam = float(pull[1])
    transverse = float(np.max(np.abs(pull - lam * alpha0)))
    if transverse > tol * max(1.0, abs(lam)):
        raise NotContact(f"pullback transverse component {transverse:.3g} at {q.tolist()}")
    return lam


def smallest_turning(phi: Contactomorphism3) -> float:
    """Smallest positive total turning compatible with a linear return map.

    The Legendrian line at t = 1 must be the pullback of the line spanned by
    ``X = d/dx + z d/dy``; in the (X, Z) framing that is ``A^{-1} e_1``.
    """
    if phi.matrix is None:
        raise ValueError("smallest turning is only defined here for linear return maps")
    v = np.linalg.solve(phi.matrix, [1.0, 0.0])
    ang = float(np.arctan2(v[1], v[0])) % np.pi
    return np.pi if ang < 1e-12 else ang


# ---------------------------------------------------------------------------
# Engel models


@dataclass(frozen=True)
class EngelModel:
    kind: str
    frame_fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    coframe_fn: Optional[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = None
    kernel_index: Optional[int] = None
    turning: Optional[Turning] = None
    turning_spec: Optional[dict] = None
    return_map: Optional[Contactomorphism3] = None
    bbox: tuple = ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))

    def frame(self, p) -> Frame:
        a = as_points(p)
        v1, v2 = self.frame_fn(a)
        return Frame(v1, v2)

    def coframe(self, p) -> tuple[np.ndarray, np.ndarray]:
        if self.coframe_fn is None:
            raise NotImplementedError(f"{self.kind} model has no coframe")
        return self.coframe_fn(as_points(p))

    def oriented_frame(self, p) -> tuple[np.ndarray, np.ndarray]:
        """Frame ordered (kernel vector, complement), used for rotation numbers."""
        fr = self.frame(p)
        if self.kernel_index == 1:
            return fr.v2, fr.v1
        return fr.v1, fr.v2

    def kernel(self, p) -> np.ndarray:
        return self.oriented_frame(p)[0]

    @property
    def kernel_is_dt(self) -> bool:
        return self.kind in (DARBOUX, MAPPING_TORUS)


def eval_frame(model: EngelModel, p) -> Frame:
    a = as_points(p)
    if model.kind == MAPPING_TORUS and np.any((a[..., 3] < -1e-12) | (a[..., 3] > 1 + 1e-12)):
        raise ValueError("mapping torus frames are defined for t in [0, 1]")
    return model.frame(a)


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def darboux() -> EngelModel:
    def frame(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(o, o, o, i), _stack(i, z, t, o)

    def coframe(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(-z, i, o, o), _stack(-t, o, i, o)

    return EngelModel(DARBOUX, frame, coframe, kernel_index=0)


def lorentzian() -> EngelModel:
    def frame(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(o, o, o, i), _stack(i, t, t * t, o)

    def coframe(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(-t, i, o, o), _stack(-t * t, o, i, o)

    return EngelModel(LORENTZIAN, frame, coframe, kernel_index=1)


def cartan_d0() -> EngelModel:
    """Pullback of the Lorentzian model by the Cartan coordinate change.

    Coframe ``{dy + x dt, dz - 2t dy}``; kernel ``d/dx``.
    """

    def frame(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(o, -x, -2 * t * x, i), _stack(i, o, o, o)

    def coframe(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(o, i, o, x), _stack(o, -2 * t, i, o)

    return EngelModel(CARTAN_D0, frame, coframe, kernel_index=1)


def mapping_torus(
    turning: Turning | str | dict = "pi_t",
    return_map: Optional[Contactomorphism3] = None,
    bbox=((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)),
    check: bool = True,
    check_grid: tuple[int, int, int, int] = (32, 32, 32, 64),
) -> EngelModel:
    """Mapping-torus model with Legendrian line ``cos f X + sin f Z``.

    ``turning`` is a registry name, a ``{"monomials": [...]}`` dict, or a
    vectorised callable ``f(x, y, z, t)``.
    """
    spec: Optional[dict]
    if isinstance(turning, str):
        if turning not in TURNING_REGISTRY:
            raise UnknownIdentifier(f"unknown turning function {turning!r}")
        spec = {"id": turning}
        f = TURNING_REGISTRY[turning]
    elif isinstance(turning, dict):
        if "monomials" in turning:
            spec = {"monomials": [list(map(float, r)) for r in turning["monomials"]]}
            f = polynomial_turning(spec["monomials"])
        elif "linear" in turning:
            spec = {"linear": float(turning["linear"])}
            f = linear_turning(spec["linear"])
        elif "id" in turning:
            return mapping_torus(turning["id"], return_map, bbox, check, check_grid)
        else:
            raise UnknownIdentifier(f"unrecognised turning descriptor {turning!r}")
    else:
        spec = None
        f = turning
    if check:
        check_turning(f, bbox, check_grid)
    if return_map is None:
        return_map = identity_map()

    def frame(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        fv = f(x, y, z, t)
        c, s = np.cos(fv), np.sin(fv)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(o, o, o, i), _stack(c, z * c, s, o)

    def coframe(p):
        x, y, z, t = np.moveaxis(p, -1, 0)
        fv = f(x, y, z, t)
        o, i = np.zeros_like(x), np.ones_like(x)
        return _stack(-z, i, o, o), _stack(-np.sin(fv), o, np.cos(fv), o)

    return EngelModel(
        MAPPING_TORUS, frame, coframe, kernel_index=0, turning=f,
        turning_spec=spec, return_map=return_map, bbox=tuple(map(tuple, bbox)),
    )


def custom_model(v1: VectorField, v2: VectorField, kernel_index: Optional[int] = None) -> EngelModel:
    """A user frame on one chart; no coframe, used for bracket experiments."""

    def frame(p):
        return v1(p), v2(p)

    return EngelModel(CUSTOM, frame, None, kernel_index=kernel_index)


MODEL_BUILDERS = {
    DARBOUX: darboux,
    LORENTZIAN: lorentzian,
    CARTAN_D0: cartan_d0,
}


def get_model(name: str) -> EngelModel:
    norm = name.lower().replace("_", "")
    key = {k.lower(): k for k in MODEL_BUILDERS}.get(norm)
    if key is None:
        if norm in ("mappingtorus", "torus"):
            return mapping_torus()
        raise UnknownIdentifier(f"unknown model {name!r}")
    return MODEL_BUILDERS[key]()


# ---------------------------------------------------------------------------
# growth vector


@dataclass(frozen=True)
class GrowthVector:
    ranks: tuple[int, int, int]
    min_kept: float  # smallest retained singular value / threshold
    max_dropped: float  # largest discarded singular value / threshold (0 if none)

    def __iter__(self):
        return iter(self.ranks)

    def __eq__(self, other):
        if isinstance(other, GrowthVector):
            return self.ranks == other.ranks
        return self.ranks == tuple(other)

    def __hash__(self):
        return hash(self.ranks)


def _jacobian(F: VectorField, p: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Jacobian; ``p`` has shape ``(..., 4)``."""
    cols = []
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        cols.append((F(p + e) - F(p - e)) / (2 * h))
    return np.stack(cols, axis=-1)


def lie_bracket(V: VectorField, W: VectorField, h: float = 1e-4) -> VectorField:
    """``[V, W] = DW.V - DV.W`` with central-difference Jacobians."""

    def B(p):
        return np.einsum("...ij,...j->...i", _jacobian(W, p, h), V(p)) - np.einsum(
            "...ij,...j->...i", _jacobian(V, p, h), W(p)
        )

    return B


def _numerical_rank(vectors: Sequence[np.ndarray], threshold: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point rank of the column vectors, with the kept/dropped margins.

    Each vector has shape ``(N, 4)``; returns arrays of length N.
    """
    M = np.stack(vectors, axis=-1)  # (N, 4, k)
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    big = norms.max(axis=2, keepdims=True)
    keep = norms > threshold * big * 1e-3
    M = np.where(keep, M / np.where(keep, norms, 1.0), 0.0)
    sv = np.linalg.svd(M, compute_uv=False)
    rel = sv / sv[:, :1]
    kept = rel > 10 * threshold
    dropped = rel < threshold / 10
    bad = ~(kept | dropped)
    if bad.any():
        i = int(np.flatnonzero(bad.any(axis=1))[0])
        raise RankAmbiguous(f"singular values {rel[i]} inside the ambiguity band")
    min_kept = np.where(kept, rel, np.inf).min(axis=1) / threshold
    max_dropped = np.where(dropped, rel, 0.0).max(axis=1) / threshold
    return kept.sum(axis=1), min_kept, max_dropped


def growth_vectors(model: EngelModel, pts, h: float = 1e-4, threshold: float = RANK_THRESHOLD) -> list[GrowthVector]:
    """Ranks of D, D + [D, D] and the next bracket step at each point of ``pts``."""
    if not (0 < h <= 1e-2):
        raise ValueError("step size must lie in (0, 1e-2]")
    a = as_points(pts).reshape(-1, 4)

    def V1(q):
        return model.frame_fn(q)[0]

    def V2(q):
        return model.frame_fn(q)[1]

    V3 = lie_bracket(V1, V2, h)
    v1, v2, v3 = (np.broadcast_to(V(a), a.shape) for V in (V1, V2, V3))
    v4 = np.broadcast_to(lie_bracket(V1, V3, h)(a), a.shape)
    v5 = np.broadcast_to(lie_bracket(V2, V3, h)(a), a.shape)
    steps = [_numerical_rank(vs, threshold) for vs in ([v1, v2], [v1, v2, v3], [v1, v2, v3, v4, v5])]
    out = []
    for i in range(len(a)):
        ranks = tuple(int(r[0][i]) for r in steps)
        kept = min(float(r[1][i]) for r in steps)
        dropped = max(float(r[2][i]) for r in steps)
        out.append(GrowthVector(ranks, kept, dropped))
    return out


def growth_vector(model: EngelModel, p, h: float = 1e-4, threshold: float = RANK_THRESHOLD) -> GrowthVector:
    """Ranks of D, D + [D, D] and the next bracket step at ``p``."""
    return growth_vectors(model, np.reshape(as_points(p), (1, 4)), h, threshold)[0]


# ---------------------------------------------------------------------------
# Cartan change of coordinates


def cartan_change_of_coordinates(p) -> np.ndarray:
    """``(x, y, z, t) -> (x, y + t x, z + t^2 x, t)``."""
    a = as_points(p)
    x, y, z, t = np.moveaxis(a, -1, 0)
    return np.stack([x, y + t * x, z + t * t * x, t], axis=-1)


def cartan_change_jacobian(p) -> np.ndarray:
    a = as_points(p)
    x, y, z, t = np.moveaxis(a, -1, 0)
    o, i = np.zeros_like(x), np.ones_like(x)
    rows = [
        [i, o, o, o],
        [t, i, o, x],
        [t * t, o, i, 2 * t * x],
        [o, o, o, i],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def intertwining_residual(p) -> float:
    """Lorentzian coframe applied to the pushed-forward CartanD0 frame."""
    a = as_points(p)
    fr = cartan_d0().frame(a)
    J = cartan_change_jacobian(a)
    img = cartan_change_of_coordinates(a)
    al, be = lorentzian().coframe(img)
    worst = 0.0
    for v in (fr.v1, fr.v2):
        w = np.einsum("...ij,...j->...i", J, v)
        r = np.abs(np.sum(al * w, axis=-1)) + np.abs(np.sum(be * w, axis=-1))
        worst = max(worst, float(np.max(r)))
    return worst


# ---------------------------------------------------------------------------
# manifests


def model_to_manifest(model: EngelModel) -> dict:
    out: dict = {"kind": model.kind}
    if model.kind == MAPPING_TORUS:
        if model.turning_spec is None:
            raise ValueError("mapping torus with an unregistered turning function cannot be serialised")
        out["turning"] = model.turning_spec
        rm = model.return_map
        out["return_map"] = {"id": rm.name if rm.name in RETURN_MAP_REGISTRY else "linear", "params": rm.params}
        out["bbox"] = [list(b) for b in model.bbox]
    elif model.kind == CUSTOM:
        raise ValueError("custom models are not serialisable")
    return out


def model_from_manifest(d: dict) -> EngelModel:
    kind = d.get("kind")
    if kind in MODEL_BUILDERS:
        return MODEL_BUILDERS[kind]()
    if kind == MAPPING_TORUS:
        rm = d.get("return_map", {"id": "identity", "params": {}})
        rid = rm.get("id", "identity")
        if rid not in RETURN_MAP_REGISTRY:
            raise UnknownIdentifier(f"unknown return map {rid!r}")
        params = dict(rm.get("params", {}))
        if rid in ("identity", "example4"):
            params = {}
        phi = RETURN_MAP_REGISTRY[rid](**params)
        bbox = tuple(tuple(b) for b in d.get("bbox", ((-1, 1),) * 3))
        return mapping_torus(d.get("turning", {"id": "pi_t"}), phi, bbox)
    raise UnknownIdentifier(f"unknown model kind {kind!r}")
