"""Local orthonormal tetrads and the weighted projection of transported vectors.

A transported measurement direction generally acquires a time component in
the detector's tetrad. The rule used here: Euclidean-normalize the four
tetrad components to unit length, then take the spatial triple. Its
Euclidean norm is the weight w in [0, 1]; the triple divided by w is the
measured unit direction. A purely spatial vector keeps w = 1, a purely
timelike one degenerates to w = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadNormalization,
    BasePointMismatch,
    DegenerateBasis,
    StaticFrameUnavailable,
    ZeroVector,
)
from .geometry import (
    ETA,
    MINKOWSKI,
    FourVector,
    MetricSpec,
    SpacetimePoint,
    _frozen_array,
    metric_components,
    same_event,
)

DEGENERATE_W = 1e-9
GRAM_SCHMIDT_PIVOT = 1e-12


@dataclass(frozen=True, eq=False)
class Direction3:
    """Unit 3-vector in a tetrad's spatial triad."""

    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d", _frozen_array(self.d, (3,)))
        norm = float(np.linalg.norm(self.d))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"direction norm {norm} not unit within 1e-12")

    @classmethod
    def from_vector(cls, v) -> "Direction3":
        arr = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ZeroVector("cannot normalize a zero 3-vector")
        return cls(arr / norm)

    @classmethod
    def from_angle(cls, angle_rad: float) -> "Direction3":
        """In-plane direction (cos, sin, 0) in the frame's e1-e2 plane."""
        return cls(np.array([math.cos(angle_rad), math.sin(angle_rad), 0.0]))

    def dot(self, other: "Direction3") -> float:
        return float(self.d @ other.d)

    def __neg__(self) -> "Direction3":
        return Direction3(-self.d)


@dataclass(frozen=True, eq=False)
class LocalFrame:
    """Orthonormal tetrad {e0, e1, e2, e3} at an event, g(e_a, e_b) = eta_ab."""

    base: SpacetimePoint
    spec: MetricSpec
    e0: FourVector
    e1: FourVector
    e2: FourVector
    e3: FourVector

    def legs(self) -> list[FourVector]:
        return [self.e0, self.e1, self.e2, self.e3]

    def gram_matrix(self) -> np.ndarray:
        g = metric_components(self.spec, self.base.coords)
        E = np.stack([leg.components for leg in self.legs()])
        return E @ g @ E.T


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Weight w in [0, 1] and unit direction of a vector seen in a tetrad.

    `time_component` is the normalized tetrad time component, so
    w**2 + time_component**2 == 1. `direction` is None when degenerate.
    """

    w: float
    direction: Direction3 | None
    degenerate: bool
    time_component: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise ValueError(f"w = {self.w} outside [0, 1]")
        if not self.degenerate and self.direction is None:
            raise ValueError("non-degenerate projection needs a direction")


def make_projection(w: float, direction=None) -> ProjectionResult:
    """Synthetic projection for driving the correlation layer directly."""
    if w < DEGENERATE_W:
        return ProjectionResult(w=w, direction=None, degenerate=True, time_component=math.sqrt(max(0.0, 1.0 - w * w)))
    d = direction if isinstance(direction, Direction3) else Direction3.from_vector(direction)
    return ProjectionResult(w=w, direction=d, degenerate=False, time_component=math.sqrt(max(0.0, 1.0 - w * w)))


def build_static_frame(spec: MetricSpec, p: SpacetimePoint) -> LocalFrame:
    """Tetrad of the static observer: e0 along d/dt, spatial legs along the axes."""
    if p.chart != spec.chart:
        raise StaticFrameUnavailable(f"point chart {p.chart!r} does not match metric")
    if spec.kind == MINKOWSKI:
        legs = np.eye(4)
    else:
        r, theta = p.coords[1], p.coords[2]
        if r <= spec.guard_radius:
            raise StaticFrameUnavailable(
                f"no static observer at r = {r} <= {spec.guard_radius}"
            )
        f = 1.0 - 2.0 * spec.mass / r
        legs = np.diag(
            [1.0 / math.sqrt(f), math.sqrt(f), 1.0 / r, 1.0 / (r * math.sin(theta))]
        )
    e = [FourVector(legs[i], p) for i in range(4)]
    return LocalFrame(p, spec, *e)


def build_comoving_frame(spec: MetricSpec, p: SpacetimePoint, u: FourVector) -> LocalFrame:
    """Tetrad riding with 4-velocity u: e0 = u, spatial legs by Gram-Schmidt.

    Candidates are the spatial coordinate axes in chart order, so the result
    is deterministic. Future-pointing timelike u is required.
    """
    if not same_event(p, u.base):
        raise BasePointMismatch("u must be based at p")
    g = metric_components(spec, p.coords)
    uu = float(u.components @ g @ u.components)
    if abs(uu + 1.0) > 1e-8:
        raise BadNormalization(f"u.u = {uu}, expected -1")
    if u.components[0] <= 0.0:
        raise BadNormalization("u must be future-pointing (u^t > 0)")

    legs = [np.asarray(u.components, dtype=float)]
    for axis in (1, 2, 3):
        cand = np.zeros(4)
        cand[axis] = 1.0
        w = cand.copy()
        # eta-weighted projections: e0 has norm -1, spatial legs +1
        w = w + float(legs[0] @ g @ w) * legs[0]
        for prev in legs[1:]:
            w = w - float(prev @ g @ w) * prev
        norm_sq = float(w @ g @ w)
        if norm_sq <= GRAM_SCHMIDT_PIVOT:
            raise DegenerateBasis(f"pivot {norm_sq} for axis {axis}")
        legs.append(w / math.sqrt(norm_sq))
    e = [FourVector(leg, p) for leg in legs]
    return LocalFrame(p, spec, *e)


def embed_direction(frame: LocalFrame, d: Direction3) -> FourVector:
    """Spacelike unit 4-vector d1*e1 + d2*e2 + d3*e3 at the frame's event."""
    comps = (
        d.d[0] * frame.e1.components
        + d.d[1] * frame.e2.components
        + d.d[2] * frame.e3.components
    )
    return FourVector(comps, frame.base)


def tetrad_components(frame: LocalFrame, v: FourVector) -> np.ndarray:
    """Components v^a with v = v^a e_a, via eta^{ab} g(e_b, v)."""
    if not same_event(frame.base, v.base):
        raise BasePointMismatch("vector not based at the frame's event")
    g = metric_components(frame.spec, frame.base.coords)
    E = np.stack([leg.components for leg in frame.legs()])
    return np.diag(ETA) * (E @ g @ v.components)


def project_to_frame(frame: LocalFrame, v: FourVector) -> ProjectionResult:
    """Weight and direction of v in the frame, per the module's projection rule."""
    comps = tetrad_components(frame, v)
    total = float(np.linalg.norm(comps))
    if total == 0.0:
        raise ZeroVector("cannot project a zero vector")
    q = comps / total
    # rounding can push the norm a few ulp past 1; the invariant is exact
    w = min(float(np.linalg.norm(q[1:])), 1.0)
    if w < DEGENERATE_W:
        return ProjectionResult(w=w, direction=None, degenerate=True, time_component=float(q[0]))
    return ProjectionResult(
        w=w,
        direction=Direction3(q[1:] / w),
        degenerate=False,
        time_component=float(q[0]),
    )
