import math

import numpy as np
import pytest

from grbell import (
    BadNormalization,
    Direction3,
    FourVector,
    StaticFrameUnavailable,
    ZeroVector,
    build_comoving_frame,
    build_static_frame,
    embed_direction,
    inner,
    make_projection,
    metric_at,
    minkowski_point,
    project_to_frame,
    schwarzschild_point,
)
from grbell.frames import tetrad_components
from conftest import random_direction, random_exterior_point

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])


def assert_orthonormal(frame, tol=1e-9):
    assert np.max(np.abs(frame.gram_matrix() - ETA)) < tol


def test_static_frame_flat_is_coordinate_basis(flat):
    frame = build_static_frame(flat, minkowski_point(1.0, 2.0, 3.0, 4.0))
    for i, leg in enumerate(frame.legs()):
        expected = np.zeros(4)
        expected[i] = 1.0
        assert np.array_equal(leg.components, expected)


def test_static_frame_schwarzschild_closed_form(schw):
    # e0^t = (1 - 2M/r)^{-1/2}, e1^r = (1 - 2M/r)^{1/2} at r = 8
    frame = build_static_frame(schw, schwarzschild_point(0.0, 8.0, math.pi / 2, 0.0))
    assert frame.e0.components[0] == pytest.approx(1.1547005383792515, abs=1e-12)
    assert frame.e1.components[1] == pytest.approx(0.8660254037844386, abs=1e-12)
    assert_orthonormal(frame)


def test_static_frame_unavailable_inside_guard(schw):
    with pytest.raises(StaticFrameUnavailable):
        build_static_frame(schw, schwarzschild_point(0.0, 2.0 * (1 + 1e-8), 1.0, 0.0))


def test_static_frames_orthonormal_at_random_points(schw, rng):
    for _ in range(20):
        assert_orthonormal(build_static_frame(schw, random_exterior_point(rng)))


def test_comoving_frame_flat_rest_is_coordinate_basis(flat):
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    frame = build_comoving_frame(flat, p, FourVector([1.0, 0.0, 0.0, 0.0], p))
    for i, leg in enumerate(frame.legs()):
        expected = np.zeros(4)
        expected[i] = 1.0
        assert np.allclose(leg.components, expected, atol=1e-15)


def test_comoving_frame_boost(flat):
    # u = (cosh xi, sinh xi, 0, 0) gives e1 = (sinh xi, cosh xi, 0, 0)
    xi = 1.0
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    u = FourVector([math.cosh(xi), math.sinh(xi), 0.0, 0.0], p)
    frame = build_comoving_frame(flat, p, u)
    assert frame.e1.components[0] == pytest.approx(1.1752011936438014, abs=1e-12)
    assert frame.e1.components[1] == pytest.approx(1.5430806348152437, abs=1e-12)
    assert_orthonormal(frame)


def test_comoving_frame_orthonormal_random(schw, rng):
    # boost the static observer by a random sub-luminal local velocity
    for _ in range(20):
        p = random_exterior_point(rng)
        static = build_static_frame(schw, p)
        vel = rng.uniform(-0.5, 0.5, size=3)
        gamma = 1.0 / math.sqrt(1.0 - vel @ vel)
        comps = gamma * (
            static.e0.components
            + vel[0] * static.e1.components
            + vel[1] * static.e2.components
            + vel[2] * static.e3.components
        )
        u = FourVector(comps, p)
        frame = build_comoving_frame(schw, p, u)
        assert_orthonormal(frame)
        assert np.allclose(frame.e0.components, u.components)


def test_comoving_frame_rejects_bad_normalization(flat):
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(BadNormalization):
        build_comoving_frame(flat, p, FourVector([2.0, 0.0, 0.0, 0.0], p))


def test_embed_direction_flat(flat):
    frame = build_static_frame(flat, minkowski_point(0.0, 0.0, 0.0, 0.0))
    v = embed_direction(frame, Direction3(np.array([1.0, 0.0, 0.0])))
    assert np.array_equal(v.components, [0.0, 1.0, 0.0, 0.0])


def test_embed_direction_properties(schw, rng):
    for _ in range(20):
        p = random_exterior_point(rng)
        frame = build_static_frame(schw, p)
        v = embed_direction(frame, random_direction(rng))
        g = metric_at(schw, p)
        assert abs(inner(g, v, frame.e0)) < 1e-10
        assert inner(g, v, v) == pytest.approx(1.0, abs=1e-9)


def test_projection_of_spatial_vector(flat):
    frame = build_static_frame(flat, minkowski_point(0.0, 0.0, 0.0, 0.0))
    d = Direction3.from_vector([2.0, -1.0, 0.5])
    proj = project_to_frame(frame, embed_direction(frame, d))
    assert proj.w == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(proj.direction.d, d.d, atol=1e-12)


def test_projection_symmetric_split(flat):
    # tetrad components (1, 1, 0, 0) -> w = 1/sqrt(2), direction (1, 0, 0)
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    frame = build_static_frame(flat, p)
    proj = project_to_frame(frame, FourVector([1.0, 1.0, 0.0, 0.0], p))
    assert proj.w == pytest.approx(0.7071067811865476, abs=1e-12)
    assert np.allclose(proj.direction.d, [1.0, 0.0, 0.0])


def test_projection_of_timelike_vector_is_degenerate(flat):
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    frame = build_static_frame(flat, p)
    proj = project_to_frame(frame, FourVector([3.0, 0.0, 0.0, 0.0], p))
    assert proj.degenerate
    assert proj.w == 0.0
    assert proj.direction is None


def test_projection_zero_vector_raises(flat):
    p = minkowski_point(0.0, 0.0, 0.0, 0.0)
    frame = build_static_frame(flat, p)
    with pytest.raises(ZeroVector):
        project_to_frame(frame, FourVector([0.0, 0.0, 0.0, 0.0], p))


def test_projection_weight_range_and_unitarity(schw, rng):
    # w in [0, 1] and w^2 + q0^2 = 1 for arbitrary vectors in arbitrary frames
    for _ in range(500):
        p = random_exterior_point(rng)
        frame = build_static_frame(schw, p)
        v = FourVector(rng.standard_normal(4) * 10 ** rng.uniform(-3, 3), p)
        proj = project_to_frame(frame, v)
        assert 0.0 <= proj.w <= 1.0
        assert proj.w**2 + proj.time_component**2 == pytest.approx(1.0, abs=1e-10)


def test_embed_project_round_trip(schw, rng):
    for _ in range(50):
        p = random_exterior_point(rng)
        frame = build_static_frame(schw, p)
        d = random_direction(rng)
        proj = project_to_frame(frame, embed_direction(frame, d))
        assert abs(proj.w - 1.0) < 1e-10
        assert np.max(np.abs(proj.direction.d - d.d)) < 1e-10


def test_tetrad_components_reconstruct(schw, rng):
    p = random_exterior_point(rng)
    frame = build_static_frame(schw, p)
    v = FourVector(rng.standard_normal(4), p)
    comps = tetrad_components(frame, v)
    rebuilt = sum(c * leg.components for c, leg in zip(comps, frame.legs()))
    assert np.allclose(rebuilt, v.components, atol=1e-12)


def test_make_projection_validates():
    with pytest.raises(ValueError):
        make_projection(1.5, [1, 0, 0])
    proj = make_projection(0.0)
    assert proj.degenerate
    proj = make_projection(0.8, [0, 1, 0])
    assert proj.w == 0.8 and not proj.degenerate


def test_direction3_unit_invariant():
    with pytest.raises(ValueError):
        Direction3(np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ZeroVector):
        Direction3.from_vector([0.0, 0.0, 0.0])
