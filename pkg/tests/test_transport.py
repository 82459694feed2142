import math

import numpy as np
import pytest

from grbell import (
    BasePointMismatch,
    CommonOriginMismatch,
    FourVector,
    StopCondition,
    build_comoving_frame,
    integrate_geodesic,
    inner,
    metric_at,
    minkowski_point,
    parallel_transport,
    schwarzschild_point,
    transport_R_to_L,
)
from grbell.frames import tetrad_components

M = 1.0


def flat_path(flat, v=0.5, tau=5.0):
    x0 = minkowski_point(0.0, 0.0, 0.0, 0.0)
    gamma = 1.0 / math.sqrt(1.0 - v * v)
    u0 = FourVector([gamma, gamma * v, 0.0, 0.0], x0)
    return integrate_geodesic(flat, x0, u0, StopCondition.proper_time(tau))


def circular_path(schw, r=10.0, revolutions=1.0, retrograde=False):
    x0 = schwarzschild_point(0.0, r, math.pi / 2, 0.0)
    omega = math.sqrt(M / r**3)
    ut = 1.0 / math.sqrt(1.0 - 3.0 * M / r)
    sign = -1.0 if retrograde else 1.0
    u0 = FourVector([ut, 0.0, 0.0, sign * omega * ut], x0)
    tau_orbit = revolutions * 2.0 * math.pi / (omega * ut)
    return integrate_geodesic(schw, x0, u0, StopCondition.proper_time(tau_orbit))


def test_flat_transport_is_identity(flat, rng):
    path = flat_path(flat)
    for _ in range(5):
        v0 = FourVector(rng.standard_normal(4), path.start_point())
        out = parallel_transport(path, v0)
        assert np.max(np.abs(out.v.components - v0.components)) < 1e-12


def test_forward_backward_round_trip(schw, rng):
    path = circular_path(schw, revolutions=0.4)
    v0 = FourVector(rng.standard_normal(4), path.start_point())
    there = parallel_transport(path, v0)
    back = parallel_transport(path, there.v, direction="backward")
    assert np.max(np.abs(back.v.components - v0.components)) < 1e-7


def test_norm_and_tangent_product_conserved(schw):
    path = circular_path(schw, revolutions=0.7)
    v0 = FourVector([0.0, math.sqrt(0.8), 0.0, 0.0], path.start_point())
    out = parallel_transport(path, v0)
    assert out.norm_drift < 1e-7
    assert out.tangent_dot_drift < 1e-7


def test_pairwise_inner_products_conserved(schw, rng):
    path = circular_path(schw, revolutions=0.5)
    p0, p1 = path.start_point(), path.end_point()
    g0, g1 = metric_at(path.spec, p0), metric_at(path.spec, p1)
    v0 = FourVector(rng.standard_normal(4), p0)
    w0 = FourVector(rng.standard_normal(4), p0)
    v1 = parallel_transport(path, v0).v
    w1 = parallel_transport(path, w0).v
    assert inner(g1, v1, w1) == pytest.approx(inner(g0, v0, w0), abs=1e-7)


def test_geodetic_precession_circular_orbit(schw):
    # one full orbit at r = 10M precesses an initially radial spatial vector
    # by 2 pi (1 - sqrt(1 - 3M/r)) in the comoving frame
    r = 10.0
    path = circular_path(schw, r=r, revolutions=1.0)
    f = 1.0 - 2.0 * M / r
    v0 = FourVector([0.0, math.sqrt(f), 0.0, 0.0], path.start_point())
    out = parallel_transport(path, v0)

    frame = build_comoving_frame(schw, path.end_point(), path.end_tangent())
    comps = tetrad_components(frame, out.v)
    assert abs(comps[0]) < 1e-9  # stays orthogonal to the orbit
    angle = math.atan2(comps[3], comps[1])
    expected = 2.0 * math.pi * (1.0 - math.sqrt(1.0 - 3.0 * M / r))
    assert abs(abs(angle) - expected) < 1e-4


def test_transport_history_samples(schw):
    path = circular_path(schw, revolutions=0.3)
    v0 = FourVector([0.0, math.sqrt(0.8), 0.0, 0.0], path.start_point())
    out = parallel_transport(path, v0, keep_history=True)
    assert out.history.shape == (len(path.taus), 4)
    assert np.allclose(out.history[0], v0.components, atol=1e-12)
    assert np.allclose(out.history[-1], out.v.components, atol=1e-12)


def test_transport_base_point_checked(schw):
    path = circular_path(schw, revolutions=0.3)
    stray = FourVector([0.0, 1.0, 0.0, 0.0], schwarzschild_point(0.0, 7.0, 1.0, 0.0))
    with pytest.raises(BasePointMismatch):
        parallel_transport(path, stray)


def test_transport_r_to_l_flat_identity(flat, rng):
    x0 = minkowski_point(0.0, 0.0, 0.0, 0.0)
    gamma = 1.0 / math.sqrt(1.0 - 0.25)
    geo_L = integrate_geodesic(
        flat, x0, FourVector([gamma, 0.5 * gamma, 0.0, 0.0], x0), StopCondition.proper_time(5.0)
    )
    geo_R = integrate_geodesic(
        flat, x0, FourVector([gamma, -0.5 * gamma, 0.0, 0.0], x0), StopCondition.proper_time(5.0)
    )
    vR = FourVector(rng.standard_normal(4), geo_R.end_point())
    out = transport_R_to_L(geo_L, geo_R, vR)
    assert np.max(np.abs(out.v.components - vR.components)) < 1e-11


def test_transport_r_to_l_degenerate_right_leg(schw, rng):
    geo_L = circular_path(schw, revolutions=0.4)
    x0 = geo_L.start_point()
    geo_R = integrate_geodesic(
        schw, x0, geo_L.start_tangent(), StopCondition.proper_time(0.0)
    )
    vO = FourVector(rng.standard_normal(4), x0)
    combined = transport_R_to_L(geo_L, geo_R, FourVector(vO.components, geo_R.end_point()))
    direct = parallel_transport(geo_L, vO)
    assert np.max(np.abs(combined.v.components - direct.v.components)) < 1e-12


def test_transport_r_to_l_opposite_orbits_preserves_norm(schw):
    # two opposite equatorial geodesics from r = 10
    geo_L = circular_path(schw, revolutions=0.25)
    geo_R = circular_path(schw, revolutions=0.25, retrograde=True)
    p_R = geo_R.end_point()
    vR = FourVector([0.0, math.sqrt(1.0 - 2.0 * M / p_R.coords[1]), 0.0, 0.0], p_R)
    norm_R = inner(metric_at(geo_R.spec, p_R), vR, vR)
    out = transport_R_to_L(geo_L, geo_R, vR)
    norm_L = inner(metric_at(geo_L.spec, geo_L.end_point()), out.v, out.v)
    assert norm_L == pytest.approx(norm_R, abs=1e-7)


def test_transport_r_to_l_origin_mismatch(schw):
    geo_L = circular_path(schw, revolutions=0.2)
    x1 = schwarzschild_point(0.0, 12.0, math.pi / 2, 0.0)
    f = 1.0 - 2.0 * M / 12.0
    geo_R = integrate_geodesic(
        schw, x1, FourVector([1.0 / math.sqrt(f), 0.0, 0.0, 0.0], x1), StopCondition.proper_time(1.0)
    )
    vR = FourVector([0.0, 1.0, 0.0, 0.0], geo_R.end_point())
    with pytest.raises(CommonOriginMismatch):
        transport_R_to_L(geo_L, geo_R, vR)
