import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confpoly import geom
from confpoly.geom import (
    Configuration,
    ConfigurationError,
    DegenerateConfigurationError,
    HopfLift,
    SpherePoint,
)


def euc(*pts):
    return Configuration("euclidean", np.array(pts, dtype=float))


def hyp(*pts):
    return Configuration("hyperbolic", np.array(pts, dtype=float))


def as_xyz(t):
    return np.array([t.w.real, t.w.imag, t.h])


def mobius_endpoint(p, q):
    """Endpoint of the ray p -> q, by moving p to the origin with a ball isometry.

    Through the origin geodesics are diameters, so the endpoint there is the
    normalized image of q; map it back with the inverse translation.
    """
    y = geom.ball_translate(q, p)
    return geom.ball_translate(y / np.linalg.norm(y), -np.asarray(p))


unit_vectors = st.tuples(
    st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)
).filter(lambda v: 0.1 < np.linalg.norm(v)).map(lambda v: np.array(v) / np.linalg.norm(v))


# -- euclidean directions ----------------------------------------------------


def test_euclidean_direction_examples():
    cfg = euc((0, 0, 0), (0, 0, 5), (3, 0, 0))
    t = geom.euclidean_direction(cfg, 0, 1)
    assert t.w == 0 and t.h == 1
    t = geom.euclidean_direction(cfg, 0, 2)
    assert t.w == 1 and t.h == 0


def test_euclidean_direction_is_antipodal_on_swap():
    rng = np.random.default_rng(0)
    cfg = Configuration("euclidean", rng.normal(size=(5, 3)))
    for i in range(5):
        for j in range(5):
            if i != j:
                a = geom.euclidean_direction(cfg, i, j)
                b = geom.euclidean_direction(cfg, j, i)
                assert b.w == -a.w and b.h == -a.h


def test_euclidean_direction_bad_arguments():
    cfg = euc((0, 0, 0), (1, 0, 0))
    with pytest.raises(ValueError):
        geom.euclidean_direction(cfg, 0, 0)
    with pytest.raises(ValueError):
        geom.euclidean_direction(hyp((0, 0, 0), (0.5, 0, 0)), 0, 1)


# -- hyperbolic endpoints ------------------------------------------------------


@pytest.mark.parametrize("r", [0.1, 0.5, 0.9, 0.999])
def test_hyperbolic_endpoint_on_a_diameter(r):
    t = geom.hyperbolic_ideal_endpoint(hyp((0, 0, 0), (0, 0, r)), 0, 1)
    assert abs(t.w) < 1e-12 and t.h == pytest.approx(1, abs=1e-12)
    t = geom.hyperbolic_ideal_endpoint(hyp((0, 0, -r), (0, 0, r)), 0, 1)
    assert abs(t.w) < 1e-12 and t.h == pytest.approx(1, abs=1e-12)


def test_hyperbolic_endpoint_matches_mobius_oracle():
    rng = np.random.default_rng(1)
    for _ in range(200):
        g = rng.normal(size=(2, 3))
        r = np.linalg.norm(g, axis=1, keepdims=True)
        p, q = g / r * np.tanh(r)
        t = geom.hyperbolic_ideal_endpoint(hyp(p, q), 0, 1)
        np.testing.assert_allclose(as_xyz(t), mobius_endpoint(p, q), atol=1e-9)


def test_hyperbolic_endpoint_reparametrization():
    rng = np.random.default_rng(2)
    for _ in range(50):
        g = rng.normal(size=(2, 3))
        r = np.linalg.norm(g, axis=1, keepdims=True)
        p, q = g / r * np.tanh(r / 2)
        # walk further along the geodesic: in the frame where p is the origin
        # the geodesic is a diameter, so scale towards the boundary there
        y = geom.ball_translate(q, p)
        y_far = y / np.linalg.norm(y) * (1 + np.linalg.norm(y)) / 2
        m = geom.ball_translate(y_far, -p)
        cfg = hyp(p, q, m)
        a = geom.hyperbolic_ideal_endpoint(cfg, 0, 1)
        b = geom.hyperbolic_ideal_endpoint(cfg, 0, 2)
        np.testing.assert_allclose(as_xyz(a), as_xyz(b), atol=1e-10)


def test_hyperbolic_endpoint_is_not_antipodal():
    # the two ends of one geodesic are only antipodal for diameters
    cfg = hyp((0.3, 0, 0), (0.3, 0.4, 0))
    a = as_xyz(geom.hyperbolic_ideal_endpoint(cfg, 0, 1))
    b = as_xyz(geom.hyperbolic_ideal_endpoint(cfg, 1, 0))
    assert np.linalg.norm(a + b) > 0.1


def test_hyperbolic_endpoint_linear_euclidean_limit():
    rng = np.random.default_rng(3)
    eps = np.array([1e-2, 1e-3, 1e-4])
    for _ in range(20):
        x = rng.normal(size=(2, 3))
        e = as_xyz(geom.euclidean_direction(Configuration("euclidean", x), 0, 1))
        errs = [np.linalg.norm(as_xyz(geom.hyperbolic_ideal_endpoint(hyp(*(s * x)), 0, 1)) - e)
                for s in eps]
        orders = np.log(np.array(errs[:-1]) / errs[1:]) / np.log(10)
        assert np.all(orders > 0.9)


def test_sphere_points_are_unit():
    rng = np.random.default_rng(4)
    g = rng.normal(size=(6, 3))
    r = np.linalg.norm(g, axis=1, keepdims=True)
    for cfg in (Configuration("euclidean", g), Configuration("hyperbolic", g / r * np.tanh(r))):
        w, h = geom.direction_table(cfg)
        off = ~np.eye(6, dtype=bool)
        assert np.max(np.abs(np.abs(w[off]) ** 2 + h[off] ** 2 - 1)) <= 1e-12


# -- stereographic projection --------------------------------------------------


def test_cp1_to_sphere_examples():
    assert geom.cp1_to_sphere(0) == SpherePoint(0, -1)
    assert geom.cp1_to_sphere(complex(math.inf, 0)) == SpherePoint(0, 1)
    t = geom.cp1_to_sphere(1)
    assert t.w == pytest.approx(1) and t.h == pytest.approx(0)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_stereographic_round_trip(z):
    t = geom.cp1_to_sphere(z)
    assert abs(t.w) ** 2 + t.h**2 == pytest.approx(1, abs=1e-12)
    assert geom.sphere_to_cp1(t) == pytest.approx(z, rel=1e-9, abs=1e-12)


# -- Hopf map and lifts ----------------------------------------------------------


def test_hopf_map_examples():
    assert geom.hopf_map(HopfLift(1, 0)) == SpherePoint(0, -1)
    assert geom.hopf_map(HopfLift(0, 1)) == SpherePoint(0, 1)
    t = geom.hopf_map(HopfLift(2**-0.5, 2**-0.5))
    assert t.w == pytest.approx(1) and t.h == pytest.approx(0, abs=1e-15)


def test_hopf_map_rejects_non_unit():
    with pytest.raises(ValueError):
        geom.hopf_map(HopfLift(1, 1))


def test_hopf_lift_examples():
    assert geom.hopf_lift(SpherePoint(0, -1)) == HopfLift(1, 0)
    assert geom.hopf_lift(SpherePoint(0, 1)) == HopfLift(0, 1)


@settings(max_examples=300, deadline=None)
@given(unit_vectors)
def test_hopf_lift_round_trip(x):
    t = SpherePoint(complex(x[0], x[1]), float(x[2]))
    lift = geom.hopf_lift(t)
    assert abs(lift.u) ** 2 + abs(lift.v) ** 2 == pytest.approx(1, abs=1e-12)
    back = geom.hopf_map(lift)
    assert abs(back.w - t.w) <= 1e-10 and abs(back.h - t.h) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(unit_vectors)
def test_partner_lift_is_antipodal(x):
    lift = geom.hopf_lift(SpherePoint(complex(x[0], x[1]), float(x[2])))
    partner = HopfLift(-np.conj(lift.v), np.conj(lift.u))
    a, b = geom.hopf_map(lift), geom.hopf_map(partner)
    assert abs(a.w + b.w) <= 1e-12 and abs(a.h + b.h) <= 1e-12
    assert geom.symplectic(lift, partner) == pytest.approx(1, abs=1e-12)


# -- lift tables ------------------------------------------------------------------


def test_lift_table_two_points():
    table = geom.build_lift_table(euc((0, 0, 0), (0, 0, 1)))
    np.testing.assert_allclose(table[0, 1], (0, 1))  # north pole
    np.testing.assert_allclose(table[1, 0], (-1, 0))  # a lift of the south pole
    s = table.u[0, 1] * table.v[1, 0] - table.v[0, 1] * table.u[1, 0]
    assert s == 1
    assert geom.hopf_map(table[1, 0]) == SpherePoint(0, -1)


@pytest.mark.parametrize("space", ["euclidean", "hyperbolic"])
def test_lift_table_symplectic_and_round_trip(space):
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = rng.normal(size=(6, 3))
        if space == "hyperbolic":
            r = np.linalg.norm(g, axis=1, keepdims=True)
            g = g / r * np.tanh(r)
        cfg = Configuration(space, g)
        table = geom.build_lift_table(cfg)
        assert table.symplectic_residual() <= 1e-12
        w, h = geom.direction_table(cfg)
        for i in range(6):
            for j in range(6):
                if i == j:
                    continue
                u, v = table[i, j]
                # lower-triangle hyperbolic lifts are rescaled, so project first
                norm = math.sqrt(abs(u) ** 2 + abs(v) ** 2)
                t = geom.hopf_map(HopfLift(u / norm, v / norm))
                assert abs(t.w - w[i, j]) <= 1e-10 and abs(t.h - h[i, j]) <= 1e-10


def test_cp1_table_is_per_point():
    cfg = Configuration("cp1", np.array([0, 1j, complex(math.inf, 0)]))
    table = geom.build_lift_table(cfg)
    assert table.per_point and table.symplectic_residual() == 0.0
    assert table[2] == HopfLift(0, 1)
    assert table[0] == HopfLift(1, 0)


def test_gauge_perturb():
    rng = np.random.default_rng(6)
    table = geom.build_lift_table(Configuration("euclidean", rng.normal(size=(5, 3))))
    a = geom.gauge_perturb(table, 1)
    b = geom.gauge_perturb(table, 1)
    c = geom.gauge_perturb(table, 2)
    np.testing.assert_array_equal(a.u, b.u)
    assert not np.array_equal(a.u, c.u)
    assert a.symplectic_residual() <= 1e-10
    assert c.symplectic_residual() <= 1e-10
    # each lift is only rescaled, so it stays parallel to the original
    np.testing.assert_allclose(a.u * table.v - a.v * table.u, 0, atol=1e-12)


# -- configuration validation -------------------------------------------------


def test_configuration_rejects_collisions():
    with pytest.raises(DegenerateConfigurationError) as info:
        euc((0, 0, 0), (1, 0, 0), (0, 0, 0))
    assert info.value.indices == (0, 2)
    assert "0 and 2" in str(info.value)
    with pytest.raises(DegenerateConfigurationError):
        Configuration("cp1", np.array([1e12, complex(math.inf, 0)]))


def test_configuration_rejects_bad_input():
    with pytest.raises(ConfigurationError, match="points/1"):
        hyp((0, 0, 0), (1, 0, 0))
    with pytest.raises(ConfigurationError):
        Configuration("spherical", np.zeros((2, 3)))
    with pytest.raises(ConfigurationError):
        Configuration("euclidean", np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        euc((0, 0, 0))
    with pytest.raises(ConfigurationError):
        euc((0, 0, 0), (np.nan, 0, 0))


@pytest.mark.parametrize(
    "doc",
    [
        {"space": "euclidean", "points": [[0, 0, 0], [1, 2, 3.5]]},
        {"space": "hyperbolic", "points": [[0, 0, 0], [0.1, -0.2, 0.3]]},
        {"space": "cp1", "points": [[0, 0], "inf", [1.5, -2]]},
    ],
)
def test_document_round_trip(doc):
    cfg = Configuration.from_document(doc)
    again = Configuration.from_document(cfg.to_document())
    assert again.space == cfg.space
    np.testing.assert_array_equal(again.points, cfg.points)
    assert cfg.to_document()["points"] == [p if p == "inf" else [float(c) for c in p]
                                           for p in doc["points"]]


@pytest.mark.parametrize(
    "doc, path",
    [
        ({"space": "euclidean", "points": [[0, 0, 0], [1, 2]]}, "points/1"),
        ({"space": "cp1", "points": [[0, 0], "nowhere"]}, "points/1"),
        ({"space": "torus", "points": []}, "space"),
        ({"space": "euclidean", "points": "x"}, "points"),
    ],
)
def test_document_errors_name_the_field(doc, path):
    with pytest.raises(ConfigurationError, match=path):
        Configuration.from_document(doc)


def test_ball_translate_is_an_isometry_of_the_ball():
    rng = np.random.default_rng(7)
    a = np.array([0.3, -0.2, 0.5])
    x = rng.normal(size=(10, 3))
    x = x / np.linalg.norm(x, axis=1, keepdims=True) * 0.8
    y = geom.ball_translate(x, a)
    assert np.all(np.linalg.norm(y, axis=1) < 1)
    np.testing.assert_allclose(geom.ball_translate(a, a), 0, atol=1e-15)
    np.testing.assert_allclose(geom.ball_translate(y, -a), x, atol=1e-12)

    def dist(p, q):
        return np.arccosh(1 + 2 * np.sum((p - q) ** 2) / ((1 - p @ p) * (1 - q @ q)))

    assert dist(y[0], y[1]) == pytest.approx(dist(x[0], x[1]), rel=1e-10)


def test_random_rotation_is_proper():
    R = geom.random_rotation(np.random.default_rng(8))
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(R) == pytest.approx(1)
