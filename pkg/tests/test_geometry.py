import math

import numpy as np
import pytest

from pvextremes import geometry as geo
from pvextremes.errors import (ConditionViolated, DimensionMismatch, NotUnit,
                               SingularConfiguration, ZeroVertex)
from pvextremes.sampling import IntensityModel, rng_stream, uniform_sphere


def test_simplex_volume_examples():
    assert geo.simplex_volume([[0, 0], [1, 0], [0, 1]]) == pytest.approx(0.5)
    assert geo.simplex_volume([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]) \
        == pytest.approx(1 / 6)
    assert geo.simplex_volume([[0, 0], [1, 0], [2, 0]]) == 0.0
    with pytest.raises(DimensionMismatch):
        geo.simplex_volume([[0, 0], [1, 0]])


def test_circumcenter_examples():
    assert np.allclose(geo.circumcenter_with_origin([[2, 0], [0, 2]]), [1, 1])
    assert np.allclose(geo.circumcenter_with_origin([[1, 1], [1, -1]]), [1, 0])
    assert np.allclose(
        geo.circumcenter_with_origin([[2, 0, 0], [0, 2, 0], [0, 0, 2]]), [1, 1, 1])
    with pytest.raises(SingularConfiguration):
        geo.circumcenter_with_origin([[1, 0], [2, 0]])
    with pytest.raises(DimensionMismatch):
        geo.circumcenter_with_origin([[1, 0, 0], [0, 1, 0]])


def test_circumcenter_equidistance_random():
    g = rng_stream(101, 0).generator
    for d in (2, 3, 4):
        done = 0
        while done < 500:
            pts = g.standard_normal((d, d))
            if np.linalg.cond(pts) > 1e6:
                continue
            c = geo.circumcenter_with_origin(pts)
            cn = np.linalg.norm(c)
            assert np.abs(np.linalg.norm(pts - c, axis=1) - cn).max() <= 1e-9 * cn
            done += 1


def test_project_onto_complement():
    assert np.allclose(geo.project_onto_complement([1, 0], [3, 4]), [0, 4])
    assert np.allclose(geo.project_onto_complement([0, 1], [0, 1]), [0, 0])
    assert np.allclose(geo.project_onto_complement([1, 0, 0], [1, 2, 3]), [0, 2, 3])
    with pytest.raises(NotUnit):
        geo.project_onto_complement([1, 1], [1, 0])
    out = geo.project_onto_complement([0.6, 0.8], [2.0, -1.0])
    assert abs(out @ np.array([0.6, 0.8])) < 1e-12


def test_origin_in_hull_examples():
    assert geo.origin_in_hull([[0, -0.5], [0, 0.7]]) is True
    assert geo.origin_in_hull([[0, 0.2], [0, 0.7]]) is False
    # equilateral triangle of circumradius 1 in the plane z = 0
    tri = np.array([[math.cos(a), math.sin(a), 0.0]
                    for a in (0, 2 * math.pi / 3, 4 * math.pi / 3)])
    assert geo.origin_in_hull(tri, normal=[0.0, 0.0, 1.0]) is True
    with pytest.raises(DimensionMismatch):
        geo.origin_in_hull([[0, 1]])


def test_origin_in_hull_boundary_degenerate():
    inside, degen = geo.origin_in_hull_detail([[0, -1.0], [0, 0.0]])
    assert inside is False and degen is True


def test_is_pointy_examples():
    assert geo.is_pointy([1, 1], [[2, 0], [0, 2]]) is True
    assert geo.is_pointy([1, 0], [[0.5, 0.866025], [1.866025, 0.5]]) is False
    assert geo.is_pointy([1, 0], [[0.5, 0.866025], [0.5, -0.866025]]) is True
    with pytest.raises(ZeroVertex):
        geo.is_pointy([0, 0], [[1, 0], [0, 1]])
    with pytest.raises(ZeroVertex):
        geo.is_pointy([1, 0], [[1, 0], [0, 1]])


def _random_rotation(g, d):
    q, r = np.linalg.qr(g.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def test_is_pointy_rotation_and_relabel_invariance():
    g = rng_stream(202, 0).generator
    for _ in range(300):
        d = int(g.integers(2, 5))
        nuclei = g.standard_normal((d, d)) + uniform_sphere(d, g)
        c = uniform_sphere(d, g) * (0.5 + g.random())
        base = geo.is_pointy(c, nuclei)
        rot = _random_rotation(g, d)
        assert geo.is_pointy(rot @ c, nuclei @ rot.T) == base
        perm = g.permutation(d)
        assert geo.is_pointy(c, nuclei[perm]) == base


def test_union_bound_examples():
    cfg = geo.BallPairConfig(r=1.0, r_prime=1.0, delta=1.0)
    assert geo.union_ball_volume_lower_bound(cfg, 2) == pytest.approx(math.pi + 0.5)
    assert geo.union_ball_volume_lower_bound(cfg, 3) \
        == pytest.approx(4 * math.pi / 3 + math.pi / 6)
    cfg0 = geo.BallPairConfig(r=1.0, r_prime=1.0, delta=0.0)
    assert geo.union_ball_volume_lower_bound(cfg0, 2) == pytest.approx(math.pi)
    with pytest.raises(ConditionViolated):
        geo.union_ball_volume_lower_bound(
            geo.BallPairConfig(r=1.0, r_prime=2.0, delta=0.5), 2)


def test_ball_pair_config_validation():
    with pytest.raises(ValueError):
        geo.BallPairConfig(r=0.0, r_prime=1.0, delta=0.5)
    with pytest.raises(ValueError):
        geo.BallPairConfig(r=2.0, r_prime=1.0, delta=0.5)
    with pytest.raises(ValueError):
        geo.BallPairConfig(r=1.0, r_prime=1.0, delta=3.0)


def test_mc_union_ball_volume_oracles():
    model = IntensityModel.homogeneous()
    est = geo.mc_union_ball_volume([0, 0], 1.0, [0, 0], 1.0, model, 200_000, 5)
    assert abs(est.mean - math.pi) <= 3 * est.std_error
    # two unit disks at distance 1: area = 2 pi - lens
    lens = 2 * math.acos(0.5) - 0.5 * math.sqrt(3)
    est = geo.mc_union_ball_volume([0, 0], 1.0, [1, 0], 1.0, model, 300_000, 6)
    assert abs(est.mean - (2 * math.pi - lens)) <= 3 * est.std_error
    est = geo.mc_union_ball_volume([0, 0], 1.0, [3, 0], 1.0, model, 200_000, 7)
    assert abs(est.mean - 2 * math.pi) <= 3 * est.std_error


def test_mc_union_radial_power_single_ball():
    # alpha = -1 measure of the unit ball adjacent to the origin is 4
    model = IntensityModel.radial_power(-1.0)
    est = geo.mc_union_ball_volume([-1, 0], 1.0, [-1, 0], 1.0, model, 300_000, 8)
    assert abs(est.mean - 4.0) <= 3.5 * est.std_error
