import json
import math

import numpy as np
import pytest

from conftest import halfplane_cell_polygon, polygon_vertex_set
from pvextremes import typical_cell as tc
from pvextremes.constants import expected_pointy_count
from pvextremes.errors import NegativeThreshold
from pvextremes.sampling import IntensityModel, rng_stream


def _square_generators():
    return np.array([[2.0, 0.0], [0.0, 2.0], [-2.0, 0.0], [0.0, -2.0]])


def test_square_cell_vertices():
    verts = tc.enumerate_vertices(_square_generators(), 10.0)
    locs = sorted(tuple(np.round(v.location, 9)) for v in verts)
    assert locs == [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
    assert all(abs(v.norm - math.sqrt(2)) < 1e-12 for v in verts)
    assert all(v.pointy for v in verts)
    assert tc.enumerate_vertices(_square_generators(), 1.0) == []


def test_enumerate_vertices_input_validation():
    with pytest.raises(ValueError):
        tc.enumerate_vertices(np.array([[0.0, 0.0], [1.0, 0.0]]), 1.0)


def test_count_pointy():
    cell = tc.TypicalCell(
        generators=_square_generators(),
        vertices=tc.enumerate_vertices(_square_generators(), 10.0),
        max_vertex_distance=math.sqrt(2), sampled_radius=4.0,
        model=IntensityModel.homogeneous())
    assert tc.count_pointy_at_least(cell, 1.0) == 4
    assert tc.count_pointy_at_least(cell, 1.5) == 0
    assert tc.count_pointy_at_least(cell, 0.0) == 4
    assert tc.count_pointy_pairs_at_least(cell, 1.0) == 6
    assert tc.count_pointy_pairs_at_least(cell, 1.5) == 0
    with pytest.raises(NegativeThreshold):
        tc.count_pointy_at_least(cell, -0.1)


def test_pair_counts_follow_binomial():
    for k, pairs in ((0, 0), (1, 0), (2, 1), (4, 6), (7, 21)):
        assert k * (k - 1) // 2 == pairs


def test_build_cell_deterministic_and_certified(homogeneous):
    a = tc.build_typical_cell(2, homogeneous, rng_stream(42, 0))
    b = tc.build_typical_cell(2, homogeneous, rng_stream(42, 0))
    assert a.max_vertex_distance == b.max_vertex_distance
    assert len(a.vertices) == len(b.vertices)
    for i in range(60):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(7, i))
        assert tc.certified_radius_invariant(cell)
        assert len(cell.vertices) >= 3
        assert 2 * cell.max_vertex_distance <= cell.sampled_radius


def test_vertices_satisfy_empty_ball(homogeneous):
    for i in range(25):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(19, i))
        pts = cell.generators
        for v in cell.vertices:
            c = v.location
            r = v.norm
            d2 = ((pts - c) ** 2).sum(axis=1)
            assert (d2 >= r * r * (1 - 1e-9)).all()
            # defining generators on the sphere boundary
            sub = pts[list(v.nucleus_indices)]
            assert np.abs(np.linalg.norm(sub - c, axis=1) - r).max() < 1e-9 * max(r, 1)


def test_completeness_bound_insensitive(homogeneous):
    for i in range(60):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(11, i))
        base = {tuple(sorted(v.nucleus_indices)) for v in cell.vertices}
        for factor in (1.00001, 5.0, 50.0):
            verts = tc.enumerate_vertices(cell.generators,
                                          cell.max_vertex_distance * factor)
            assert {tuple(sorted(v.nucleus_indices)) for v in verts} == base


def test_halfplane_oracle_equivalence(homogeneous):
    for i in range(100):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(23, i))
        poly = halfplane_cell_polygon(cell.generators, cell.sampled_radius)
        oracle = polygon_vertex_set(poly)
        mine = {tuple(np.round(v.location, 7)) for v in cell.vertices}
        assert set(oracle) == mine
        for key, exact in oracle.items():
            match = min(cell.vertices,
                        key=lambda v: np.linalg.norm(v.location - exact))
            assert np.linalg.norm(match.location - exact) < 1e-9


def test_cell_is_convex_polygon(homogeneous):
    for i in range(40):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(29, i))
        locs = np.array([v.location for v in cell.vertices])
        assert len(locs) >= 3
        order = np.argsort(np.arctan2(locs[:, 1], locs[:, 0]))
        p = locs[order]
        n = len(p)
        for j in range(n):
            a = p[(j + 1) % n] - p[j]
            b = p[(j + 2) % n] - p[(j + 1) % n]
            assert a[0] * b[1] - a[1] * b[0] > 0


def test_farthest_vertex_is_pointy(homogeneous):
    for i in range(400):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(31, i))
        all_max = max(v.norm for v in cell.vertices)
        pointy_max = max((v.norm for v in cell.vertices if v.pointy), default=-1.0)
        assert all_max == pointy_max
        assert tc.count_pointy_at_least(cell, 0.0) >= 1


def test_event_identity_distance_vs_count(homogeneous):
    for i in range(50):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(37, i))
        for t in (0.0, 0.5, 1.0, 1.5):
            assert (cell.max_vertex_distance >= t) == \
                (tc.count_pointy_at_least(cell, t) >= 1)


def test_mean_pointy_count_smoke(homogeneous):
    counts = []
    for i in range(800):
        cell = tc.build_typical_cell(2, homogeneous, rng_stream(41, i))
        counts.append(tc.count_pointy_at_least(cell, 0.0))
    c = np.asarray(counts, dtype=float)
    se = c.std(ddof=1) / math.sqrt(len(c))
    assert abs(c.mean() - 4.0) < 4 * se


def test_alpha_cell_build():
    model = IntensityModel.radial_power(1.0)
    counts = []
    for i in range(400):
        cell = tc.build_typical_cell(2, model, rng_stream(43, i))
        assert tc.certified_radius_invariant(cell)
        counts.append(tc.count_pointy_at_least(cell, 0.0))
    c = np.asarray(counts, dtype=float)
    se = c.std(ddof=1) / math.sqrt(len(c))
    assert abs(c.mean() - expected_pointy_count(2, 1.0, 0.0)) < 4 * se


def test_d3_cell_build(homogeneous):
    cell = tc.build_typical_cell(3, homogeneous, rng_stream(47, 0))
    assert tc.certified_radius_invariant(cell)
    assert len(cell.vertices) >= 4


def test_cell_json_dump_roundtrip(homogeneous):
    cell = tc.build_typical_cell(2, homogeneous, rng_stream(53, 4))
    blob = cell.to_json_dict()
    again = json.loads(json.dumps(blob))
    assert again == blob
    assert set(again) == {"generators", "vertices", "D", "sampled_radius", "seed"}
    assert again["seed"] == [53, 4]
    assert len(again["vertices"]) == len(cell.vertices)
    v0 = again["vertices"][0]
    assert set(v0) == {"location", "nucleus_indices", "pointy"}
    assert again["D"] == cell.max_vertex_distance
