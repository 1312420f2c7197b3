import numpy as np
import pytest


def clip_halfplane(poly, a, b):
    """Sutherland-Hodgman clip of a convex polygon by {y: <a, y> <= b}."""
    out = []
    n = len(poly)
    for i in range(n):
        cur = poly[i]
        nxt = poly[(i + 1) % n]
        cur_in = a @ cur <= b
        nxt_in = a @ nxt <= b
        if cur_in:
            out.append(cur)
        if cur_in != nxt_in:
            t = (b - a @ cur) / (a @ (nxt - cur))
            out.append(cur + t * (nxt - cur))
    return np.array(out)


def halfplane_cell_polygon(generators, half_width):
    """Voronoi cell of the origin by plain half-plane clipping (d=2 oracle).

    Starts from a [-w, w]^2 square and clips by the bisector of every
    generator; an independent path to the same polygon as subset enumeration.
    """
    w = float(half_width)
    poly = np.array([[-w, -w], [w, -w], [w, w], [-w, w]])
    for p in np.asarray(generators, dtype=np.float64):
        poly = clip_halfplane(poly, p, 0.5 * float(p @ p))
        if len(poly) == 0:
            return poly
    return poly


def polygon_vertex_set(poly, decimals=7):
    """Deduplicated vertex set of a clip-oracle polygon (drops collinear points)."""
    uniq = {}
    n = len(poly)
    for i in range(n):
        a = poly[i] - poly[(i - 1) % n]
        b = poly[(i + 1) % n] - poly[i]
        if abs(a[0] * b[1] - a[1] * b[0]) > 1e-9:
            uniq[tuple(np.round(poly[i], decimals))] = poly[i]
    return uniq


@pytest.fixture(scope="session")
def homogeneous():
    from pvextremes.sampling import IntensityModel
    return IntensityModel.homogeneous()
