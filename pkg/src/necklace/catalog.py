"""Built-in necklaces: the gasket, the symbolic square ring GOOD4, and the fig2 family.

The fig2 family reconstructs a 4-map necklace from its stated main nodes
``0, a, a+(1-a)v, v`` inside the triangle ``T = (0, 1, v)``.  The maps are
not published, so this is a design decision:

    f1(z) = v - v z                 (F_1 spans v .. 0)
    f2(z) = a - a conj(z)           (F_2 spans 0 .. a)
    f3(z) = a + (1-a) z             (F_3 spans a .. z3)
    f4(z) = z3 + (v - z3) z         (F_4 spans z3 .. v),   z3 = a + (1-a)v

Each ``f_k(T)`` is a similar triangle, and adjacent ones meet only at one
shared vertex.  ``F_31`` then contains both boundary nodes ``z_2`` and
``z_3`` of ``F_3``, so the necklace is not good.  The extra extremal cut
``{f_3(z_2), f_3(z_3)}`` is the boundary of ``F_33``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .address import make_spec
from .errors import ParameterError
from .geometry import AffineMap2D, GeometricIFS

FIG2_VERSION = 1
FIG2_DEFAULTS = {"a": 0.45, "alpha": 50.0, "beta": 20.0}


def gasket_spec():
    """u_k = (k+1)^w, v_k = k^w."""
    return make_spec(3, {k: (((), (k % 3 + 1,)), ((), (k,))) for k in (1, 2, 3)}, "gasket")


def gasket_ifs():
    p = [np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.5, math.sqrt(3) / 2])]
    return GeometricIFS(tuple(AffineMap2D(((0.5, 0.0), (0.0, 0.5)), tuple(q / 2)) for q in p), "gasket")


def good4_spec():
    return make_spec(4, {k: (((), (k % 4 + 1,)), ((), (k,))) for k in range(1, 5)}, "good4")


def good4_nonadjacent_variant():
    """GOOD4 with ``v_1 = 3^w``: z_1 becomes 2.3^w = z_2, so F_1 meets F_3."""
    rules = {k: (((), (k % 4 + 1,)), ((), (k,))) for k in range(1, 5)}
    rules[1] = (((), (2,)), ((), (3,)))
    return make_spec(4, rules, "good4-bogus-v1")


def good4_u1_variant():
    """GOOD4 with ``u_1 = 3^w``: the level-1 contact pattern is still a 4-cycle."""
    rules = {k: (((), (k % 4 + 1,)), ((), (k,))) for k in range(1, 5)}
    rules[1] = (((), (3,)), ((), (1,)))
    return make_spec(4, rules, "good4-bogus-u1")


def fig2_spec():
    """Symbolic gluing of the fig2 reconstruction (independent of a, v)."""
    return make_spec(
        4,
        {
            1: (((), (3,)), ((), (3,))),
            2: (((1,), (3,)), ((1,), (3,))),
            3: (((4,), (3,)), ((1,), (3,))),
            4: (((), (3,)), ((1,), (3,))),
        },
        "fig2",
    )


def fig2_v(alpha=FIG2_DEFAULTS["alpha"], beta=FIG2_DEFAULTS["beta"]):
    gamma = 180.0 - alpha - beta
    return math.sin(math.radians(beta)) / math.sin(math.radians(gamma)) * cmath.exp(1j * math.radians(alpha))


def fig2_maps(a, v):
    z3 = a + (1 - a) * v
    return [(-v, v, False), (complex(-a), complex(a), True), (complex(1 - a), complex(a), False), (v - z3, z3, False)]


def _triangle(f, T):
    alpha, beta, flip = f
    return [alpha * (z.conjugate() if flip else z) + beta for z in T]


def _clip(subject, clipper):
    """Sutherland-Hodgman clipping of convex polygons given as complex vertex lists."""

    def ccw(poly):
        area = sum((p.conjugate() * q).imag for p, q in zip(poly, poly[1:] + poly[:1]))
        return poly if area > 0 else poly[::-1]

    out = ccw(subject)
    clipper = ccw(clipper)
    for a, b in zip(clipper, clipper[1:] + clipper[:1]):
        if not out:
            break
        inp, out = out, []
        edge = b - a

        def inside(p):
            return (edge.conjugate() * (p - a)).imag >= -1e-12

        for p, q in zip(inp, inp[1:] + inp[:1]):
            if inside(q):
                if not inside(p):
                    out.append(_cross(p, q, a, b))
                out.append(q)
            elif inside(p):
                out.append(_cross(p, q, a, b))
    return out


def _cross(p, q, a, b):
    d1, d2 = q - p, b - a
    den = (d1.conjugate() * d2).imag
    if abs(den) < 1e-15:
        return p
    t = ((a - p).conjugate() * d2).imag / den
    return p + t * d1


def fig2_overlap_report(a, v, tol=1e-9):
    """Pairwise intersections of the four image triangles; adjacent ones may share only their node."""
    T = [0j, 1 + 0j, v]
    maps = fig2_maps(a, v)
    tris = [_triangle(f, T) for f in maps]
    nodes = [0j, complex(a), a + (1 - a) * v, v]
    bad = []
    for i in range(4):
        for j in range(i + 1, 4):
            clipped = _clip(tris[i], tris[j])
            if not clipped:
                continue
            adjacent = (j - i) in (1, 3)
            node = nodes[i] if j == i + 1 else nodes[3]
            if not adjacent or any(abs(p - node) > tol for p in clipped):
                bad.append((i + 1, j + 1))
    # every image triangle must stay inside T
    for k, tri in enumerate(tris, start=1):
        inside = _clip(tri, T)
        area_tri = abs(sum((p.conjugate() * q).imag for p, q in zip(tri, tri[1:] + tri[:1])))
        area_in = abs(sum((p.conjugate() * q).imag for p, q in zip(inside, inside[1:] + inside[:1]))) if inside else 0.0
        if area_in < area_tri * (1 - 1e-9):
            bad.append((k, 0))
    return bad


def fig2_family(a=FIG2_DEFAULTS["a"], alpha=FIG2_DEFAULTS["alpha"], beta=FIG2_DEFAULTS["beta"]):
    """Geometric fig2 necklace for angles ``alpha`` (at 0) and ``beta`` (at 1), in degrees."""
    gamma = 180.0 - alpha - beta
    if not (alpha > 0 and beta > 0 and gamma > 0):
        raise ParameterError("triangle angles must be positive")
    if not (4 * beta < 2 * alpha < gamma):
        raise ParameterError(f"angles must satisfy 4*beta < 2*alpha < gamma (got {beta}, {alpha}, {gamma})")
    if not 0 < a < 1:
        raise ParameterError("a must lie in (0, 1)")
    v = fig2_v(alpha, beta)
    bad = fig2_overlap_report(a, v)
    if bad:
        raise ParameterError(f"a={a} makes image triangles overlap or leave T: pairs {bad}")
    maps = tuple(AffineMap2D.similarity(al, be, fl) for al, be, fl in fig2_maps(a, v))
    return GeometricIFS(maps, f"fig2(a={a:g},alpha={alpha:g},beta={beta:g})")


def fig2_expected_points(a=FIG2_DEFAULTS["a"], alpha=FIG2_DEFAULTS["alpha"], beta=FIG2_DEFAULTS["beta"]):
    """The extra extremal cut ``a + a(1-a)`` and ``a + a(1-a) + (1-a)^2 v``."""
    v = fig2_v(alpha, beta)
    return [a + a * (1 - a) + 0j, a + a * (1 - a) + (1 - a) ** 2 * v]


def builtin_examples():
    return {
        "gasket": {"spec": gasket_spec(), "ifs": gasket_ifs(), "note": "Sierpinski gasket, ratio 1/2"},
        "good4": {"spec": good4_spec(), "ifs": None, "note": "symbolic ring of four copies glued corner to corner"},
        "fig2": {"spec": fig2_spec(), "ifs": fig2_family(),
                 "note": f"reconstruction v{FIG2_VERSION} of the non-good 4-map triangle necklace"},
    }


def square_ifs():
    """Four ratio-1/2 maps to the corners of the unit square (fills the square; not a necklace)."""
    corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return GeometricIFS(tuple(AffineMap2D(((0.5, 0.0), (0.0, 0.5)), (x / 2, y / 2)) for x, y in corners), "square")


def perturbed_gasket(scale=0.45):
    ifs = gasket_ifs()
    f = ifs.maps[0]
    p = f.fixed_point()
    g = AffineMap2D(((scale, 0.0), (0.0, scale)), tuple(p * (1 - scale)))
    return GeometricIFS((g,) + ifs.maps[1:], f"gasket-perturbed({scale:g})")
