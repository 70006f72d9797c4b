"""Exact rational plane geometry for the diagram engine.

Points are pairs of fractions; no floating point anywhere.  Directions are
reduced to primitive integer vectors so they hash and compare exactly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]
Vec = tuple[Fraction, Fraction]
Dir = tuple[int, int]

__all__ = [
    "Point",
    "Vec",
    "Dir",
    "pt",
    "vsub",
    "vadd",
    "smul",
    "cross",
    "dot",
    "primitive_dir",
    "canon_dir",
    "SegHit",
    "segment_hit",
    "on_segment_interior",
    "winding_number",
    "sort_by_angle_from",
    "COMPASS",
    "COMPASS16",
]

COMPASS: tuple[Dir, ...] = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))

#16 directions, at most 22.5 degrees apart; detour construction drops the few
# that are collinear with incident strands and still has gaps under a half turn
COMPASS16: tuple[Dir, ...] = (
    (1, 0), (2, 1), (1, 1), (1, 2), (0, 1), (-1, 2), (-1, 1), (-2, 1),
    (-1, 0), (-2, -1), (-1, -1), (-1, -2), (0, -1), (1, -2), (1, -1), (2, -1),
)


def pt(x, y) -> Point:
    return (Fraction(x), Fraction(y))


def vsub(a: Point, b: Point) -> Vec:
    return (a[0] - b[0], a[1] - b[1])


def vadd(a: Point, b: Vec) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def smul(t, v: Vec) -> Vec:
    t = Fraction(t)
    return (t * v[0], t * v[1])


def cross(u: Vec, v: Vec) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def primitive_dir(v: Vec) -> Dir:
    """The primitive integer vector with the same direction as v (nonzero)."""
    a = Fraction(v[0])
    b = Fraction(v[1])
    if a == 0 and b == 0:
        raise ValueError("zero vector has no direction")
    num1, den1 = a.numerator, a.denominator
    num2, den2 = b.numerator, b.denominator
    x = num1 * den2
    y = num2 * den1
    g = gcd(abs(x), abs(y))
    return (x // g, y // g)


def canon_dir(v: Vec) -> Dir:
    """Primitive direction up to sign: the representative with (x, y) > (0, *)."""
    d = primitive_dir(v)
    if d[0] < 0 or (d[0] == 0 and d[1] < 0):
        d = (-d[0], -d[1])
    return d


class SegHit:
    """Classification of how two closed segments meet."""

    __slots__ = ("kind", "point")

    def __init__(self, kind: str, point: Point | None = None):
        self.kind = kind  # "cross" | "touch" | "overlap"
        self.point = point

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"SegHit({self.kind}, {self.point})"


def segment_hit(p1: Point, p2: Point, p3: Point, p4: Point) -> SegHit | None:
    """Exact intersection of segments [p1,p2] and [p3,p4].

    "cross" means a transverse double point interior to both segments;
    "touch" is any contact involving a segment endpoint; "overlap" is a
    collinear intersection in more than one point.
    """
    d1 = vsub(p2, p1)
    d2 = vsub(p4, p3)
    denom = cross(d1, d2)
    w = vsub(p3, p1)
    if denom == 0:
        if cross(d1, w) != 0:
            return None  # parallel, distinct lines
        # Collinear: compare 1-d parameters along d1.
        axis = 0 if d1[0] != 0 else 1
        t3 = (p3[axis] - p1[axis]) / d1[axis]
        t4 = (p4[axis] - p1[axis]) / d1[axis]
        lo, hi = min(t3, t4), max(t3, t4)
        inter_lo, inter_hi = max(Fraction(0), lo), min(Fraction(1), hi)
        if inter_lo > inter_hi:
            return None
        if inter_lo == inter_hi:
            x = vadd(p1, smul(inter_lo, d1))
            return SegHit("touch", x)
        return SegHit("overlap")
    t = cross(w, d2) / denom
    u = cross(w, d1) / denom
    if not (0 <= t <= 1 and 0 <= u <= 1):
        return None
    x = vadd(p1, smul(t, d1))
    if 0 < t < 1 and 0 < u < 1:
        return SegHit("cross", x)
    return SegHit("touch", x)


def on_segment_interior(x: Point, a: Point, b: Point) -> bool:
    """Is x strictly inside segment [a, b]?"""
    if cross(vsub(b, a), vsub(x, a)) != 0:
        return False
    t = dot(vsub(x, a), vsub(b, a))
    return 0 < t < dot(vsub(b, a), vsub(b, a))


def winding_number(points: Sequence[Point], q: Point) -> int:
    """Winding number of the closed polygon around q (q off the polygon)."""
    w = 0
    qy = q[1]
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        if a[1] <= qy < b[1] and cross(vsub(b, a), vsub(q, a)) > 0:
            w += 1
        elif b[1] <= qy < a[1] and cross(vsub(b, a), vsub(q, a)) < 0:
            w -= 1
    return w


def sort_by_angle_from(ref: Dir, dirs: Iterable[Dir], clockwise: bool) -> list[Dir]:
    """Directions ordered by rotation angle from ``ref`` in (0, 2*pi).

    Directions collinear with ``ref`` (same or opposite) are handled: same
    direction sorts first, opposite at the half turn.
    """
    sign = -1 if clockwise else 1

    def rank(d: Dir) -> int:
        c = sign * cross(ref, d)
        if c == 0:
            return 0 if dot(ref, d) > 0 else 2
        return 1 if c > 0 else 3

    def cmp(d1: Dir, d2: Dir) -> int:
        r1, r2 = rank(d1), rank(d2)
        if r1 != r2:
            return -1 if r1 < r2 else 1
        if r1 in (0, 2):
            return 0
        c = sign * cross(d1, d2)
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    return sorted(dirs, key=cmp_to_key(cmp))
