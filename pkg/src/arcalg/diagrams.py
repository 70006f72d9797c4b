"""Planar framed-curve diagrams on punctured spheres and the skein evaluator.

A diagram lives in the plane with punctures at (1,0), ..., (n,0); the plane
plus its point at infinity models the n-punctured sphere.  Components are
piecewise-linear with exact rational coordinates: closed polylines avoid
the punctures, open polylines begin and end exactly at puncture positions,
at pairwise distinct integer heights per puncture.  Every transverse double
point carries over/under data; general position (no tangencies, no triple
points, no crossings at punctures) is enforced exactly.

The evaluator rewrites a diagram to an element of the presented algebra:

* a crossing is resolved into its two planar smoothings with coefficients
  A and A^-1 (the A-smoothing opens the two regions swept by rotating the
  over strand counterclockwise onto the under strand, so each over-strand
  end joins the under-strand end clockwise from it; a positive kink then
  carries the usual -A^3 framing factor);
* a height-adjacent pair of ends at puncture i is resolved into the two
  detours around the puncture with coefficients v_i^-1 A^(1/2) (the higher
  strand turns left) and v_i^-1 A^(-1/2) (right);
* crossingless loops enclosing no puncture are removed with the factor
  -A^2 - A^-2, those enclosing exactly one with A + A^-1.  A loop that
  survives removal is still scalar on the sphere whenever n <= 3, because
  one side of it contains at most one puncture; the terminal rendering uses
  min(|enclosed|, n - |enclosed|) to pick the factor.

Each surgery reuses coordinates away from the modified spot and verifies
the outcome exactly, shrinking its local scale until the crossing set is
precisely what the move prescribes.  The pair (puncture-endpoint count,
crossing count) decreases lexicographically at every step, so resolution
terminates.

States share nothing mutable; branches of the resolution tree may run in
parallel and summation order cannot affect the exact result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import presentations, ring
from .freealg import AlgElement, Generator
from .geometry import (
    COMPASS16,
    Dir,
    Point,
    canon_dir,
    cross,
    dot,
    on_segment_interior,
    primitive_dir,
    segment_hit,
    smul,
    sort_by_angle_from,
    vadd,
    vsub,
    winding_number,
)
from .ring import LaurentPoly

__all__ = [
    "DiagramError",
    "Attachment",
    "Component",
    "Diagram",
    "WeightedState",
    "Loop",
    "Arc",
    "CrossKey",
    "puncture_position",
    "validate",
    "diagram_crossings",
    "resolve_crossing",
    "resolve_puncture_pair",
    "remove_trivial_loops",
    "classify_terminal",
    "evaluate",
    "resolve_fully",
    "stack",
    "empty_diagram",
    "arc_diagram",
    "generator_diagram",
    "loop_component",
    "diagram_to_dict",
    "diagram_from_dict",
    "dumps_diagram",
    "loads_diagram",
]

MAX_SHRINK = 60


class DiagramError(ValueError):
    def __init__(self, errors: Sequence[str] | str):
        if isinstance(errors, str):
            errors = [errors]
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def puncture_position(i: int) -> Point:
    return (Fraction(i), Fraction(0))


@dataclass(frozen=True)
class Attachment:
    puncture: int
    height: int


@dataclass(frozen=True)
class Component:
    points: tuple[Point, ...]
    closed: bool = False
    start: Attachment | None = None
    end: Attachment | None = None

    def segment_count(self) -> int:
        return len(self.points) if self.closed else len(self.points) - 1

    def segment(self, k: int) -> tuple[Point, Point]:
        pts = self.points
        return pts[k], pts[(k + 1) % len(pts)]


CrossKey = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class Diagram:
    n: int
    components: tuple[Component, ...]
    over: Mapping[CrossKey, str] = None  # crossing id -> "a" | "b"

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "over", dict(self.over or {}))


@dataclass(frozen=True)
class WeightedState:
    """A node of the resolution tree: an exact coefficient times a diagram."""

    coefficient: LaurentPoly
    diagram: Diagram


@dataclass(frozen=True)
class Loop:
    """A crossingless closed curve, named by its enclosed puncture set.

    On the sphere the loop around S is the loop around the complement of S;
    the stored representative is the one containing puncture 1.
    """

    enclosed: frozenset[int]


@dataclass(frozen=True)
class Arc:
    """A crossingless curve joining two distinct punctures, i < j."""

    i: int
    j: int


# ---------------------------------------------------------------------------
# internal strand/state representation
# ---------------------------------------------------------------------------


@dataclass
class _Strand:
    sid: int
    points: list[Point]
    closed: bool
    start: Attachment | None
    end: Attachment | None

    def segment_count(self) -> int:
        return len(self.points) if self.closed else len(self.points) - 1

    def segment(self, k: int) -> tuple[Point, Point]:
        return self.points[k], self.points[(k + 1) % len(self.points)]

    def terminal_segment(self, side: str) -> int:
        return 0 if side == "start" else self.segment_count() - 1

    def attachment(self, side: str) -> Attachment | None:
        return self.start if side == "start" else self.end


_XC = tuple[Point, tuple[int, int], tuple[int, int]]  # (point, (sid, seg), (sid, seg))
_End = tuple[int, int, str]  # (height, sid, "start"|"end")


@dataclass
class _State:
    n: int
    coeff: LaurentPoly
    strands: dict[int, _Strand]
    over: dict[Point, Dir]
    crossings: list[_XC]
    next_sid: int

    def endpoint_count(self) -> int:
        return sum(0 if s.closed else 2 for s in self.strands.values())


def _ends_at(state: _State, p: int) -> list[_End]:
    """Every open end attached at puncture p, sorted by height."""
    out = []
    for s in state.strands.values():
        if s.closed:
            continue
        if s.start.puncture == p:
            out.append((s.start.height, s.sid, "start"))
        if s.end.puncture == p:
            out.append((s.end.height, s.sid, "end"))
    return sorted(out)


# ---------------------------------------------------------------------------
# exact scanning: general-position errors and crossings
# ---------------------------------------------------------------------------


def _adjacent(strand: _Strand, k1: int, k2: int) -> bool:
    m = strand.segment_count()
    if strand.closed:
        return (k1 - k2) % m in (1, m - 1)
    return abs(k1 - k2) == 1


def _terminal_at(strand: _Strand, k: int, point: Point) -> bool:
    """Does segment k meet ``point`` at a legal open-endpoint of its strand?"""
    if strand.closed:
        return False
    if k == 0 and strand.points[0] == point:
        return True
    if k == strand.segment_count() - 1 and strand.points[-1] == point:
        return True
    return False


def _scan(
    strands: Mapping[int, _Strand],
    n: int,
    changed: set[int] | None = None,
) -> tuple[list[str], list[_XC]]:
    """General-position errors and transverse crossings among segments.

    With ``changed`` given, only pairs touching a changed strand are scanned;
    the caller merges in the untouched crossings itself.
    """
    errors: list[str] = []
    crossings: list[_XC] = []
    punctures = {puncture_position(i): i for i in range(1, n + 1)}
    segs: list[tuple[int, int, Point, Point, tuple]] = []
    for sid, s in strands.items():
        for k in range(s.segment_count()):
            a, b = s.segment(k)
            box = (
                a[0] if a[0] <= b[0] else b[0],
                a[0] if a[0] >= b[0] else b[0],
                a[1] if a[1] <= b[1] else b[1],
                a[1] if a[1] >= b[1] else b[1],
            )
            segs.append((sid, k, a, b, box))

    total = len(segs)
    if changed is None:
        first_indices = range(total)
    else:
        first_indices = [i for i in range(total) if segs[i][0] in changed]
    for idx1 in first_indices:
        sid1, k1, a1, b1, box1 = segs[idx1]
        strand1 = strands[sid1]
        for q, qi in punctures.items():
            if box1[0] <= q[0] <= box1[1] and box1[2] <= q[1] <= box1[3]:
                if on_segment_interior(q, a1, b1):
                    errors.append(f"segment ({sid1},{k1}) passes through puncture {qi}")
                for endpoint in (a1, b1):
                    if endpoint == q and not _terminal_at(strand1, k1, endpoint):
                        errors.append(
                            f"vertex of component {sid1} lies at puncture {qi}"
                        )
        for idx2 in range(total):
            sid2, k2, a2, b2, box2 = segs[idx2]
            if changed is None or sid2 in changed:
                if idx2 <= idx1:
                    continue  # scan each changed pair once
            hit = None
            if box1[0] <= box2[1] and box2[0] <= box1[1] and box1[2] <= box2[3] and box2[2] <= box1[3]:
                hit = segment_hit(a1, b1, a2, b2)
            if hit is None:
                continue
            if sid1 == sid2 and _adjacent(strands[sid1], k1, k2):
                # Adjacent segments legally share one vertex; anything more is
                # a fold-back (two common points force a common line).
                if hit.kind == "overlap":
                    errors.append(f"component {sid1} doubles back at segment {min(k1, k2)}")
                continue
            if hit.kind == "overlap":
                errors.append(f"segments ({sid1},{k1}) and ({sid2},{k2}) overlap")
            elif hit.kind == "touch":
                p = hit.point
                if (
                    p in punctures
                    and _terminal_at(strands[sid1], k1, p)
                    and _terminal_at(strands[sid2], k2, p)
                ):
                    continue  # distinct ends meeting at their shared puncture
                errors.append(
                    f"non-transverse contact of ({sid1},{k1}) and ({sid2},{k2}) at {p}"
                )
            else:
                key1, key2 = (sid1, k1), (sid2, k2)
                if key2 < key1:
                    key1, key2 = key2, key1
                crossings.append((hit.point, key1, key2))
    return errors, crossings


def _structural_errors(d: Diagram) -> list[str]:
    errors = []
    if d.n < 0:
        errors.append("puncture count must be nonnegative")
    heights: dict[int, set[int]] = {}
    for ci, c in enumerate(d.components):
        pts = c.points
        if c.closed:
            if c.start is not None or c.end is not None:
                errors.append(f"component {ci}: closed curves have no attachments")
            if len(pts) < 3:
                errors.append(f"component {ci}: closed curves need at least 3 points")
        else:
            if len(pts) < 2:
                errors.append(f"component {ci}: open curves need at least 2 points")
                continue
            for side, att, endpoint in (("start", c.start, pts[0]), ("end", c.end, pts[-1])):
                if att is None:
                    errors.append(f"component {ci}: open curve lacks a {side} attachment")
                    continue
                if not 1 <= att.puncture <= d.n:
                    errors.append(f"component {ci}: {side} puncture {att.puncture} out of range")
                    continue
                if endpoint != puncture_position(att.puncture):
                    errors.append(
                        f"component {ci}: {side} point {endpoint} is not at puncture {att.puncture}"
                    )
                hs = heights.setdefault(att.puncture, set())
                if att.height in hs:
                    errors.append(
                        f"puncture {att.puncture}: duplicate endpoint height {att.height}"
                    )
                hs.add(att.height)
        m = len(pts) if c.closed else len(pts) - 1
        for k in range(m):
            if pts[k] == pts[(k + 1) % len(pts)]:
                errors.append(f"component {ci}: repeated consecutive point at index {k}")
    return errors


def _triple_point_errors(crossings: list[_XC]) -> list[str]:
    seen: set[Point] = set()
    errors = []
    for xc in crossings:
        if xc[0] in seen:
            errors.append(f"three strands meet at {xc[0]}")
        seen.add(xc[0])
    return errors


def validate(d: Diagram) -> list[str]:
    """All general-position and attachment violations; [] means valid."""
    errors = _structural_errors(d)
    if errors:
        return errors
    strands = {
        ci: _Strand(ci, list(c.points), c.closed, c.start, c.end)
        for ci, c in enumerate(d.components)
    }
    scan_errors, crossings = _scan(strands, d.n)
    errors.extend(scan_errors)
    errors.extend(_triple_point_errors(crossings))
    if errors:
        return errors
    found = {(xc[1], xc[2]) for xc in crossings}
    declared = set(d.over)
    for key in sorted(declared - found):
        errors.append(f"over/under entry {key} matches no crossing")
    for key in sorted(found - declared):
        errors.append(f"crossing {key} has no over/under entry")
    for key, val in d.over.items():
        if val not in ("a", "b"):
            errors.append(f"over/under value for {key} must be 'a' or 'b'")
    return errors


def diagram_crossings(d: Diagram) -> list[tuple[CrossKey, Point]]:
    """Crossing ids and their exact positions, in canonical order."""
    errors = _structural_errors(d)
    if errors:
        raise DiagramError(errors)
    strands = {
        ci: _Strand(ci, list(c.points), c.closed, c.start, c.end)
        for ci, c in enumerate(d.components)
    }
    scan_errors, crossings = _scan(strands, d.n)
    scan_errors.extend(_triple_point_errors(crossings))
    if scan_errors:
        raise DiagramError(scan_errors)
    return sorted(((xc[1], xc[2]), xc[0]) for xc in crossings)


# ---------------------------------------------------------------------------
# Diagram <-> state conversion
# ---------------------------------------------------------------------------


def _seg_dir(strand: _Strand, k: int) -> Dir:
    a, b = strand.segment(k)
    return canon_dir(vsub(b, a))


def _state_from_diagram(d: Diagram, coeff: LaurentPoly | None = None) -> _State:
    errors = validate(d)
    if errors:
        raise DiagramError(errors)
    strands = {
        ci: _Strand(ci, list(c.points), c.closed, c.start, c.end)
        for ci, c in enumerate(d.components)
    }
    _, crossings = _scan(strands, d.n)
    over: dict[Point, Dir] = {}
    for point, (s1, k1), (s2, k2) in crossings:
        label = d.over[((s1, k1), (s2, k2))]
        sid, k = (s1, k1) if label == "a" else (s2, k2)
        over[point] = _seg_dir(strands[sid], k)
    return _State(
        n=d.n,
        coeff=coeff if coeff is not None else ring.one(d.n),
        strands=strands,
        over=over,
        crossings=crossings,
        next_sid=len(strands),
    )


def _diagram_from_state(st: _State) -> Diagram:
    sids = sorted(st.strands)
    index = {sid: i for i, sid in enumerate(sids)}
    comps = tuple(
        Component(tuple(s.points), s.closed, s.start, s.end)
        for s in (st.strands[sid] for sid in sids)
    )
    over: dict[CrossKey, str] = {}
    for point, (s1, k1), (s2, k2) in st.crossings:
        a = (index[s1], k1)
        b = (index[s2], k2)
        od = st.over[point]
        if od == _seg_dir(st.strands[s1], k1):
            label = "a"
        else:
            assert od == _seg_dir(st.strands[s2], k2), "over data lost track of its strand"
            label = "b"
        if b < a:
            a, b, label = b, a, {"a": "b", "b": "a"}[label]
        over[(a, b)] = label
    return Diagram(st.n, comps, over)


# ---------------------------------------------------------------------------
# surgery support
# ---------------------------------------------------------------------------


def _box_contains_puncture(
    center: Point, pts: Iterable[Point], n: int, skip: int | None
) -> bool:
    """Any puncture other than ``skip`` inside the bounding box of the move?

    The modified region of every surgery is contained in this box, so an
    empty box guarantees the move changes nothing about puncture enclosure.
    """
    xs = [center[0]]
    ys = [center[1]]
    for q in pts:
        xs.append(q[0])
        ys.append(q[1])
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    for i in range(1, n + 1):
        if i == skip:
            continue
        q = puncture_position(i)
        if x0 <= q[0] <= x1 and y0 <= q[1] <= y1:
            return True
    return False


def _rebuild(
    st: _State,
    removed: set[int],
    new_strands: list[_Strand],
    local_points: list[Point],
    center: Point,
    skip_puncture: int | None,
) -> tuple[_State | None, list[_XC]]:
    """Candidate state after a surgery, or (None, []) if general position fails.

    Crossings on untouched strands are kept verbatim; everything touching a
    new strand is rescanned exactly.  The caller checks that the rescanned
    crossings are exactly the ones its move allows.
    """
    if _box_contains_puncture(center, local_points, st.n, skip_puncture):
        return None, []
    strands = {sid: s for sid, s in st.strands.items() if sid not in removed}
    for s in new_strands:
        strands[s.sid] = s
    changed = {s.sid for s in new_strands}
    errors, new_crossings = _scan(strands, st.n, changed)
    if errors:
        return None, []
    kept = [xc for xc in st.crossings if xc[1][0] not in removed and xc[2][0] not in removed]
    if _triple_point_errors(kept + new_crossings):
        return None, []
    candidate = _State(
        n=st.n,
        coeff=st.coeff,
        strands=strands,
        over=dict(st.over),
        crossings=kept + new_crossings,
        next_sid=st.next_sid + len(new_strands),
    )
    return candidate, new_crossings


def _old_points_touching(st: _State, removed: set[int]) -> set[Point]:
    return {
        xc[0]
        for xc in st.crossings
        if xc[1][0] in removed or xc[2][0] in removed
    }


# ---------------------------------------------------------------------------
# crossing smoothing
# ---------------------------------------------------------------------------


def _cut_pieces(st: _State, xc: _XC) -> tuple[list[dict], set[int]]:
    """Cut the crossing's strands at its point; pieces keep surviving ends.

    A piece is {"points": [...], "start": Attachment|None, "end": ...} where
    the crossing point itself appears as a sentinel first/last point.
    """
    x, (sid1, k1), (sid2, k2) = xc

    def cut(strand: _Strand, cuts: list[int]) -> list[dict]:
        pts = strand.points
        m = len(pts)
        if strand.closed:
            if len(cuts) == 1:
                k = cuts[0]
                run = [x] + [pts[(k + 1 + t) % m] for t in range(m)] + [x]
                return [{"points": run, "start": None, "end": None}]
            ka, kb = sorted(cuts)
            runA = [x] + [pts[(ka + 1 + t) % m] for t in range((kb - ka) % m)] + [x]
            runB = [x] + [pts[(kb + 1 + t) % m] for t in range((ka - kb) % m)] + [x]
            return [
                {"points": runA, "start": None, "end": None},
                {"points": runB, "start": None, "end": None},
            ]
        if len(cuts) == 1:
            k = cuts[0]
            return [
                {"points": list(pts[: k + 1]) + [x], "start": strand.start, "end": None},
                {"points": [x] + list(pts[k + 1 :]), "start": None, "end": strand.end},
            ]
        ka, kb = sorted(cuts)
        return [
            {"points": list(pts[: ka + 1]) + [x], "start": strand.start, "end": None},
            {"points": [x] + list(pts[ka + 1 : kb + 1]) + [x], "start": None, "end": None},
            {"points": [x] + list(pts[kb + 1 :]), "start": None, "end": strand.end},
        ]

    if sid1 == sid2:
        return cut(st.strands[sid1], [k1, k2]), {sid1}
    return cut(st.strands[sid1], [k1]) + cut(st.strands[sid2], [k2]), {sid1, sid2}


def _piece_x_ends(pieces: list[dict], x: Point) -> list[tuple[int, str, Dir]]:
    """(piece, 'head'|'tail', approach direction) of every cut end."""
    ends = []
    for pi, piece in enumerate(pieces):
        pts = piece["points"]
        if pts[0] == x:
            ends.append((pi, "head", primitive_dir(vsub(pts[1], x))))
        if pts[-1] == x:
            ends.append((pi, "tail", primitive_dir(vsub(pts[-2], x))))
    return ends


def _weld(
    pieces: list[dict],
    joints: dict[tuple[int, str], tuple[int, str]],
    x: Point,
    t: Fraction,
    next_sid: int,
) -> list[_Strand]:
    """Assemble pieces into strands, cutting each welded corner at scale t.

    At a joint the pattern [..., u, x] + [x, w, ...] becomes
    [..., u, x + t(u - x), x + t(w - x), w, ...]: the corner is bypassed by
    a chord, so the two new strands through the old crossing stay disjoint.
    """

    def oriented(pi: int, entry: str) -> list[Point]:
        pts = pieces[pi]["points"]
        return list(pts) if entry == "head" else list(reversed(pts))

    def shrink(u: Point) -> Point:
        return vadd(x, smul(t, vsub(u, x)))

    def attachment(pi: int, end: str):
        return pieces[pi]["start"] if end == "head" else pieces[pi]["end"]

    consumed: set[int] = set()
    out: list[_Strand] = []
    sid = next_sid

    # Open chains start at a free (non-x) piece end.
    for pi, piece in enumerate(pieces):
        if pi in consumed:
            continue
        pts = piece["points"]
        if pts[0] != x:
            entry = "head"
        elif pts[-1] != x:
            entry = "tail"
        else:
            continue
        start_att = attachment(pi, entry)
        chain: list[Point] = []
        cur, centry = pi, entry
        while True:
            consumed.add(cur)
            run = oriented(cur, centry)
            cexit = "tail" if centry == "head" else "head"
            core = run[1:] if run[0] == x else run
            trailing = core[-1] == x
            if trailing:
                core = core[:-1]
            if chain:
                chain.append(shrink(core[0]))
            chain.extend(core)
            if not trailing:
                out.append(_Strand(sid, chain, False, start_att, attachment(cur, cexit)))
                sid += 1
                break
            chain.append(shrink(core[-1]))
            cur, centry = joints[(cur, cexit)]
    # Whatever remains forms x-to-x cycles.
    for pi in range(len(pieces)):
        if pi in consumed:
            continue
        chain = []
        start_key = (pi, "head")
        cur, centry = pi, "head"
        while True:
            consumed.add(cur)
            run = oriented(cur, centry)
            cexit = "tail" if centry == "head" else "head"
            core = run[1:-1]
            chain.append(shrink(core[0]))
            chain.extend(core)
            chain.append(shrink(core[-1]))
            nxt = joints[(cur, cexit)]
            if nxt == start_key:
                break
            cur, centry = nxt
        out.append(_Strand(sid, chain, True, None, None))
        sid += 1
    return out


def _smooth_crossing(st: _State, xc: _XC, sign: int) -> _State:
    """One Kauffman smoothing of a crossing; sign +1 is the A term."""
    x = xc[0]
    pieces, removed = _cut_pieces(st, xc)
    ends = _piece_x_ends(pieces, x)
    assert len(ends) == 4, "a crossing has four local strand ends"
    over_dir = st.over[x]
    over_ends = [e for e in ends if canon_dir(e[2]) == over_dir]
    under_ends = [e for e in ends if canon_dir(e[2]) != over_dir]
    assert len(over_ends) == 2 and len(under_ends) == 2
    # A-regions are swept by rotating the over line counterclockwise onto the
    # under line; the A-smoothing joins them, i.e. each over end connects to
    # the under end clockwise from it (negative cross product).
    joints: dict[tuple[int, str], tuple[int, str]] = {}
    for pi, pe, pd in over_ends:
        matches = [
            (qi, qe)
            for qi, qe, qd in under_ends
            if (cross(pd, qd) < 0) == (sign > 0)
        ]
        assert len(matches) == 1, "smoothing pairing must be unique"
        joints[(pi, pe)] = matches[0]
        joints[matches[0]] = (pi, pe)

    expected = _old_points_touching(st, removed) - {x}
    neighbors = [
        pieces[pi]["points"][1] if pe == "head" else pieces[pi]["points"][-2]
        for pi, pe, _ in ends
    ]
    t = Fraction(1, 4)
    for _ in range(MAX_SHRINK):
        new_strands = _weld(pieces, joints, x, t, st.next_sid)
        # the modified region is spanned by the four shrunk corner points
        corners = [vadd(x, smul(t, vsub(u, x))) for u in neighbors]
        cand, new_cross = _rebuild(st, removed, new_strands, corners, x, None)
        if cand is not None and {c[0] for c in new_cross} == expected:
            cand.coeff = st.coeff * ring.a_power(sign, st.n)
            del cand.over[x]
            assert len(cand.crossings) == len(st.crossings) - 1
            assert cand.endpoint_count() == st.endpoint_count()
            return cand
        t = t / 2
    raise RuntimeError("crossing smoothing could not restore general position")


# ---------------------------------------------------------------------------
# puncture-pair resolution
# ---------------------------------------------------------------------------


def _thin_detour(r_hi: Dir, candidates: list[Dir], r_lo: Dir, clockwise: bool) -> list[Dir]:
    """Drop detour directions while keeping every angular gap under a half turn.

    Gaps below a half turn keep each detour chord inside its wedge, so the
    polyline winds monotonically around the puncture and stays off it.
    """
    sgn = -1 if clockwise else 1

    def gap_ok(u: Dir, v: Dir) -> bool:
        c = sgn * cross(u, v)
        return c > 0 or (c == 0 and dot(u, v) > 0)

    thinned: list[Dir] = []
    last = r_hi
    for d in candidates:
        if dot(last, d) <= 0:
            thinned.append(d)
            last = d
    for mids in (thinned, candidates):
        chain = [r_hi] + mids + [r_lo]
        if all(gap_ok(u, v) for u, v in zip(chain, chain[1:])):
            return mids
    raise RuntimeError("no admissible detour directions around the puncture")


def _join_pair(st: _State, p_idx: int, hi: _End, lo: _End, sign: int) -> _State:
    """Join two height-adjacent ends at a puncture; sign +1 is the A^(1/2) term.

    The two strands become one, detouring around the puncture: for the
    A^(1/2) smoothing the higher strand turns left, which sweeps clockwise
    from its incoming ray; A^(-1/2) sweeps counterclockwise.  New crossings
    with the remaining ends at the puncture are over/under by height.
    """
    p = puncture_position(p_idx)
    h_hi, sid_hi, side_hi = hi
    h_lo, sid_lo, side_lo = lo
    s_hi = st.strands[sid_hi]
    s_lo = st.strands[sid_lo]
    # orient so the hi polyline ends at p and the lo polyline starts at p
    pts_hi = list(s_hi.points) if side_hi == "end" else list(reversed(s_hi.points))
    pts_lo = list(s_lo.points) if side_lo == "start" else list(reversed(s_lo.points))
    u, w = pts_hi[-2], pts_lo[1]
    r_hi = primitive_dir(vsub(u, p))
    r_lo = primitive_dir(vsub(w, p))
    clockwise = sign > 0
    # detour vertices sit at p + t*d; d must not point along any strand end
    # at p, or the vertex lands on that strand at every scale
    blocked_rays = []
    for _, o_sid, o_side in _ends_at(st, p_idx):
        strand = st.strands[o_sid]
        neighbor = strand.points[1] if o_side == "start" else strand.points[-2]
        blocked_rays.append(primitive_dir(vsub(neighbor, p)))
    usable = [
        d
        for d in COMPASS16
        if cross(r_hi, d) != 0
        and cross(r_lo, d) != 0
        and not any(cross(ray, d) == 0 and dot(ray, d) > 0 for ray in blocked_rays)
    ]
    candidates: list[Dir] = []
    for d in sort_by_angle_from(r_hi, usable + [r_lo], clockwise):
        if d == r_lo:
            break
        candidates.append(d)
    mids = _thin_detour(r_hi, candidates, r_lo, clockwise)

    removed = {sid_hi, sid_lo}
    expected = _old_points_touching(st, removed)
    pair_heights = (min(h_hi, h_lo), max(h_hi, h_lo))
    t = Fraction(1, 4)
    for _ in range(MAX_SHRINK):
        a = vadd(p, smul(t, vsub(u, p)))
        b = vadd(p, smul(t, vsub(w, p)))
        detour = [a] + [vadd(p, smul(t, (Fraction(dx), Fraction(dy)))) for dx, dy in mids] + [b]
        if sid_hi == sid_lo:
            new = _Strand(st.next_sid, detour + pts_lo[1:-1], True, None, None)
            det_range = range(0, len(detour) - 1)
        else:
            points = pts_hi[:-1] + detour + pts_lo[1:]
            start_att = s_hi.attachment("start" if side_hi == "end" else "end")
            end_att = s_lo.attachment("end" if side_lo == "start" else "start")
            new = _Strand(st.next_sid, points, False, start_att, end_att)
            ia = len(pts_hi) - 1
            det_range = range(ia, ia + len(detour) - 1)
        cand, new_cross = _rebuild(st, removed, [new], detour, p, p_idx)
        if cand is None:
            t = t / 2
            continue
        got = {c[0] for c in new_cross}
        if not expected <= got:
            t = t / 2
            continue
        ok = True
        over_updates: dict[Point, Dir] = {}
        for point, ka, kb in new_cross:
            if point in expected:
                continue
            if ka[0] == new.sid and ka[1] in det_range:
                det_key, other_key = ka, kb
            elif kb[0] == new.sid and kb[1] in det_range:
                det_key, other_key = kb, ka
            else:
                ok = False
                break
            other = cand.strands[other_key[0]]
            height = None
            for side in ("start", "end"):
                att = None if other.closed else other.attachment(side)
                if (
                    att is not None
                    and att.puncture == p_idx
                    and other.terminal_segment(side) == other_key[1]
                ):
                    height = att.height
            if height is None:
                ok = False
                break
            # the joined pair occupies the height interval between its ends
            if height > pair_heights[1]:
                over_updates[point] = _seg_dir(other, other_key[1])
            elif height < pair_heights[0]:
                over_updates[point] = _seg_dir(cand.strands[det_key[0]], det_key[1])
            else:  # pragma: no cover - adjacency forbids interleaved heights
                ok = False
                break
        if not ok:
            t = t / 2
            continue
        cand.coeff = st.coeff * ring.v_power(p_idx, st.n, -1) * ring.a_half_power(sign, st.n)
        cand.over.update(over_updates)
        assert cand.endpoint_count() == st.endpoint_count() - 2
        return cand
    raise RuntimeError("puncture-pair resolution could not restore general position")


# ---------------------------------------------------------------------------
# loop removal, classification, rendering
# ---------------------------------------------------------------------------


def _enclosed_set(strand: _Strand, n: int) -> frozenset[int]:
    return frozenset(
        q
        for q in range(1, n + 1)
        if winding_number(strand.points, puncture_position(q)) != 0
    )


def _remove_loops_state(st: _State) -> _State:
    assert not st.crossings, "loop removal requires a crossingless state"
    coeff = st.coeff
    strands: dict[int, _Strand] = {}
    for sid, s in st.strands.items():
        if s.closed:
            enclosed = _enclosed_set(s, st.n)
            if len(enclosed) == 0:
                coeff = coeff * ring.loop_scalar(st.n)
                continue
            if len(enclosed) == 1:
                coeff = coeff * ring.puncture_loop_scalar(st.n)
                continue
        strands[sid] = s
    return _State(st.n, coeff, strands, dict(st.over), [], st.next_sid)


_ARC_GENS: dict[int, dict[tuple[int, int], Generator]] = {
    2: {(1, 2): Generator("a")},
    3: {
        (2, 3): Generator("a", 1),
        (1, 3): Generator("a", 2),
        (1, 2): Generator("a", 3),
    },
}


def _render_state(st: _State) -> AlgElement:
    """Terminal state -> coefficient times a word in the arc generators.

    Arcs are ordered by height (stacking order); surviving loops are scalar
    because min(|enclosed|, n - |enclosed|) <= 1 whenever n <= 3.
    """
    coeff = st.coeff
    arcs: list[tuple[int, tuple[int, int]]] = []
    for s in st.strands.values():
        if s.closed:
            enclosed = _enclosed_set(s, st.n)
            size = min(len(enclosed), st.n - len(enclosed))
            if size == 0:
                coeff = coeff * ring.loop_scalar(st.n)
            elif size == 1:
                coeff = coeff * ring.puncture_loop_scalar(st.n)
            else:  # pragma: no cover - impossible for n <= 3
                raise DiagramError(f"loop around {set(enclosed)} is not scalar for n = {st.n}")
        else:
            i, j = s.start.puncture, s.end.puncture
            if i == j:  # pragma: no cover - resolved away before rendering
                raise DiagramError("terminal state contains a reducible arc")
            arcs.append((min(s.start.height, s.end.height), (min(i, j), max(i, j))))
    word = tuple(_ARC_GENS[st.n][ij] for _, ij in sorted(arcs))
    return AlgElement.from_word(word, st.n, coeff)


# ---------------------------------------------------------------------------
# the evaluator
# ---------------------------------------------------------------------------


def _default_pick(st: _State) -> tuple[int, _End, _End] | None:
    for p in range(1, st.n + 1):
        ends = _ends_at(st, p)
        if len(ends) >= 2:
            return p, ends[1], ends[0]
    return None


def _random_pick(rng) -> Callable[[_State], tuple[int, _End, _End] | None]:
    def pick(st: _State):
        options = []
        for p in range(1, st.n + 1):
            ends = _ends_at(st, p)
            for i in range(len(ends) - 1):
                options.append((p, ends[i + 1], ends[i]))
        if not options:
            return None
        return options[rng.randrange(len(options))]

    return pick


def _terminal_states(d: Diagram, chooser) -> list[_State]:
    if d.n > 3:
        raise DiagramError("evaluation is defined for punctured spheres with n <= 3")
    todo = [_state_from_diagram(d)]
    out: list[_State] = []
    while todo:
        st = todo.pop()
        if st.crossings:
            xc = min(st.crossings, key=lambda c: c[0])
            todo.append(_smooth_crossing(st, xc, +1))
            todo.append(_smooth_crossing(st, xc, -1))
            continue
        pick = chooser(st)
        if pick is not None:
            p, hi, lo = pick
            todo.append(_join_pair(st, p, hi, lo, +1))
            todo.append(_join_pair(st, p, hi, lo, -1))
            continue
        out.append(_remove_loops_state(st))
    return out


def evaluate(d: Diagram, rng=None) -> AlgElement:
    """Resolve a diagram to its element of the presented algebra.

    With ``rng`` given, admissible puncture pairs are chosen at random
    instead of lowest-first; the result must not depend on the choice.
    """
    chooser = _default_pick if rng is None else _random_pick(rng)
    states = _terminal_states(d, chooser)
    total = AlgElement.zero(d.n)
    for st in states:
        total = total + _render_state(st)
    if d.n >= 2:
        total = presentations.nf(presentations.Surface(0, d.n), total)
    return total


def resolve_fully(d: Diagram, rng=None) -> list[WeightedState]:
    """The terminal weighted states of the resolution tree, loops removed."""
    chooser = _default_pick if rng is None else _random_pick(rng)
    return [
        WeightedState(st.coeff, _diagram_from_state(st))
        for st in _terminal_states(d, chooser)
    ]


# ---------------------------------------------------------------------------
# public single-step operations
# ---------------------------------------------------------------------------


def resolve_crossing(state: WeightedState, key: CrossKey) -> tuple[WeightedState, WeightedState]:
    """The two smoothings (A term first) of one crossing of the diagram."""
    st = _state_from_diagram(state.diagram, state.coefficient)
    for xc in st.crossings:
        if (xc[1], xc[2]) == tuple(key):
            target = xc
            break
    else:
        raise DiagramError(f"unknown crossing id {key}")
    plus = _smooth_crossing(st, target, +1)
    minus = _smooth_crossing(st, target, -1)
    return (
        WeightedState(plus.coeff, _diagram_from_state(plus)),
        WeightedState(minus.coeff, _diagram_from_state(minus)),
    )


def resolve_puncture_pair(
    state: WeightedState, puncture: int, pair: Sequence[tuple[int, str]]
) -> tuple[WeightedState, WeightedState]:
    """The two detours (A^(1/2) term first) joining two adjacent ends.

    ``pair`` names the ends as (component index, "start"|"end"); they must
    attach to the puncture at adjacent heights.
    """
    st = _state_from_diagram(state.diagram, state.coefficient)
    ends = _ends_at(st, puncture)

    def locate(ref: tuple[int, str]) -> _End:
        comp, side = ref
        for e in ends:
            if e[1] == comp and e[2] == side:
                return e
        raise DiagramError(f"no end of component {comp} ({side}) at puncture {puncture}")

    e1, e2 = locate(tuple(pair[0])), locate(tuple(pair[1]))
    if abs(ends.index(e1) - ends.index(e2)) != 1:
        raise DiagramError("the two ends are not height-adjacent at the puncture")
    hi, lo = (e1, e2) if e1[0] > e2[0] else (e2, e1)
    plus = _join_pair(st, puncture, hi, lo, +1)
    minus = _join_pair(st, puncture, hi, lo, -1)
    return (
        WeightedState(plus.coeff, _diagram_from_state(plus)),
        WeightedState(minus.coeff, _diagram_from_state(minus)),
    )


def remove_trivial_loops(state: WeightedState) -> WeightedState:
    """Delete loops around zero punctures (factor -A^2 - A^-2) or exactly
    one (factor A + A^-1); requires a crossingless diagram."""
    st = _state_from_diagram(state.diagram, state.coefficient)
    if st.crossings:
        raise DiagramError("loop removal requires a crossingless diagram")
    done = _remove_loops_state(st)
    return WeightedState(done.coeff, _diagram_from_state(done))


def classify_terminal(state: WeightedState) -> list[Loop | Arc]:
    """The multiset of simple classes of a terminal state, canonicalized."""
    d = state.diagram
    if d.n > 3:
        raise DiagramError("classification is defined for n <= 3 only")
    st = _state_from_diagram(d, state.coefficient)
    if st.crossings:
        raise DiagramError("terminal classification requires a crossingless diagram")
    out: list[Loop | Arc] = []
    for s in st.strands.values():
        if s.closed:
            enclosed = _enclosed_set(s, st.n)
            if len(enclosed) <= 1:
                raise DiagramError(
                    "trivial or one-puncture loop present; remove trivial loops first"
                )
            if 1 not in enclosed:
                enclosed = frozenset(range(1, d.n + 1)) - enclosed
            out.append(Loop(enclosed))
        else:
            i, j = s.start.puncture, s.end.puncture
            if i == j:
                raise DiagramError("open component with both ends at one puncture is reducible")
            out.append(Arc(min(i, j), max(i, j)))

    def sort_key(c):
        if isinstance(c, Arc):
            return (0, c.i, c.j)
        return (1, tuple(sorted(c.enclosed)))

    return sorted(out, key=sort_key)


# ---------------------------------------------------------------------------
# stacking
# ---------------------------------------------------------------------------

_PERTURB_DIRS = ((1, 2), (2, -1), (-1, 2), (3, 1), (-2, -3))
_PERTURB_SCALES = tuple(Fraction(1, 2**k) for k in range(4, 11))


def _shift_heights(c: Component, shift: int) -> Component:
    if c.closed:
        return c
    return Component(
        c.points,
        False,
        Attachment(c.start.puncture, c.start.height + shift),
        Attachment(c.end.puncture, c.end.height + shift),
    )


def _subdivide(c: Component) -> Component:
    pts = list(c.points)
    out = []
    m = len(pts) if c.closed else len(pts) - 1
    for k in range(m):
        a, b = pts[k], pts[(k + 1) % len(pts)]
        out.append(a)
        out.append(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2))
    if not c.closed:
        out.append(pts[-1])
    return Component(tuple(out), c.closed, c.start, c.end)


def _translate(c: Component, delta: tuple[Fraction, Fraction]) -> Component:
    pts = list(c.points)
    moved = []
    for i, q in enumerate(pts):
        pinned = not c.closed and (i == 0 or i == len(pts) - 1)
        moved.append(q if pinned else vadd(q, delta))
    return Component(tuple(moved), c.closed, c.start, c.end)


def _try_stack(
    d1: Diagram, d2_components: tuple[Component, ...], d2: Diagram, seg_parent
) -> Diagram | None:
    """Assemble the stacked diagram if general position holds, else None."""
    n = d1.n
    comps = tuple(d1.components) + d2_components
    offset = len(d1.components)
    candidate = Diagram(n, comps, {})
    errors = _structural_errors(candidate)
    if errors:
        return None
    strands = {
        ci: _Strand(ci, list(c.points), c.closed, c.start, c.end)
        for ci, c in enumerate(comps)
    }
    scan_errors, crossings = _scan(strands, n)
    if scan_errors or _triple_point_errors(crossings):
        return None
    over: dict[CrossKey, str] = {}
    seen_d2: dict[CrossKey, CrossKey] = {}
    for point, (s1, k1), (s2, k2) in crossings:
        key = ((s1, k1), (s2, k2))
        if s1 < offset and s2 < offset:
            if key not in d1.over:
                return None
            over[key] = d1.over[key]
        elif s1 >= offset and s2 >= offset:
            pa = (s1 - offset, seg_parent(k1))
            pb = (s2 - offset, seg_parent(k2))
            parent = (pa, pb) if pa <= pb else (pb, pa)
            if parent not in d2.over or parent in seen_d2:
                return None
            seen_d2[parent] = key
            label = d2.over[parent]
            if (pa, pb) != parent:
                label = {"a": "b", "b": "a"}[label]
            over[key] = label
        else:
            # between the two diagrams the later (upper) one is over
            over[key] = "a" if s1 >= offset else "b"
    if set(seen_d2) != set(d2.over):
        return None
    return Diagram(n, comps, over)


def stack(d1: Diagram, d2: Diagram) -> Diagram:
    """The product diagram: d2 layered above d1.

    All endpoint heights of d2 are shifted above all of d1's, and at every
    crossing between the two diagrams d2 is the over strand.  If the union
    violates general position, d2 is subdivided and its movable vertices
    are translated by a small rational vector found by search.
    """
    if d1.n != d2.n:
        raise DiagramError(f"puncture counts differ: {d1.n} != {d2.n}")
    for d in (d1, d2):
        errors = validate(d)
        if errors:
            raise DiagramError(errors)
    h1 = [a.height for c in d1.components if not c.closed for a in (c.start, c.end)]
    h2 = [a.height for c in d2.components if not c.closed for a in (c.start, c.end)]
    shift = (max(h1) + 1 - min(h2)) if h1 and h2 else 0
    shifted = tuple(_shift_heights(c, shift) for c in d2.components)
    d2s = Diagram(d2.n, shifted, d2.over)

    direct = _try_stack(d1, shifted, d2s, lambda k: k)
    if direct is not None:
        return direct
    subdivided = tuple(_subdivide(c) for c in shifted)
    for dx, dy in _PERTURB_DIRS:
        for scale in _PERTURB_SCALES:
            delta = (scale * dx, scale * dy)
            moved = tuple(_translate(c, delta) for c in subdivided)
            result = _try_stack(d1, moved, d2s, lambda k: k // 2)
            if result is not None:
                return result
    witness, _ = _scan(
        {
            ci: _Strand(ci, list(c.points), c.closed, c.start, c.end)
            for ci, c in enumerate(tuple(d1.components) + shifted)
        },
        d1.n,
    )
    raise DiagramError(
        ["stacking could not restore general position by perturbation"] + witness[:4]
    )


# ---------------------------------------------------------------------------
# ready-made diagrams
# ---------------------------------------------------------------------------


def empty_diagram(n: int) -> Diagram:
    return Diagram(n, (), {})


def arc_diagram(n: int, i: int, j: int, height_i: int = 0, height_j: int = 0) -> Diagram:
    """A simple arc between punctures i and j, bumped above the axis."""
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise DiagramError(f"invalid arc endpoints {i}, {j} for n = {n}")
    a, b = puncture_position(i), puncture_position(j)
    mid = ((a[0] + b[0]) / 2, Fraction(1))
    comp = Component((a, mid, b), False, Attachment(i, height_i), Attachment(j, height_j))
    return Diagram(n, (comp,), {})


def generator_diagram(surface: presentations.Surface, gen: Generator) -> Diagram:
    """The standard diagram of an arc generator of a punctured sphere."""
    surface = presentations.Surface(*surface)
    if surface == (0, 2) and gen == Generator("a"):
        return arc_diagram(2, 1, 2)
    if surface == (0, 3) and gen.name == "a" and gen.index in (1, 2, 3):
        k = gen.index
        endpoints = {1: (2, 3), 2: (1, 3), 3: (1, 2)}[k]
        return arc_diagram(3, *endpoints)
    raise DiagramError(f"no standard diagram for generator {gen} on {surface}")


def loop_component(x0, x1, y0=Fraction(-1, 2), y1=Fraction(1, 2)) -> Component:
    """A rectangular closed curve; encloses the punctures with x0 < i < x1."""
    x0, x1, y0, y1 = Fraction(x0), Fraction(x1), Fraction(y0), Fraction(y1)
    return Component(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), True, None, None)


# ---------------------------------------------------------------------------
# the diagram file format
# ---------------------------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return str(x)


def diagram_to_dict(d: Diagram) -> dict:
    comps = []
    for c in d.components:
        entry: dict = {
            "closed": c.closed,
            "points": [[_frac_str(x), _frac_str(y)] for x, y in c.points],
        }
        if c.start is not None:
            entry["start"] = {"puncture": c.start.puncture, "height": c.start.height}
        if c.end is not None:
            entry["end"] = {"puncture": c.end.puncture, "height": c.end.height}
        comps.append(entry)
    over = [
        {"a": list(ka), "b": list(kb), "over": label}
        for (ka, kb), label in sorted(d.over.items())
    ]
    return {"n": d.n, "components": comps, "over_under": over}


def diagram_from_dict(obj: Mapping) -> Diagram:
    try:
        n = int(obj["n"])
        comps = []
        for entry in obj.get("components", []):
            points = tuple(
                (Fraction(str(x)), Fraction(str(y))) for x, y in entry["points"]
            )
            closed = bool(entry.get("closed", False))
            start = end = None
            if entry.get("start") is not None:
                start = Attachment(int(entry["start"]["puncture"]), int(entry["start"]["height"]))
            if entry.get("end") is not None:
                end = Attachment(int(entry["end"]["puncture"]), int(entry["end"]["height"]))
            comps.append(Component(points, closed, start, end))
        over = {}
        for entry in obj.get("over_under", []):
            ka = (int(entry["a"][0]), int(entry["a"][1]))
            kb = (int(entry["b"][0]), int(entry["b"][1]))
            label = entry["over"]
            if kb < ka:
                ka, kb = kb, ka
                label = {"a": "b", "b": "a"}.get(label, label)
            over[(ka, kb)] = label
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise DiagramError(f"malformed diagram document: {exc}") from None
    return Diagram(n, tuple(comps), over)


def dumps_diagram(d: Diagram) -> str:
    return json.dumps(diagram_to_dict(d), indent=2)


def loads_diagram(text: str) -> Diagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramError(f"invalid JSON: {exc}") from None
    return diagram_from_dict(obj)
