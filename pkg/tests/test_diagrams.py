"""Diagram engine: validation, resolution, invariance, classification."""

import random
from fractions import Fraction as F

import pytest

from arcalg import (
    AlgElement,
    Arc,
    Attachment,
    Component,
    Diagram,
    DiagramError,
    Loop,
    Surface,
    WeightedState,
    a_power,
    arc_diagram,
    classify_terminal,
    diagram_crossings,
    diagram_from_dict,
    diagram_to_dict,
    dumps_diagram,
    empty_diagram,
    evaluate,
    generator_diagram,
    loads_diagram,
    loop_component,
    loop_scalar,
    nf,
    one,
    puncture_loop_scalar,
    remove_trivial_loops,
    resolve_crossing,
    resolve_fully,
    resolve_puncture_pair,
    stack,
    v_power,
    validate,
)
from arcalg.presentations import GENS_A3, GEN_A

A1, A2, A3 = GENS_A3


def pts(*coords):
    return tuple((F(x), F(y)) for x, y in coords)


def tent(n, i, j, height, apex=1):
    """Arc from puncture i to j through one apex point."""
    a = (F(i), F(0))
    b = (F(j), F(0))
    mid = ((a[0] + b[0]) / 2, F(apex))
    return Component((a, mid, b), False, Attachment(i, height), Attachment(j, height))


def plateau_arc(n, k, l, m, height, dip=None):
    """Arc from puncture k to l via a plateau at y=3 over x = m +- 1/4.

    With ``dip`` set, a V-finger descends from the plateau to (m, dip),
    poking into the tent of a height-1 arc whose apex sits at x = m.
    """
    left = (F(m) - F(1, 4), F(3))
    right = (F(m) + F(1, 4), F(3))
    inner = ((F(m), F(dip)),) if dip is not None else ()
    points = ((F(k), F(0)), left) + inner + (right, (F(l), F(0)))
    return Component(points, False, Attachment(k, height), Attachment(l, height))


def layered(n, comps):
    """Diagram whose crossings are all over/under by component order (later over)."""
    d0 = Diagram(n, tuple(comps), {})
    over = {}
    for (ka, kb), _ in diagram_crossings(d0):
        if ka[0] == kb[0]:
            raise AssertionError("layered test diagrams must not self-intersect")
        over[(ka, kb)] = "a" if ka[0] > kb[0] else "b"
    return Diagram(n, tuple(comps), over)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_validate_empty_diagram():
    assert validate(empty_diagram(0)) == []
    assert validate(empty_diagram(3)) == []


def test_validate_endpoint_off_puncture():
    comp = Component(pts((1, 0), ("3/2", 1)), False, Attachment(1, 0), Attachment(2, 0))
    errors = validate(Diagram(2, (comp,), {}))
    assert any("is not at puncture" in e for e in errors)


def test_validate_shared_endpoint_touch():
    # two segments meeting at a non-puncture point
    c1 = Component(pts((1, 0), (2, 2), (3, 0)), False, Attachment(1, 0), Attachment(3, 0))
    c2 = Component(pts((1, 0), (2, 2), (3, 0)), False, Attachment(1, 1), Attachment(3, 1))
    errors = validate(Diagram(3, (c1, c2), {}))
    assert any("overlap" in e or "non-transverse" in e for e in errors)


def test_validate_duplicate_heights():
    c1 = tent(2, 1, 2, 0)
    c2 = Component(pts((1, 0), ("3/2", 2), (2, 0)), False, Attachment(1, 0), Attachment(2, 1))
    errors = validate(Diagram(2, (c1, c2), {}))
    assert any("duplicate endpoint height" in e for e in errors)


def test_validate_missing_over_entry():
    l1 = loop_component(0, 4, 0, 1)
    l2 = loop_component(3, 5, -1, 2)
    errors = validate(Diagram(0, (l1, l2), {}))
    assert sum("no over/under entry" in e for e in errors) == 2


def test_validate_segment_through_puncture():
    comp = Component(pts((0, 0), (4, 0), (4, 1), (0, 1)), True)
    errors = validate(Diagram(3, (comp,), {}))
    assert any("passes through puncture" in e for e in errors)


def test_validate_closed_with_attachment():
    comp = Component(pts((0, 0), (1, 1), (2, 0)), True, Attachment(1, 0), None)
    errors = validate(Diagram(2, (comp,), {}))
    assert any("no attachments" in e for e in errors)


# ---------------------------------------------------------------------------
# ground values and single steps
# ---------------------------------------------------------------------------


def test_trivial_loop_value():
    d = Diagram(0, (loop_component(0, 1),), {})
    assert evaluate(d) == AlgElement.from_scalar(loop_scalar(0))


def test_one_puncture_loop_value():
    d = Diagram(3, (loop_component(F(1, 2), F(3, 2)),), {})
    assert evaluate(d) == AlgElement.from_scalar(puncture_loop_scalar(3))


def test_two_puncture_loop_not_removed():
    d = Diagram(3, (loop_component(F(3, 2), F(7, 2)),), {})
    ws = WeightedState(one(3), d)
    kept = remove_trivial_loops(ws)
    assert len(kept.diagram.components) == 1
    assert kept.coefficient == one(3)


def test_remove_trivial_loops_requires_no_crossings():
    p = pts((0, 0), (4, 0), (4, 2), (2, 2), (2, -1), (0, -1))
    comp = Component(p, True)
    d0 = Diagram(0, (comp,), {})
    key = diagram_crossings(d0)[0][0]
    ws = WeightedState(one(0), Diagram(0, (comp,), {key: "a"}))
    with pytest.raises(DiagramError):
        remove_trivial_loops(ws)


def test_empty_diagram_evaluates_to_one():
    assert evaluate(empty_diagram(3)) == AlgElement.one(3)
    assert evaluate(empty_diagram(0)) == AlgElement.one(0)


def test_kink_gives_framing_factor():
    p = pts((0, 0), (4, 0), (4, 2), (2, 2), (2, -1), (0, -1))
    comp = Component(p, True)
    key = diagram_crossings(Diagram(0, (comp,), {}))[0][0]
    unknot = AlgElement.from_scalar(loop_scalar(0))
    values = {
        label: evaluate(Diagram(0, (comp,), {key: label})) for label in ("a", "b")
    }
    twists = {a_power(3, 0) * -1, a_power(-3, 0) * -1}
    got = set()
    for val in values.values():
        for twist in twists:
            if val == unknot * AlgElement.from_scalar(twist):
                got.add(twist)
    assert got == twists  # one choice gives -A^3, the other -A^-3


def test_kink_resolution_tree_size():
    p = pts((0, 0), (4, 0), (4, 2), (2, 2), (2, -1), (0, -1))
    comp = Component(p, True)
    key = diagram_crossings(Diagram(0, (comp,), {}))[0][0]
    assert len(resolve_fully(Diagram(0, (comp,), {key: "a"}))) == 2


def test_resolve_crossing_single_step():
    l1 = loop_component(0, 4, 0, 1)
    l2 = loop_component(3, 5, -1, 2)
    d0 = Diagram(0, (l1, l2), {})
    keys = [k for k, _ in diagram_crossings(d0)]
    d = Diagram(0, (l1, l2), {k: "b" for k in keys})
    ws = WeightedState(one(0), d)
    plus, minus = resolve_crossing(ws, keys[0])
    assert plus.coefficient == a_power(1, 0)
    assert minus.coefficient == a_power(-1, 0)
    for child in (plus, minus):
        assert len(diagram_crossings(child.diagram)) == 1
    with pytest.raises(DiagramError):
        resolve_crossing(ws, ((7, 7), (8, 8)))


def test_r2_pair_full_resolution():
    l1 = loop_component(0, 4, 0, 1)
    l2 = loop_component(3, 5, -1, 2)
    d0 = Diagram(0, (l1, l2), {})
    keys = [k for k, _ in diagram_crossings(d0)]
    d = Diagram(0, (l1, l2), {k: "b" for k in keys})
    assert len(resolve_fully(d)) == 4
    uncrossed = Diagram(0, (loop_component(0, 1), loop_component(2, 3)), {})
    assert evaluate(d) == evaluate(uncrossed)


def test_resolve_puncture_pair_single_step():
    c1 = tent(2, 1, 2, 0, apex=1)
    c2 = tent(2, 1, 2, 1, apex=2)
    d = Diagram(2, (c1, c2), {})
    ws = WeightedState(one(2), d)
    plus, minus = resolve_puncture_pair(ws, 1, ((0, "start"), (1, "start")))
    # coefficients are v1^-1 A^(1/2) and v1^-1 A^(-1/2)
    from arcalg import a_half_power

    assert plus.coefficient == v_power(1, 2, -1) * a_half_power(1, 2)
    assert minus.coefficient == v_power(1, 2, -1) * a_half_power(-1, 2)
    # endpoint count at the puncture dropped by two
    for child in (plus, minus):
        opens = [c for c in child.diagram.components if not c.closed]
        assert len(opens) == 1
        att = {opens[0].start.puncture, opens[0].end.puncture}
        assert att == {2}


def test_resolve_puncture_pair_requires_adjacency():
    c1 = tent(2, 1, 2, 0, apex=1)
    c2 = tent(2, 1, 2, 1, apex=2)
    c3 = tent(2, 1, 2, 2, apex=3)
    d = Diagram(2, (c1, c2, c3), {})
    ws = WeightedState(one(2), d)
    with pytest.raises(DiagramError):
        resolve_puncture_pair(ws, 1, ((0, "start"), (2, "start")))
    with pytest.raises(DiagramError):
        resolve_puncture_pair(ws, 1, ((0, "end"), (1, "start")))


def test_alpha_squared_tree_size():
    c1 = tent(2, 1, 2, 0, apex=1)
    c2 = tent(2, 1, 2, 1, apex=2)
    d = Diagram(2, (c1, c2), {})
    assert len(resolve_fully(d)) == 4


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def test_classify_single_arc():
    d = arc_diagram(2, 1, 2)
    ws = WeightedState(one(2), d)
    assert classify_terminal(ws) == [Arc(1, 2)]


def test_classify_two_parallel_arcs():
    c1 = tent(2, 1, 2, 0, apex=1)
    c2 = tent(2, 1, 2, 1, apex=2)
    ws = WeightedState(one(2), Diagram(2, (c1, c2), {}))
    assert classify_terminal(ws) == [Arc(1, 2), Arc(1, 2)]


def test_classify_two_puncture_loop():
    d = Diagram(3, (loop_component(F(1, 2), F(5, 2)),), {})
    ws = WeightedState(one(3), d)
    assert classify_terminal(ws) == [Loop(frozenset({1, 2}))]


def test_classify_canonicalizes_to_puncture_one_side():
    d = Diagram(3, (loop_component(F(3, 2), F(7, 2)),), {})
    ws = WeightedState(one(3), d)
    assert classify_terminal(ws) == [Loop(frozenset({1}))]


def test_classify_rejects_trivial_loop():
    d = Diagram(3, (loop_component(F(1, 4), F(3, 4)),), {})
    with pytest.raises(DiagramError):
        classify_terminal(WeightedState(one(3), d))


def test_classify_rejects_crossings_and_large_n():
    with pytest.raises(DiagramError):
        classify_terminal(WeightedState(one(4), empty_diagram(4)))


# ---------------------------------------------------------------------------
# stacking and engine/presentation agreement
# ---------------------------------------------------------------------------


def test_stack_empty_is_identity():
    d = arc_diagram(2, 1, 2)
    s = stack(empty_diagram(2), d)
    assert s.components == d.components
    assert evaluate(stack(d, empty_diagram(2))) == evaluate(d)


def test_stack_requires_same_n():
    with pytest.raises(DiagramError):
        stack(empty_diagram(2), empty_diagram(3))


def test_stack_shifts_heights():
    d = arc_diagram(2, 1, 2)
    s = stack(d, d)
    lows = [c for c in s.components[:1]]
    highs = [c for c in s.components[1:]]
    low_heights = {a.height for c in lows for a in (c.start, c.end)}
    high_heights = {a.height for c in highs for a in (c.start, c.end)}
    assert max(low_heights) < min(high_heights)


def test_stack_alpha_squared_f02():
    s2 = Surface(0, 2)
    d = generator_diagram(s2, GEN_A)
    val = evaluate(stack(d, d))
    expected = nf(s2, AlgElement.from_word((GEN_A, GEN_A), 2))
    assert val == expected
    assert val == AlgElement.from_scalar(
        -(v_power(1, 2, -1) * v_power(2, 2, -1)) * (a_power(1, 2) - a_power(-1, 2)) ** 2
    )


def test_engine_presentation_agreement_all_f03_pairs():
    s3 = Surface(0, 3)
    for gi in GENS_A3:
        for gj in GENS_A3:
            d = stack(generator_diagram(s3, gi), generator_diagram(s3, gj))
            assert evaluate(d) == nf(s3, AlgElement.from_word((gi, gj), 3)), (gi, gj)


def test_arc_next_to_trivial_loop():
    arc = tent(2, 1, 2, 0)
    bubble = loop_component(F(1, 4), F(3, 4), 2, 3)
    d = Diagram(2, (arc, bubble), {})
    expected = AlgElement.from_word((GEN_A,), 2, loop_scalar(2))
    assert evaluate(d) == expected


def test_engine_triple_product():
    s3 = Surface(0, 3)
    d = stack(
        stack(generator_diagram(s3, A1), generator_diagram(s3, A2)),
        generator_diagram(s3, A3),
    )
    assert evaluate(d) == nf(s3, AlgElement.from_word((A1, A2, A3), 3))


def test_two_puncture_loop_oracle_equivalence():
    # engine route
    d = Diagram(3, (loop_component(F(3, 2), F(7, 2)),), {})
    engine = evaluate(d)
    # rearranged route via the square expansion of the arc between p2 and p3
    s3 = Surface(0, 3)
    square = nf(
        s3,
        AlgElement.from_word((A1, A1), 3) * (v_power(2, 3) * v_power(3, 3)),
    )
    A = a_power(1, 3)
    rearranged = square - AlgElement.from_scalar(
        A * puncture_loop_scalar(3)
        + loop_scalar(3)
        + a_power(-1, 3) * puncture_loop_scalar(3)
    )
    assert engine == nf(s3, rearranged)
    assert engine == AlgElement.from_scalar(puncture_loop_scalar(3))


# ---------------------------------------------------------------------------
# invariance: R2 insertion, resolution order, R3
# ---------------------------------------------------------------------------


def _finger_cases():
    """(base diagram, fingered diagram) pairs differing by one R2 clasp."""
    cases = []
    arcs = ((1, 2), (2, 3), (1, 3))
    for i, j in arcs:
        m = F(i + j, 2)
        for k, l in arcs:
            if not min(k, l) <= m <= max(k, l):
                continue  # the detour would route the arc across itself
            for dip in (F(1, 2), F(1, 4)):
                base = layered(3, [tent(3, i, j, 0), plateau_arc(3, k, l, m, 1)])
                fingered = layered(
                    3, [tent(3, i, j, 0), plateau_arc(3, k, l, m, 1, dip=dip)]
                )
                cases.append((base, fingered))
    # loop against loop, on several puncture counts and both clasp flavors
    for n in (0, 1, 2, 3):
        lo = loop_component(F(1, 4), F(15, 4), F(-1, 2), F(1, 2))
        hi = loop_component(F(3, 4), F(13, 4), 2, 3)
        hi_fingered = Component(
            pts(("3/4", 2), ("3/2", 2), ("7/4", "1/4"), (2, 2), ("13/4", 2), ("13/4", 3), ("3/4", 3)),
            True,
        )
        base = Diagram(n, (lo, hi), {})
        assert validate(base) == []
        d0 = Diagram(n, (lo, hi_fingered), {})
        for label in ("a", "b"):
            over = {key: label for key, _ in diagram_crossings(d0)}
            cases.append((base, Diagram(n, (lo, hi_fingered), over)))
    return cases


def test_r2_insertion_invariance():
    cases = _finger_cases()
    assert len(cases) >= 20
    for base, fingered in cases:
        assert validate(base) == []
        assert validate(fingered) == []
        extra = len(diagram_crossings(fingered)) - len(diagram_crossings(base))
        assert extra == 2
        assert evaluate(fingered) == evaluate(base)


def test_pair_resolution_order_independence():
    s3 = Surface(0, 3)
    diagrams = []
    for gi in GENS_A3:
        for gj in GENS_A3:
            diagrams.append(stack(generator_diagram(s3, gi), generator_diagram(s3, gj)))
    for gi, gj, gk in ((A1, A2, A3), (A3, A3, A1), (A2, A1, A2), (A1, A3, A2), (A2, A3, A1)):
        diagrams.append(
            stack(
                stack(generator_diagram(s3, gi), generator_diagram(s3, gj)),
                generator_diagram(s3, gk),
            )
        )
    # two-arc ladders built by hand
    for apex2 in (2, 3):
        diagrams.append(
            Diagram(2, (tent(2, 1, 2, 0, apex=1), tent(2, 1, 2, 1, apex=apex2)), {})
        )
    for n in (2, 3):
        diagrams.append(
            Diagram(
                n,
                (
                    tent(n, 1, 2, 0, apex=1),
                    Component(
                        pts((1, 0), ("5/4", 2), ("7/4", 2), (2, 0)),
                        False,
                        Attachment(1, 1),
                        Attachment(2, 1),
                    ),
                ),
                {},
            )
        )
    for n in (1, 2):
        comp = Component(
            pts((1, 0), ("1/2", 1), ("3/2", 2), (1, 0)),
            False,
            Attachment(1, 0),
            Attachment(1, 1),
        )
        diagrams.append(Diagram(n, (comp,), {}))
    assert len(diagrams) >= 20
    for idx, d in enumerate(diagrams):
        base = evaluate(d)
        for seed in (1, 2):
            assert evaluate(d, rng=random.Random(1000 * idx + seed)) == base


def _r3_strands(n, y_plateau, transversal_height):
    b1 = Component(pts((1, 0), ("5/4", 1), (2, 0)), False, Attachment(1, 0), Attachment(2, 0))
    b2 = Component(pts((1, 0), ("7/4", 1), (2, 0)), False, Attachment(1, 1), Attachment(2, 1))
    b3 = Component(
        pts((1, 0), ("5/4", y_plateau), ("7/4", y_plateau), (2, 0)),
        False,
        Attachment(1, transversal_height),
        Attachment(2, transversal_height),
    )
    comps = (b1, b2, b3)
    d0 = Diagram(n, comps, {})
    heights = {0: 0, 1: 1, 2: transversal_height}
    over = {}
    for (ka, kb), _ in diagram_crossings(d0):
        over[(ka, kb)] = "a" if heights[ka[0]] > heights[kb[0]] else "b"
    return Diagram(n, comps, over)


def test_r3_move_invariance():
    checked = 0
    for n in (2, 3):
        for h3 in (2, -1):
            for above, below in (("7/8", "1/2"), ("13/16", "7/16")):
                da = _r3_strands(n, above, h3)
                db = _r3_strands(n, below, h3)
                assert len(diagram_crossings(da)) == 3
                assert len(diagram_crossings(db)) == 3
                assert evaluate(da) == evaluate(db)
                checked += 1
    assert checked >= 5


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def test_json_round_trip():
    s3 = Surface(0, 3)
    d = stack(generator_diagram(s3, A1), generator_diagram(s3, A2))
    text = dumps_diagram(d)
    back = loads_diagram(text)
    assert back.n == d.n
    assert back.components == d.components
    assert back.over == d.over
    assert evaluate(back) == evaluate(d)


def test_json_rational_coordinates():
    d = Diagram(3, (loop_component(F(3, 2), F(7, 2)),), {})
    obj = diagram_to_dict(d)
    assert obj["components"][0]["points"][0] == ["3/2", "-1/2"]
    assert diagram_from_dict(obj).components == d.components


def test_json_malformed():
    with pytest.raises(DiagramError):
        loads_diagram("{not json")
    with pytest.raises(DiagramError):
        loads_diagram('{"n": 1, "components": [{"points": "nope"}]}')


def test_evaluate_rejects_large_n():
    with pytest.raises(DiagramError):
        evaluate(empty_diagram(4))


def test_evaluate_rejects_invalid_diagram():
    comp = Component(pts((1, 0), ("3/2", 1)), False, Attachment(1, 0), Attachment(2, 0))
    with pytest.raises(DiagramError):
        evaluate(Diagram(2, (comp,), {}))
