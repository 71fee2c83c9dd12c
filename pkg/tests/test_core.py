"""Diagram model: validation, admissibility, circle recomputation, relabeling."""

import random

import pytest

from msdiagram import catalog
from msdiagram.core import (
    Diagram,
    FramingParallel,
    GluedCircle,
    InternalMaps,
    Kind,
    Piece,
    SpanningSurface,
    SpherePair,
    SphereWall,
    check_admissible,
    diagram_linking,
    diagram_writhe,
    glued_circles,
    handle_counts,
    relabel,
    validate,
)
from msdiagram.tangle import Strand, TangleCode


ALL_NAMES = ["s4-polar", "cp2", "cp2-mirror", "s2xs2", "s1xs3", "swap-diffeo",
             "s4-with-cancelling-pair", "cp2-two-piece", "n-s1s3(3)"]


@pytest.mark.parametrize("name", ALL_NAMES)
def test_catalog_entries_valid_and_admissible(name):
    d = catalog.standard(name)
    report = validate(d)
    assert report.ok, report.errors()
    adm = check_admissible(d)
    assert adm.ok, adm.errors()


def test_validate_empty_diagram_ok():
    d = Diagram(pieces=(Piece("P1"),), sink_count=1)
    assert validate(d).ok


def test_validate_rejects_no_pieces():
    assert not validate(Diagram(pieces=())).ok


def test_validate_rejects_zero_sinks():
    assert not validate(Diagram(pieces=(Piece("P1"),), sink_count=0)).ok


def test_validate_idempotent():
    d = catalog.standard("s2xs2")
    assert validate(d) == validate(d)


def test_validate_reports_broken_cycle():
    # strand cycle that does not close through the pair matching
    p1 = Piece("P1", TangleCode(strands=(Strand("S1", start=("W1", 0), end=("W1", 1)),)),
               walls=(SphereWall("W1", points=2),))
    p2 = Piece("P2", TangleCode(strands=(Strand("S2", start=("W2", 0), end=("W2", 1)),)),
               walls=(SphereWall("W2", points=2),))
    d = Diagram(
        pieces=(p1, p2),
        pairs=(SpherePair("Q1", ("P1", "W1"), ("P2", "W2"), matching=(0, 1)),),
        circles=(GluedCircle("c1", (("P1", "S1"), ("P2", "S2")), framing=0),),
        sink_count=1,
    )
    report = validate(d)
    assert not report.ok
    assert any("Q1" in f.message or "Q1" in f.location for f in report.errors())


def test_handle_counts():
    assert handle_counts(catalog.standard("s4-polar")) == (1, 0, 0, 0, 1)
    assert handle_counts(catalog.standard("cp2")) == (1, 0, 1, 0, 1)
    assert handle_counts(catalog.standard("s1xs3")) == (1, 1, 0, 1, 1)
    assert handle_counts(catalog.standard("s2xs2")) == (1, 0, 2, 0, 1)


def test_admissibility_rejects_genus():
    d = catalog.standard("s1xs3")
    bad = Diagram(pieces=d.pieces, pairs=d.pairs,
                  surfaces=(SpanningSurface("F1", genus=1),), sink_count=1)
    assert validate(bad).ok
    report = check_admissible(bad)
    assert not report.ok
    assert "F1" in report.errors()[0].location


def test_glued_circles_matches_declared():
    for name in ("cp2", "s2xs2", "cp2-two-piece"):
        d = catalog.standard(name)
        rec = glued_circles(d)
        assert sorted(c.id for c in rec) == sorted(c.id for c in d.circles)
        assert sorted(c.framing for c in rec) == sorted(c.framing for c in d.circles)
        assert sorted(len(c.strand_cycle) for c in rec) == \
            sorted(len(c.strand_cycle) for c in d.circles)


def test_glued_circles_smallest_closure():
    # one strand, both ends on the two walls of one pair: a length-1 cycle
    p = Piece("P1", TangleCode(strands=(Strand("S1", start=("W1", 0), end=("W2", 0)),)),
              walls=(SphereWall("W1", 1), SphereWall("W2", 1)))
    d = Diagram(pieces=(p,),
                pairs=(SpherePair("Q1", ("P1", "W1"), ("P1", "W2"), matching=(0,)),),
                circles=(GluedCircle("c1", (("P1", "S1"),), framing=0),),
                sink_count=1)
    assert validate(d).ok, validate(d).errors()
    rec = glued_circles(d)
    assert len(rec) == 1 and len(rec[0].strand_cycle) == 1


def test_glued_circles_two_strand_cycle():
    d = catalog.standard("cp2-two-piece")
    rec = glued_circles(d)
    assert len(rec) == 1
    assert len(rec[0].strand_cycle) == 2

    # independent oracle: brute-force successor following
    succ = {}
    for p in d.pieces:
        for s in p.tangle.strands:
            if s.closed:
                continue
            q = d.pairs[0]
            wall = (p.id, s.end[0])
            if q.wall_a == wall:
                tgt = q.wall_b + (q.matching[s.end[1]],)
            else:
                tgt = q.wall_a + (q.matching.index(s.end[1]),)
            for p2 in d.pieces:
                for s2 in p2.tangle.strands:
                    if not s2.closed and (p2.id, s2.start[0], s2.start[1]) == tgt:
                        succ[(p.id, s.id)] = (p2.id, s2.id)
    start = ("P1", "S1")
    steps, cur = 0, succ[start]
    while cur != start:
        cur = succ[cur]
        steps += 1
    assert steps + 1 == 2


def test_relabel_preserves_verdicts():
    rng = random.Random(7)
    for name in ("s2xs2", "s1xs3", "cp2-two-piece", "s4-with-cancelling-pair"):
        d = catalog.standard(name)
        piece_ids = [p.id for p in d.pieces]
        new = rng.sample(piece_ids, len(piece_ids))
        d2 = relabel(
            d,
            pieces=dict(zip(piece_ids, new)),
            circles={c.id: f"z{i}" for i, c in enumerate(d.circles)},
            pairs={q.id: f"y{i}" for i, q in enumerate(d.pairs)},
            surfaces={f.id: f"w{i}" for i, f in enumerate(d.surfaces)},
        )
        assert validate(d2).ok == validate(d).ok
        assert check_admissible(d2).ok == check_admissible(d).ok
        assert handle_counts(d2) == handle_counts(d)


def test_diagram_linking_and_writhe():
    d = catalog.standard("s2xs2")
    assert diagram_linking(d, "c1", "c2") == 1
    assert diagram_linking(d, "c2", "c1") == 1
    assert diagram_writhe(d, "c1") == 0


def test_internal_maps_checked():
    d = catalog.standard("swap-diffeo")
    assert validate(d).ok
    # mismatched framings under the swap must be flagged
    bad_circles = (
        GluedCircle("c1", (("P1", "S1"),), framing=0),
        GluedCircle("c2", (("P1", "S2"),), framing=5),
    )
    bad = Diagram(pieces=d.pieces, circles=bad_circles, sink_count=1,
                  internal_maps=d.internal_maps, kind=Kind.DIFFEOMORPHISM)
    report = validate(bad)
    assert not report.ok
    assert any("framing" in f.message for f in report.errors())


def test_kind_flag_consistency():
    d = catalog.standard("s2xs2")
    assert not validate(
        Diagram(pieces=d.pieces, circles=d.circles, sink_count=1,
                kind=Kind.DIFFEOMORPHISM)).ok
    maps = InternalMaps(on_pieces=(("P1", "P1"),),
                        on_circles=(("c1", "c1"), ("c2", "c2")), on_sinks=(0,))
    assert not validate(
        Diagram(pieces=d.pieces, circles=d.circles, sink_count=1,
                internal_maps=maps, kind=Kind.VECTOR_FIELD)).ok


def test_surface_wallcurve_matching_enforced():
    from msdiagram.core import WallCurve

    d = catalog.standard("s1xs3")
    bad = Diagram(pieces=d.pieces, pairs=d.pairs,
                  surfaces=(SpanningSurface("F1", boundary=(WallCurve("Q1", 0),)),),
                  sink_count=1)
    assert not validate(bad).ok
