"""Kirby-calculus moves on diagrams and the bounded 3-sphere recognizer.

Moves are pure functions returning new diagrams.  Sites are validated, never
inferred; a blow-down that cannot bring its circle into normal position
refuses loudly instead of guessing.  The recognizer is a semi-decision:
iterative deepening over blow-downs, handle slides and blow-ups with a
transposition table keyed by canonical codes, plus the determinant
obstruction for definite No answers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .core import (
    Diagram,
    DiagramError,
    FramingParallel,
    GluedCircle,
    Verdict,
    diagram_linking,
    diagram_writhe,
    validate,
)
from .equivalence import canonical_key
from .invariants import SurgeryPresentation, det, linking_matrix, surgery_presentation
from .tangle import (
    Crossing,
    MoveError,
    Strand,
    TangleCode,
    _arcs_share_face,
    crossing_passages,
    crossing_sign,
    faces,
    planarity_problems,
    simplify_with_log,
)


class RefusalError(MoveError):
    """The move's preconditions could not be certified within the budget."""


@dataclass(frozen=True)
class KirbyMove:
    """One rewriting step; args are ids and small ints, replayable in order."""

    tag: str  # blow-up | blow-down | handle-slide | merge-pieces | delete-surface
    args: tuple


BandSite = tuple  # (piece, (strand1, arc1), (strand2, arc2), orient)


def _fresh_circle_id(d: Diagram, prefix: str = "c") -> str:
    taken = {c.id for c in d.circles}
    k = 1
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def _fresh_strand_id(code: TangleCode, prefix: str = "u") -> str:
    taken = {s.id for s in code.strands}
    k = 1
    while f"{prefix}{k}" in taken:
        k += 1
    return f"{prefix}{k}"


def _with_piece(d: Diagram, pid: str, code: TangleCode) -> Diagram:
    return replace(d, pieces=tuple(
        replace(p, tangle=code) if p.id == pid else p for p in d.pieces))


# ---------------------------------------------------------------------------
# blow-up


def region_count(d: Diagram, pid: str) -> int:
    p = d.piece(pid)
    _, fs = faces(p.tangle, p.wall_points())
    return max(len(fs), 1)


def blow_up(d: Diagram, piece: str, region: int = 0, sign: int = 1) -> Diagram:
    """Add a split unknotted circle with framing +1 or -1.

    The region picks a face of the piece's planar code; a split round curve
    is isotopic across every region, so the choice only names the site.
    """
    if sign not in (1, -1):
        raise MoveError("blow-up sign must be +1 or -1")
    p = d.piece(piece)
    if not (0 <= region < region_count(d, piece)):
        raise MoveError(f"piece {piece} has no region {region}")
    sid = _fresh_strand_id(p.tangle)
    cid = _fresh_circle_id(d)
    code = replace(p.tangle, strands=p.tangle.strands + (Strand(sid),))
    out = _with_piece(d, piece, code)
    return replace(out, circles=out.circles + (GluedCircle(cid, ((piece, sid),), sign),))


# ---------------------------------------------------------------------------
# blow-down


def _single_piece_closed(d: Diagram, cid: str):
    c = d.circle(cid)
    if len(c.strand_cycle) != 1:
        return None
    pid, sid = c.strand_cycle[0]
    s = d.piece(pid).tangle.strand(sid)
    return (pid, s) if s.closed else None


def _strand_of_visit(code: TangleCode, xid: str, not_strand_visit):
    """The passage of xid other than the given (strand, visit index)."""
    both = crossing_passages(code, xid)
    for sid, k, p in both:
        if (sid, k) != not_strand_visit:
            return (sid, k, p)
    raise MoveError(f"crossing {xid} has no second passage")


def _is_over(code: TangleCode, xid: str, port: int) -> bool:
    return (code.crossing(xid).over == 1) == (port % 2 == 0)


def _adjacent_gap(s: Strand, i: int, j: int):
    """The gap index between adjacent visits i and j of a strand, or None."""
    n = len(s.visits)
    if s.closed:
        if (i + 1) % n == j:
            return (i + 1) % n
        if (j + 1) % n == i:
            return (j + 1) % n
        return None
    if i + 1 == j:
        return i + 1
    if j + 1 == i:
        return j + 1
    return None


class _BraidBlock:
    """Full or partial twist inserted across parallel lanes.

    Lanes are strand gaps with travel directions; letters follow the braid
    convention of tangle.braid_closure (bottom-left port 2, bottom-right 3,
    top-left 1, top-right 0; a positive letter puts the bottom-left passage
    on top).
    """

    def __init__(self, lane_strands: list[str], lane_dirs: list[int], taken: set):
        self.lane_strands = lane_strands
        self.lane_dirs = lane_dirs
        self.crossings: list[Crossing] = []
        self.visits: dict[int, list] = {i: [] for i in range(len(lane_strands))}
        self._occupant = list(range(len(lane_strands)))
        self._taken = taken

    def _fresh(self) -> str:
        k = 1
        while f"tw{k}" in self._taken:
            k += 1
        self._taken.add(f"tw{k}")
        return f"tw{k}"

    def letter(self, j: int, sign: int):
        cid = self._fresh()
        self.crossings.append(Crossing(cid, 1 if sign > 0 else 2))
        left, right = self._occupant[j - 1], self._occupant[j]
        lp = 2 if self.lane_dirs[left] > 0 else 0
        rp = 3 if self.lane_dirs[right] > 0 else 1
        self.visits[left].append((cid, lp))
        self.visits[right].append((cid, rp))
        self._occupant[j - 1], self._occupant[j] = right, left

    def full_twist(self, sign: int):
        n = len(self.lane_strands)
        for _ in range(n):
            for j in range(1, n):
                self.letter(j, sign)

    def lane_visits(self, lane: int) -> list:
        v = self.visits[lane]
        return v if self.lane_dirs[lane] > 0 else list(reversed(v))


def blow_down(d: Diagram, cid: str, budget: int = 400) -> Diagram:
    """Remove a +1- or -1-framed unknot, twisting the strands through its disk.

    The circle must be recognizable within the budget: one closed strand in
    one piece, no self-crossings after greedy reduction, every other strand
    meeting it in direct piercing pairs arranged in a single twist region.
    Framings of the remaining circles drop by framing * lk^2 and the strands
    receive a compensating full twist.
    """
    c = d.circle(cid)
    if c.framing not in (1, -1):
        raise RefusalError(f"circle {cid} has framing {c.framing}, need +1 or -1")
    if any(isinstance(i, FramingParallel) and i.circle == cid
           for f in d.surfaces for i in f.boundary):
        raise RefusalError(f"circle {cid} carries surface boundary")
    loc = _single_piece_closed(d, cid)
    if loc is None:
        raise RefusalError(f"circle {cid} is not a closed curve inside one piece")
    pid, _ = loc
    p = d.piece(pid)
    code, _ = simplify_with_log(p.tangle, p.wall_points(), budget)
    d = _with_piece(d, pid, code)
    pid, s = _single_piece_closed(d, cid)
    code = d.piece(pid).tangle

    seq = []
    for k, (x, port) in enumerate(s.visits):
        other = _strand_of_visit(code, x, (s.id, k))
        if other[0] == s.id:
            raise RefusalError(f"circle {cid} still crosses itself after reduction")
        seq.append((x, port, other))
    m = len(seq)

    lk_before = {o.id: diagram_linking(d, cid, o.id) for o in d.circles if o.id != cid}

    if m == 0:
        out = _remove_circle_strand(d, cid, pid, s.id, drop_crossings=())
        return out

    if m % 2 != 0:
        raise RefusalError(f"circle {cid} carries an odd crossing pattern")
    k = m // 2
    strand_map = {st.id: st for st in code.strands}
    plan = None
    for r in range(m):
        rot = seq[r:] + seq[:r]
        lanes = []
        ok = True
        for i in range(k):
            xa, pa, (ta, ja, qa) = rot[i]
            xb, pb, (tb, jb, qb) = rot[m - 1 - i]
            if ta != tb:
                ok = False
                break
            t = strand_map[ta]
            gap = _adjacent_gap(t, ja, jb)
            if gap is None:
                ok = False
                break
            if _is_over(code, xa, qa) == _is_over(code, xb, qb):
                ok = False  # not a piercing pair
                break
            sa, sb = crossing_sign(code, xa), crossing_sign(code, xb)
            if sa != sb:
                ok = False
                break
            lanes.append((ta, frozenset({ja, jb}), gap, sa, (xa, xb)))
        if ok:
            plan = lanes
            break
    if plan is None:
        raise RefusalError(
            f"strands through {cid} do not sit in a single twist region")

    drop = {x for lane in plan for x in lane[4]}
    taken = {cr.id for cr in code.crossings}
    block = _BraidBlock([lane[0] for lane in plan], [lane[3] for lane in plan], taken)
    block.full_twist(-c.framing)

    # rebuild each foreign strand: drop its lane visits, insert the block
    per_strand: dict[str, list] = {}
    for lane_idx, (tid, visit_pair, gap, _, _) in enumerate(plan):
        per_strand.setdefault(tid, []).append((lane_idx, visit_pair, gap))
    new_strands = []
    for st in code.strands:
        if st.id == s.id:
            continue
        if st.id not in per_strand:
            new_strands.append(st)
            continue
        inserts = per_strand[st.id]
        visits = list(st.visits)
        marks: list = [None] * (len(visits) + 1)
        removed = set()
        for lane_idx, visit_pair, gap in inserts:
            removed |= set(visit_pair)
            marks[gap] = lane_idx
        rebuilt: list = []
        for pos in range(len(visits) + 1):
            if marks[pos] is not None:
                rebuilt.extend(block.lane_visits(marks[pos]))
            if pos < len(visits) and pos not in removed:
                rebuilt.append(visits[pos])
        new_strands.append(replace(st, visits=tuple(rebuilt)))
    crossings = tuple(cr for cr in code.crossings if cr.id not in drop) \
        + tuple(block.crossings)
    new_code = TangleCode(crossings, tuple(new_strands))
    out = _with_piece(d, pid, new_code)
    out = replace(out, circles=tuple(
        replace(o, framing=o.framing - c.framing * lk_before[o.id] ** 2)
        for o in out.circles if o.id != cid))
    problems = planarity_problems(out.piece(pid).tangle, out.piece(pid).wall_points())
    if problems:
        raise RefusalError(f"blow-down left a non-planar code: {problems[0]}")
    report = validate(out)
    if not report.ok:
        raise RefusalError(f"blow-down broke the diagram: {report.errors()[0].message}")
    return out


def _remove_circle_strand(d: Diagram, cid: str, pid: str, sid: str, drop_crossings) -> Diagram:
    p = d.piece(pid)
    code = TangleCode(
        tuple(c for c in p.tangle.crossings if c.id not in drop_crossings),
        tuple(s for s in p.tangle.strands if s.id != sid))
    out = _with_piece(d, pid, code)
    return replace(out, circles=tuple(c for c in out.circles if c.id != cid))


# ---------------------------------------------------------------------------
# handle slide


def _gap_index(s: Strand, arc_index: int) -> int:
    if s.closed:
        return (arc_index + 1) % max(len(s.visits), 1) if s.visits else 0
    return arc_index


def _pushoff(code: TangleCode, s2: Strand, side: int):
    """Parallel copy of a closed strand on one side (+1 left, -1 right).

    Returns (new crossings, edits to foreign strands as per-gap insertions,
    parallel visit blocks aligned with s2's visits).
    """
    taken = {c.id for c in code.crossings}

    def fresh(base):
        k = 1
        while f"{base}{k}" in taken:
            k += 1
        taken.add(f"{base}{k}")
        return f"{base}{k}"

    new_crossings: list[Crossing] = []
    foreign: dict[str, list] = {}      # strand id -> list of (position, before?, visit)
    blocks: list[list] = []            # parallel's visits per s2 visit
    handled_self: dict[frozenset, dict] = {}

    self_positions: dict[str, list[int]] = {}
    for k, (x, p) in enumerate(s2.visits):
        self_positions.setdefault(x, []).append(k)

    for k, (x, p) in enumerate(s2.visits):
        over_flag = code.crossing(x).over
        other = _strand_of_visit(code, x, (s2.id, k))
        tid, j, q = other
        if tid != s2.id:
            xp = fresh("pp")
            new_crossings.append(Crossing(xp, over_flag))
            # the parallel runs on the side of port p+3 (left) or p+1 (right)
            before = (q - p) % 4 == (3 if side > 0 else 1)
            foreign.setdefault(tid, []).append((j, before, (xp, q)))
            blocks.append([(xp, p)])
        else:
            key = frozenset({k, j})
            if key not in handled_self:
                # roles: A = passage met first in visit order
                a, b = sorted(key)
                pa = s2.visits[a][1]
                pb = s2.visits[b][1]
                x1 = fresh("pp")  # P_A x B
                x2 = fresh("pp")  # A x P_B
                x3 = fresh("pp")  # P_A x P_B
                new_crossings.extend([
                    Crossing(x1, over_flag), Crossing(x2, over_flag),
                    Crossing(x3, over_flag)])
                b_enters_left = (pb - pa) % 4 == (3 if side > 0 else 1)
                a_enters_left = (pa - pb) % 4 == (3 if side > 0 else 1)
                handled_self[key] = {
                    # along A (s2 itself): X2 before or after its visit a;
                    # the parallels mirror their parent's meeting order
                    a: ("self", x2, pa, a_enters_left),
                    b: ("self", x1, pb, b_enters_left),
                    ("pa", a): [(x3, pa), (x1, pa)] if a_enters_left else [(x1, pa), (x3, pa)],
                    ("pb", b): [(x3, pb), (x2, pb)] if b_enters_left else [(x2, pb), (x3, pb)],
                }
            info = handled_self[frozenset({k, j})]
            blocks.append(list(info["pa" if k == min(k, j) else "pb", k]))

    # s2's own extra visits from self-crossing parallels
    s2_inserts: list[tuple[int, bool, tuple]] = []
    for key, info in handled_self.items():
        for idx in sorted(key):
            kind, xid, port, before = info[idx]
            s2_inserts.append((idx, before, (xid, port)))
    return new_crossings, foreign, blocks, s2_inserts


def _insert_visits(visits: tuple, inserts: list) -> tuple:
    """Apply (position, before?, visit) insertions to a visit tuple."""
    out: dict[int, list] = {i: [] for i in range(len(visits) + 1)}
    after: dict[int, list] = {i: [] for i in range(len(visits))}
    for pos, before, visit in inserts:
        if before:
            out[pos].append(visit)
        else:
            after[pos].append(visit)
    rebuilt = []
    for i in range(len(visits)):
        rebuilt.extend(out[i])
        rebuilt.append(visits[i])
        rebuilt.extend(after[i])
    rebuilt.extend(out[len(visits)])
    return tuple(rebuilt)


def handle_slide(d: Diagram, c1: str, c2: str, band: BandSite) -> Diagram:
    """Replace c1 by its band sum with the framed parallel of c2.

    band = (piece, (strand of c1, arc index), (strand of c2, arc index),
    orientation).  The band runs inside a face shared by the two arcs; the
    parallel follows c2 with its framing realized by explicit twists.
    Framing update: f1 + f2 + 2 * orient * lk(c1, c2).
    """
    if c1 == c2:
        raise MoveError("cannot slide a circle over itself")
    pid, (s1id, arc1), (s2id, arc2), orient = band
    if orient not in (1, -1):
        raise MoveError("band orientation must be +1 or -1")
    circ1, circ2 = d.circle(c1), d.circle(c2)
    if (pid, s1id) not in {tuple(e) for e in circ1.strand_cycle}:
        raise MoveError(f"strand {s1id} does not belong to circle {c1}")
    loc2 = _single_piece_closed(d, c2)
    if loc2 is None or loc2[0] != pid or loc2[1].id != s2id:
        raise RefusalError(
            f"circle {c2} must be a closed curve in piece {pid} to be copied")
    p = d.piece(pid)
    code = p.tangle
    s1, s2 = code.strand(s1id), code.strand(s2id)
    if not (0 <= arc1 < s1.arc_count() and 0 <= arc2 < s2.arc_count()):
        raise MoveError("band arc indices out of range")
    if not _arcs_share_face(code, (s1id, arc1), (s2id, arc2), p.wall_points()):
        raise MoveError("band arcs do not bound a common face (or cross a wall)")

    lk12 = diagram_linking(d, c1, c2)
    twist = circ2.framing - diagram_writhe(d, c2)
    lk_to_parallel = {o.id: diagram_linking(d, c2, o.id) for o in d.circles
                      if o.id not in (c2,)}

    last_error = "no planar pushoff"
    # the band traverses the parallel with the requested orientation; when the
    # two arcs run the same way along their shared face, the orientation-
    # consistent band carries a half twist, realized as one extra crossing
    # between the band edges
    variants = [(side, cut, kink)
                for kink in (None, (1, 1), (3, 1), (3, 2), (1, 2))
                for side in (1, -1)
                for cut in (False, True)]
    for side, cut_after_block, kink in variants:
        try:
            out = _slide_once(d, pid, circ1, circ2, s1, s2, arc1, arc2, orient,
                              side, twist, cut_after_block, kink)
        except MoveError as e:
            last_error = str(e)
            continue
        problems = planarity_problems(out.piece(pid).tangle,
                                      out.piece(pid).wall_points())
        if problems:
            last_error = problems[0]
            continue
        report = validate(out)
        if not report.ok:
            last_error = report.errors()[0].message
            continue
        new_f1 = circ1.framing + circ2.framing + 2 * orient * lk12
        out = replace(out, circles=tuple(
            replace(c, framing=new_f1) if c.id == c1 else c for c in out.circles))
        return out
    raise MoveError(f"handle slide failed: {last_error}")


def _slide_once(d, pid, circ1, circ2, s1, s2, arc1, arc2, orient, side, twist,
                cut_after_block=False, kink=None):
    p = d.piece(pid)
    code = p.tangle
    new_crossings, foreign, blocks, s2_inserts = _pushoff(code, s2, side)

    # twist block between s2 and its parallel at the arc2 gap
    taken = {c.id for c in code.crossings} | {c.id for c in new_crossings}
    lanes = ["s2", "par"] if side < 0 else ["par", "s2"]
    block = _BraidBlock(lanes, [1, 1], taken)
    for _ in range(abs(twist)):
        block.letter(1, 1 if twist > 0 else -1)
        block.letter(1, 1 if twist > 0 else -1)
    s2_lane = lanes.index("s2")
    par_lane = lanes.index("par")

    g1 = _gap_index(s1, arc1)
    g2 = _gap_index(s2, arc2)
    # parallel visit list with the twist block and the cut at the arc2 gap
    par_after_gap: list = []
    par_before_gap: list = []
    for k in range(len(s2.visits)):
        target = par_after_gap if k >= g2 else par_before_gap
        target.extend(blocks[k])
    if cut_after_block:
        par_cycle = par_after_gap + par_before_gap + block.lane_visits(par_lane)
    else:
        par_cycle = block.lane_visits(par_lane) + par_after_gap + par_before_gap
    if orient < 0:
        par_cycle = [(x, (q + 2) % 4) for x, q in reversed(par_cycle)]
    kink_crossings = ()
    if kink is not None:
        b, over = kink
        taken2 = ({c.id for c in code.crossings} | {c.id for c in new_crossings}
                  | {c.id for c in block.crossings})
        kid = "bk1"
        n = 1
        while kid in taken2:
            n += 1
            kid = f"bk{n}"
        kink_crossings = (Crossing(kid, over),)
        par_cycle = [(kid, 0)] + par_cycle + [(kid, b)]

    new_strands = []
    for st in code.strands:
        inserts = list(s2_inserts) if st.id == s2.id else list(foreign.get(st.id, []))
        visits = _insert_visits(st.visits, inserts) if inserts else st.visits
        if st.id == s2.id:
            # twist block enters s2 at its arc2 gap
            pos = _shifted(g2, inserts)
            visits = visits[:pos] + tuple(block.lane_visits(s2_lane)) + visits[pos:]
        if st.id == s1.id:
            pos = _shifted(g1, inserts)
            visits = visits[:pos] + tuple(par_cycle) + visits[pos:]
        new_strands.append(replace(st, visits=visits))
    new_code = TangleCode(code.crossings + tuple(new_crossings)
                          + tuple(block.crossings) + kink_crossings,
                          tuple(new_strands))
    return _with_piece(d, pid, new_code)


def _shifted(pos: int, inserts: list) -> int:
    """Gap position in a visit tuple after earlier insertions."""
    shift = 0
    for at, before, _ in inserts:
        if at < pos:
            shift += 1
    return pos + shift


# ---------------------------------------------------------------------------
# surgery and recognition


def spherical_surgery(d: Diagram) -> SurgeryPresentation:
    """Presentation of the 3-manifold obtained by surgery on all circles."""
    return surgery_presentation(d)


def apply_move(d: Diagram, move: KirbyMove) -> Diagram:
    if move.tag == "blow-up":
        piece, region, sign = move.args
        return blow_up(d, piece, region, sign)
    if move.tag == "blow-down":
        return blow_down(d, move.args[0])
    if move.tag == "handle-slide":
        c1, c2, band = move.args
        return handle_slide(d, c1, c2, band)
    if move.tag == "merge-pieces":
        from .reduction import merge_pieces

        return merge_pieces(d, move.args[0])
    if move.tag == "delete-surface":
        from .reduction import delete_superfluous, find_superfluous_surface

        found = find_superfluous_surface(d)
        if found is None or found[0] != move.args[0]:
            raise MoveError(f"surface {move.args[0]} is not deletable here")
        return delete_superfluous(d, *found)
    if move.tag == "replace-pair":
        from .reduction import _replace_pair

        out, cid = _replace_pair(d, move.args[0])
        if cid != move.args[1]:
            raise MoveError(f"replayed surrogate id {cid} != logged {move.args[1]}")
        return out
    raise MoveError(f"unknown move tag {move.tag!r}")


def _slide_candidates(d: Diagram, cap: int = 6):
    """A bounded, deterministically ordered set of handle slides."""
    out = []
    for circ2 in d.circles:
        loc2 = _single_piece_closed(d, circ2.id)
        if loc2 is None:
            continue
        pid, s2 = loc2
        p = d.piece(pid)
        for circ1 in d.circles:
            if circ1.id == circ2.id:
                continue
            for sp, s1id in circ1.strand_cycle:
                if sp != pid:
                    continue
                s1 = p.tangle.strand(s1id)
                found = None
                for a1 in range(s1.arc_count()):
                    for a2 in range(s2.arc_count()):
                        if _arcs_share_face(p.tangle, (s1id, a1), (s2.id, a2),
                                            p.wall_points()):
                            found = (a1, a2)
                            break
                    if found:
                        break
                if found is None:
                    continue
                for orient in (1, -1):
                    band = (pid, (s1id, found[0]), (s2.id, found[1]), orient)
                    out.append(KirbyMove("handle-slide", (circ1.id, circ2.id, band)))
                break
    # prefer slides that shrink the linking matrix
    def score(move):
        try:
            child = apply_move(d, move)
        except MoveError:
            return None
        size = sum(abs(x) for row in linking_matrix(child).entries for x in row)
        return (size, canonical_key(child))

    scored = []
    for mv in out:
        sc = score(mv)
        if sc is not None:
            scored.append((sc, mv))
    scored.sort(key=lambda t: t[0])
    return [mv for _, mv in scored[:cap]]


def _children(d: Diagram, allow_growth: bool):
    """Ordered candidate moves: blow-downs, then slides, then blow-ups."""
    out = []
    for c in sorted(d.circles, key=lambda c: c.id):
        if c.framing in (1, -1):
            try:
                child = blow_down(d, c.id)
            except MoveError:
                continue
            out.append((KirbyMove("blow-down", (c.id,)), child))
    if allow_growth:
        for mv in _slide_candidates(d):
            try:
                out.append((mv, apply_move(d, mv)))
            except MoveError:
                continue
        for sign in (1, -1):
            mv = KirbyMove("blow-up", (d.pieces[0].id, 0, sign))
            out.append((mv, apply_move(d, mv)))
    return out


def recognize_s3(d: Diagram, depth: int = 3) -> Verdict:
    """Does the Kirby-form diagram present the 3-sphere after surgery?

    Yes comes with a move log reaching the empty diagram; No carries the
    determinant obstruction (|det| != 1 survives every move, so H1 of the
    surgered manifold is nontrivial); Unknown reports the exhausted depth.
    """
    if d.pairs or d.surfaces:
        raise DiagramError("the recognizer needs a diagram without sphere "
                           "pairs and surfaces")
    report = validate(d)
    if not report.ok:
        raise DiagramError(f"invalid diagram: {report.errors()[0].message}")
    if d.circles:
        matrix = linking_matrix(d).as_list()
        determinant = det(matrix)
        if abs(determinant) != 1:
            return Verdict.make_no(
                f"|det| = {abs(determinant)}",
                "the surgered manifold has nontrivial first homology")

    def dfs(node: Diagram, remaining: int, table: dict):
        if not node.circles:
            return []
        if len(node.circles) > remaining:
            return None
        key = canonical_key(node)
        if table.get(key, -1) >= remaining:
            return None
        table[key] = remaining
        allow_growth = len(node.circles) < remaining
        for move, child in _children(node, allow_growth):
            sub = dfs(child, remaining - 1, table)
            if sub is not None:
                return [move] + sub
        return None

    for dmax in range(depth + 1):
        found = dfs(d, dmax, {})
        if found is not None:
            return Verdict.make_yes(found, f"empty diagram reached in {len(found)} moves")
    return Verdict.make_unknown(depth, "move search exhausted the depth budget")
