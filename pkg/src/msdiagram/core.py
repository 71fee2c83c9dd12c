"""Diagram data model for gradient-like Morse-Smale systems on 4-manifolds.

A diagram is a disjoint union of punctured 3-sphere pieces whose boundary
2-spheres ("walls") are glued in pairs, carrying framed closed curves that
may run through the pairs, and spanning surfaces attached along framing
parallels of the curves or along curves cut on the pair spheres.  Handles
of the presented closed 4-manifold correspond one-to-one to pieces (index
0), sphere pairs (1), glued circles (2), surfaces (3) and sinks (4).

Framing convention: the integer names a parallel relative to the curve's
null-homologous reference parallel when one exists; for curves running
over sphere pairs the integer is declared data and every move updates it
consistently.  The ambient orientation is right-handed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .tangle import MoveError, Strand, TangleCode, code_problems, planarity_problems


class DiagramError(ValueError):
    """A structurally unusable diagram was passed where a valid one is required."""


class Kind(str, Enum):
    VECTOR_FIELD = "vector-field"
    DIFFEOMORPHISM = "diffeomorphism"


WallRef = tuple[str, str]  # (piece id, wall id)


@dataclass(frozen=True)
class SphereWall:
    """One boundary sphere of a deleted disk; marked points sit where strands end.

    Marked points are the indices 0..points-1 in counterclockwise cyclic order.
    """

    id: str
    points: int = 0


@dataclass(frozen=True)
class Piece:
    """A 3-sphere with deleted disks, holding a planar tangle of the curves."""

    id: str
    tangle: TangleCode = field(default_factory=TangleCode)
    walls: tuple[SphereWall, ...] = ()

    def wall(self, wid: str) -> SphereWall:
        for w in self.walls:
            if w.id == wid:
                return w
        raise KeyError(wid)

    def wall_points(self) -> dict[str, int]:
        return {w.id: w.points for w in self.walls}


@dataclass(frozen=True)
class SpherePair:
    """Two walls identified by a sphere homeomorphism.

    matching[i] is the wall_b point glued to wall_a point i; the orientation
    flag records the isotopy class (+1 standard, -1 reversed) of the
    identification.
    """

    id: str
    wall_a: WallRef
    wall_b: WallRef
    matching: tuple[int, ...] = ()
    orientation: int = 1


@dataclass(frozen=True)
class GluedCircle:
    """A closed framed curve: a cyclic chain of strands glued through pairs.

    Strand orientations agree with the traversal order; a circle contained
    in one piece is a single closed strand.
    """

    id: str
    strand_cycle: tuple[tuple[str, str], ...]  # (piece id, strand id)
    framing: int = 0


@dataclass(frozen=True)
class FramingParallel:
    """Surface boundary component running along the framing parallel of a circle."""

    circle: str
    sign: int = 1


@dataclass(frozen=True)
class WallCurve:
    """Surface boundary component cut on a pair sphere; occurs in matched pairs."""

    pair: str
    index: int = 0


@dataclass(frozen=True)
class SpanningSurface:
    id: str
    genus: int = 0
    boundary: tuple = ()  # FramingParallel | WallCurve entries, with multiplicity


@dataclass(frozen=True)
class InternalMaps:
    """Action of a diffeomorphism on the five structural index sets."""

    on_pieces: tuple[tuple[str, str], ...] = ()
    on_pairs: tuple[tuple[str, str], ...] = ()
    on_circles: tuple[tuple[str, str], ...] = ()
    on_surfaces: tuple[tuple[str, str], ...] = ()
    on_sinks: tuple[int, ...] = ()

    def pieces(self) -> dict[str, str]:
        return dict(self.on_pieces)

    def pairs(self) -> dict[str, str]:
        return dict(self.on_pairs)

    def circles(self) -> dict[str, str]:
        return dict(self.on_circles)

    def surfaces(self) -> dict[str, str]:
        return dict(self.on_surfaces)


@dataclass(frozen=True)
class KirbyAnnotation:
    """Handles recorded only by count once a diagram is reduced to Kirby form.

    dotted lists the 0-framed surrogate circles standing in for replaced
    sphere pairs; they are 1-handles of the presented manifold.
    """

    one_handles: int = 0
    three_handles: int = 0
    sinks: int = 1
    dotted: tuple[str, ...] = ()


@dataclass(frozen=True)
class Diagram:
    pieces: tuple[Piece, ...] = ()
    pairs: tuple[SpherePair, ...] = ()
    circles: tuple[GluedCircle, ...] = ()
    surfaces: tuple[SpanningSurface, ...] = ()
    sink_count: int = 1
    internal_maps: InternalMaps | None = None
    kind: Kind = Kind.VECTOR_FIELD
    sink_incidence: tuple[tuple[int, ...], ...] | None = None  # one row per sink, over surfaces
    annotation: KirbyAnnotation | None = None

    def piece(self, pid: str) -> Piece:
        for p in self.pieces:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def pair(self, qid: str) -> SpherePair:
        for q in self.pairs:
            if q.id == qid:
                return q
        raise KeyError(qid)

    def circle(self, cid: str) -> GluedCircle:
        for c in self.circles:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def surface(self, fid: str) -> SpanningSurface:
        for f in self.surfaces:
            if f.id == fid:
                return f
        raise KeyError(fid)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a semi-decision: Yes and No carry a witness or obstruction,
    Unknown carries the exhausted budget."""

    value: str  # "Yes" | "No" | "Unknown"
    witness: object = None
    detail: str = ""

    @property
    def yes(self) -> bool:
        return self.value == "Yes"

    @property
    def no(self) -> bool:
        return self.value == "No"

    @property
    def unknown(self) -> bool:
        return self.value == "Unknown"

    @staticmethod
    def make_yes(witness, detail: str = "") -> "Verdict":
        return Verdict("Yes", witness, detail)

    @staticmethod
    def make_no(witness, detail: str = "") -> "Verdict":
        return Verdict("No", witness, detail)

    @staticmethod
    def make_unknown(budget, detail: str = "") -> "Verdict":
        return Verdict("Unknown", budget, detail)


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]


# ---------------------------------------------------------------------------
# derived lookups


def wall_of_pair(d: Diagram, wall: WallRef) -> SpherePair | None:
    for q in d.pairs:
        if q.wall_a == wall or q.wall_b == wall:
            return q
    return None


def strand_circle_index(d: Diagram) -> dict[tuple[str, str], str]:
    """(piece, strand) -> circle id for every strand claimed by a circle."""
    out = {}
    for c in d.circles:
        for entry in c.strand_cycle:
            out[tuple(entry)] = c.id
    return out


def endpoint_usage(d: Diagram) -> dict[tuple[str, str, int], tuple[str, str]]:
    """(piece, wall, point) -> (strand, 'start'|'end') over all strand ends."""
    out = {}
    for p in d.pieces:
        for s in p.tangle.strands:
            for role, pt in (("start", s.start), ("end", s.end)):
                if pt is not None:
                    out.setdefault((p.id, pt[0], pt[1]), (s.id, role))
    return out


def circle_passages(d: Diagram, cid: str) -> list[tuple[str, int]]:
    """Pairs crossed by a circle, as (pair id, +1 for wall_a->wall_b)."""
    c = d.circle(cid)
    out = []
    n = len(c.strand_cycle)
    for k, (pid, sid) in enumerate(c.strand_cycle):
        s = d.piece(pid).tangle.strand(sid)
        if s.end is None:
            continue
        wall = (pid, s.end[0])
        q = wall_of_pair(d, wall)
        if q is None:
            raise DiagramError(f"circle {cid}: strand {sid} ends on unpaired wall {wall}")
        out.append((q.id, 1 if q.wall_a == wall else -1))
    return out


def handle_counts(d: Diagram) -> tuple[int, int, int, int, int]:
    """Handle numbers (n0..n4) of the presented manifold."""
    return (len(d.pieces), len(d.pairs), len(d.circles), len(d.surfaces), d.sink_count)


# ---------------------------------------------------------------------------
# validation


def _check_pieces(d: Diagram, findings: list[Finding]) -> None:
    seen = set()
    for p in d.pieces:
        if p.id in seen:
            findings.append(Finding("error", f"piece {p.id}", "duplicate piece id"))
        seen.add(p.id)
        wids = [w.id for w in p.walls]
        if len(set(wids)) != len(wids):
            findings.append(Finding("error", f"piece {p.id}", "duplicate wall ids"))
        for w in p.walls:
            if w.points < 0:
                findings.append(Finding("error", f"wall {p.id}.{w.id}", "negative point count"))
        for msg in code_problems(p.tangle):
            findings.append(Finding("error", f"piece {p.id}", msg))
        for s in p.tangle.strands:
            for pt in (s.start, s.end):
                if pt is None:
                    continue
                try:
                    w = p.wall(pt[0])
                except KeyError:
                    findings.append(
                        Finding("error", f"piece {p.id}/strand {s.id}",
                                f"endpoint on unknown wall {pt[0]}"))
                    continue
                if not (0 <= pt[1] < w.points):
                    findings.append(
                        Finding("error", f"piece {p.id}/strand {s.id}",
                                f"endpoint on missing point {pt[0]}:{pt[1]}"))
        try:
            for msg in planarity_problems(p.tangle, p.wall_points()):
                findings.append(Finding("error", f"piece {p.id}", msg))
        except (MoveError, KeyError):
            pass  # secondary to the reference errors reported above


def _check_pairs(d: Diagram, findings: list[Finding]) -> None:
    seen = set()
    referenced: dict[WallRef, str] = {}
    for q in d.pairs:
        if q.id in seen:
            findings.append(Finding("error", f"pair {q.id}", "duplicate pair id"))
        seen.add(q.id)
        if q.wall_a == q.wall_b:
            findings.append(Finding("error", f"pair {q.id}", "pair identifies a wall with itself"))
        if q.orientation not in (1, -1):
            findings.append(Finding("error", f"pair {q.id}", "orientation must be +1 or -1"))
        walls = []
        for ref in (q.wall_a, q.wall_b):
            if ref in referenced:
                findings.append(
                    Finding("error", f"pair {q.id}",
                            f"wall {ref[0]}.{ref[1]} already used by pair {referenced[ref]}"))
            referenced[ref] = q.id
            try:
                walls.append(d.piece(ref[0]).wall(ref[1]))
            except KeyError:
                findings.append(
                    Finding("error", f"pair {q.id}", f"unknown wall {ref[0]}.{ref[1]}"))
        if len(walls) == 2:
            ka, kb = walls[0].points, walls[1].points
            if ka != kb:
                findings.append(
                    Finding("error", f"pair {q.id}", f"point counts differ: {ka} vs {kb}"))
            elif sorted(q.matching) != list(range(ka)):
                findings.append(
                    Finding("error", f"pair {q.id}", "matching is not a point bijection"))
    for p in d.pieces:
        for w in p.walls:
            if (p.id, w.id) not in referenced:
                findings.append(
                    Finding("error", f"wall {p.id}.{w.id}", "wall belongs to no pair"))


def _check_circles(d: Diagram, findings: list[Finding]) -> None:
    claimed: dict[tuple[str, str], str] = {}
    for c in d.circles:
        if not c.strand_cycle:
            findings.append(Finding("error", f"circle {c.id}", "empty strand cycle"))
            continue
        strands = []
        broken = False
        for pid, sid in c.strand_cycle:
            key = (pid, sid)
            if key in claimed:
                findings.append(
                    Finding("error", f"circle {c.id}",
                            f"strand {pid}.{sid} already in circle {claimed[key]}"))
                broken = True
                continue
            claimed[key] = c.id
            try:
                strands.append((pid, d.piece(pid).tangle.strand(sid)))
            except KeyError:
                findings.append(
                    Finding("error", f"circle {c.id}", f"unknown strand {pid}.{sid}"))
                broken = True
        if broken or len(strands) != len(c.strand_cycle):
            continue
        if len(strands) == 1 and strands[0][1].closed:
            continue  # a one-piece closed curve
        if any(s.closed for _, s in strands):
            findings.append(
                Finding("error", f"circle {c.id}", "closed strand inside a longer cycle"))
            continue
        for k, (pid, s) in enumerate(strands):
            npid, ns = strands[(k + 1) % len(strands)]
            wall = (pid, s.end[0])
            q = wall_of_pair(d, wall)
            if q is None:
                findings.append(
                    Finding("error", f"circle {c.id}",
                            f"strand {pid}.{s.id} ends on unpaired wall {s.end[0]}"))
                continue
            if q.wall_a == wall:
                other, image = q.wall_b, q.matching[s.end[1]] if s.end[1] < len(q.matching) else None
            else:
                other = q.wall_a
                image = q.matching.index(s.end[1]) if s.end[1] in q.matching else None
            if image is None or ns.start is None or (npid, ns.start[0]) != other or ns.start[1] != image:
                findings.append(
                    Finding("error", f"circle {c.id}",
                            f"cycle does not close through pair {q.id} after strand {pid}.{s.id}"))
    # every strand must belong to exactly one circle
    for p in d.pieces:
        for s in p.tangle.strands:
            if (p.id, s.id) not in claimed:
                findings.append(
                    Finding("error", f"piece {p.id}/strand {s.id}", "strand belongs to no circle"))
    # every wall point must carry exactly one strand end
    usage = endpoint_usage(d)
    for p in d.pieces:
        ends = [pt for s in p.tangle.strands for pt in (s.start, s.end) if pt is not None]
        if len(ends) != len(set(ends)):
            findings.append(Finding("error", f"piece {p.id}", "two strand ends share a point"))
        for w in p.walls:
            for i in range(w.points):
                if (p.id, w.id, i) not in usage:
                    findings.append(
                        Finding("error", f"wall {p.id}.{w.id}", f"marked point {i} unused"))


def _check_surfaces(d: Diagram, findings: list[Finding]) -> None:
    seen = set()
    wallcurves: dict[tuple[str, int], int] = {}
    for f in d.surfaces:
        if f.id in seen:
            findings.append(Finding("error", f"surface {f.id}", "duplicate surface id"))
        seen.add(f.id)
        if f.genus < 0:
            findings.append(Finding("error", f"surface {f.id}", "negative genus"))
        for item in f.boundary:
            if isinstance(item, FramingParallel):
                if item.sign not in (1, -1):
                    findings.append(Finding("error", f"surface {f.id}", "bad boundary sign"))
                try:
                    d.circle(item.circle)
                except KeyError:
                    findings.append(
                        Finding("error", f"surface {f.id}", f"unknown circle {item.circle}"))
            elif isinstance(item, WallCurve):
                try:
                    d.pair(item.pair)
                except KeyError:
                    findings.append(
                        Finding("error", f"surface {f.id}", f"unknown pair {item.pair}"))
                wallcurves[item.pair, item.index] = wallcurves.get((item.pair, item.index), 0) + 1
            else:
                findings.append(Finding("error", f"surface {f.id}", f"bad boundary item {item!r}"))
    for (pair, index), n in sorted(wallcurves.items()):
        if n != 2:
            findings.append(
                Finding("error", f"pair {pair}",
                        f"wall curve {index} occurs {n} times, matched pairs need 2"))


def _check_internal_maps(d: Diagram, findings: list[Finding]) -> None:
    if d.kind == Kind.DIFFEOMORPHISM and d.internal_maps is None:
        findings.append(Finding("error", "diagram", "diffeomorphism diagram without internal maps"))
    if d.kind == Kind.VECTOR_FIELD and d.internal_maps is not None:
        findings.append(Finding("error", "diagram", "vector-field diagram with internal maps"))
    m = d.internal_maps
    if m is None:
        return
    for name, mapping, ids in (
        ("pieces", m.pieces(), [p.id for p in d.pieces]),
        ("pairs", m.pairs(), [q.id for q in d.pairs]),
        ("circles", m.circles(), [c.id for c in d.circles]),
        ("surfaces", m.surfaces(), [f.id for f in d.surfaces]),
    ):
        if sorted(mapping) != sorted(ids) or sorted(mapping.values()) != sorted(ids):
            findings.append(
                Finding("error", f"internal maps/{name}", "not a permutation of the index set"))
    if sorted(m.on_sinks) != list(range(d.sink_count)):
        findings.append(Finding("error", "internal maps/sinks", "not a sink permutation"))
    if any(f.severity == "error" and f.location.startswith("internal maps") for f in findings):
        return
    pc = m.pieces()
    for q in d.pairs:
        img = d.pair(m.pairs()[q.id])
        src = {pc[q.wall_a[0]], pc[q.wall_b[0]]}
        dst = {img.wall_a[0], img.wall_b[0]}
        if src != dst:
            findings.append(
                Finding("error", f"internal maps/pairs",
                        f"pair {q.id} maps to {img.id} but pieces do not correspond"))
    for c in d.circles:
        img = d.circle(m.circles()[c.id])
        if img.framing != c.framing:
            findings.append(
                Finding("error", "internal maps/circles",
                        f"circle {c.id} (framing {c.framing}) maps to {img.id} "
                        f"(framing {img.framing})"))
        if len(img.strand_cycle) != len(c.strand_cycle):
            findings.append(
                Finding("error", "internal maps/circles",
                        f"circle {c.id} and image {img.id} have different lengths"))
    for f in d.surfaces:
        img = d.surface(m.surfaces()[f.id])
        if img.genus != f.genus:
            findings.append(
                Finding("error", "internal maps/surfaces",
                        f"surface {f.id} and image {img.id} differ in genus"))
        prof = sorted(
            (m.circles()[i.circle], i.sign) if isinstance(i, FramingParallel)
            else (m.pairs()[i.pair], None)
            for i in f.boundary)
        prof_img = sorted(
            (i.circle, i.sign) if isinstance(i, FramingParallel) else (i.pair, None)
            for i in img.boundary)
        if prof != prof_img:
            findings.append(
                Finding("error", "internal maps/surfaces",
                        f"surface {f.id} boundary does not map onto {img.id} boundary"))


def validate(d: Diagram) -> ValidationReport:
    """Check every structural invariant; violations become report findings."""
    findings: list[Finding] = []
    if not d.pieces:
        findings.append(Finding("error", "diagram", "no pieces: a closed 4-manifold needs a 0-handle"))
    if d.pieces and d.sink_count < 1:
        findings.append(Finding("error", "diagram", "sink count must be at least 1"))
    _check_pieces(d, findings)
    if not any(f.severity == "error" for f in findings):
        _check_pairs(d, findings)
        _check_circles(d, findings)
        _check_surfaces(d, findings)
        _check_internal_maps(d, findings)
    if d.sink_incidence is not None:
        rows = d.sink_incidence
        if len(rows) != d.sink_count or any(len(r) != len(d.surfaces) for r in rows):
            findings.append(
                Finding("error", "sinks", "incidence block shape must be sinks x surfaces"))
    return ValidationReport(tuple(findings))


def check_admissible(d: Diagram) -> ValidationReport:
    """Surfaces must be spheres with holes attached along framing parallels.

    Admissibility presumes structural validity, so an invalid diagram is
    never admissible; its structural errors are carried over.
    """
    findings: list[Finding] = list(validate(d).errors())
    wallcurves: dict[tuple[str, int], int] = {}
    for f in d.surfaces:
        if f.genus != 0:
            findings.append(
                Finding("error", f"surface {f.id}",
                        f"genus {f.genus}: admissible surfaces are spheres with holes"))
        for item in f.boundary:
            if isinstance(item, WallCurve):
                wallcurves[item.pair, item.index] = wallcurves.get((item.pair, item.index), 0) + 1
            elif not isinstance(item, FramingParallel):
                findings.append(
                    Finding("error", f"surface {f.id}",
                            "boundary must follow framing parallels or matched wall curves"))
    for (pair, index), n in sorted(wallcurves.items()):
        if n != 2:
            findings.append(
                Finding("error", f"pair {pair}", f"wall curve {index} is not matched"))
    return ValidationReport(tuple(findings))


def glued_circles(d: Diagram) -> list[GluedCircle]:
    """Recompute the circle decomposition from strands and pair matchings.

    The result equals d.circles up to relabeling; recomputed cycles adopt
    the declared circle's id and framing when the cycles agree up to
    rotation, otherwise fresh ids with framing 0 are issued.
    """
    succ: dict[tuple[str, str], tuple[str, str]] = {}
    starts: dict[tuple[str, str, int], tuple[str, str]] = {}
    closed = []
    open_strands = []
    for p in d.pieces:
        for s in p.tangle.strands:
            if s.closed:
                closed.append((p.id, s.id))
            else:
                open_strands.append((p.id, s))
                starts[(p.id, s.start[0], s.start[1])] = (p.id, s.id)
    for pid, s in open_strands:
        wall = (pid, s.end[0])
        q = wall_of_pair(d, wall)
        if q is None:
            raise DiagramError(f"strand {pid}.{s.id} ends on unpaired wall {s.end[0]}")
        if q.wall_a == wall:
            target = q.wall_b + (q.matching[s.end[1]],)
        else:
            target = q.wall_a + (q.matching.index(s.end[1]),)
        nxt = starts.get(target)
        if nxt is None:
            raise DiagramError(
                f"strand {pid}.{s.id}: no strand starts at {target} through pair {q.id}")
        succ[(pid, s.id)] = nxt

    declared = {}
    for c in d.circles:
        cyc = tuple(tuple(e) for e in c.strand_cycle)
        rots = {cyc[k:] + cyc[:k] for k in range(len(cyc))}
        for r in rots:
            declared[r] = c

    out = []
    fresh = 0
    used = set()
    for entry in closed:
        cyc = (entry,)
        c = declared.get(cyc)
        if c is not None:
            out.append(c)
        else:
            fresh += 1
            out.append(GluedCircle(f"g{fresh}", cyc, 0))
    seen = set()
    for pid, s in open_strands:
        key = (pid, s.id)
        if key in seen:
            continue
        cyc = [key]
        seen.add(key)
        cur = succ[key]
        while cur != key:
            if cur in seen:
                raise DiagramError(f"strand chain through {cur} does not close")
            seen.add(cur)
            cyc.append(cur)
            cur = succ[cur]
        cyc = tuple(cyc)
        c = declared.get(cyc)
        if c is not None and c.id not in used:
            used.add(c.id)
            out.append(c)
        else:
            fresh += 1
            out.append(GluedCircle(f"g{fresh}", cyc, 0))
    return out


# ---------------------------------------------------------------------------
# diagram-level curve data


def diagram_linking(d: Diagram, c1: str, c2: str) -> int:
    """Linking number of two glued circles, summed over the pieces."""
    from .tangle import signed_crossing_sum

    if c1 == c2:
        raise ValueError("linking number needs two distinct circles")
    per_piece: dict[str, tuple[set, set]] = {}
    for cid, slot in ((c1, 0), (c2, 1)):
        for pid, sid in d.circle(cid).strand_cycle:
            per_piece.setdefault(pid, (set(), set()))[slot].add(sid)
    total = 0
    for pid, (a, b) in per_piece.items():
        if a and b:
            total += signed_crossing_sum(d.piece(pid).tangle, frozenset(a), frozenset(b))
    if total % 2 != 0:
        raise DiagramError(f"odd crossing sum between circles {c1} and {c2}")
    return total // 2


def diagram_writhe(d: Diagram, cid: str) -> int:
    """Signed self-crossing sum of a glued circle over all its pieces."""
    from .tangle import signed_crossing_sum

    per_piece: dict[str, set] = {}
    for pid, sid in d.circle(cid).strand_cycle:
        per_piece.setdefault(pid, set()).add(sid)
    return sum(
        signed_crossing_sum(d.piece(pid).tangle, frozenset(g), frozenset(g))
        for pid, g in per_piece.items())


def simplify_diagram(d: Diagram, budget: int = 10000) -> tuple[Diagram, list[tuple[str, object]]]:
    """Greedy Reidemeister reduction applied piece by piece.

    Returns the reduced diagram and the applied moves as (piece id, move)
    records.  Strand and circle identities survive; only crossings go away.
    """
    from .tangle import simplify_with_log

    moves: list[tuple[str, object]] = []
    pieces = []
    for p in d.pieces:
        code, log = simplify_with_log(p.tangle, p.wall_points(), budget)
        moves.extend((p.id, mv) for mv in log)
        pieces.append(replace(p, tangle=code))
    return replace(d, pieces=tuple(pieces)), moves


# ---------------------------------------------------------------------------
# relabeling


def relabel(d: Diagram, pieces: dict[str, str] | None = None,
            pairs: dict[str, str] | None = None,
            circles: dict[str, str] | None = None,
            surfaces: dict[str, str] | None = None,
            strands: dict[tuple[str, str], str] | None = None,
            crossings: dict[tuple[str, str], str] | None = None,
            walls: dict[tuple[str, str], str] | None = None) -> Diagram:
    """Rename ids by (partial) permutations; structure is otherwise unchanged."""
    pieces = pieces or {}
    pairs = pairs or {}
    circles = circles or {}
    surfaces = surfaces or {}
    strands = strands or {}
    crossings = crossings or {}
    walls = walls or {}

    def pm(x): return pieces.get(x, x)

    def new_pieces():
        for p in d.pieces:
            code = p.tangle
            new_strands = []
            for s in code.strands:
                new_strands.append(Strand(
                    strands.get((p.id, s.id), s.id),
                    visits=tuple((crossings.get((p.id, c), c), q) for c, q in s.visits),
                    start=None if s.start is None else (walls.get((p.id, s.start[0]), s.start[0]), s.start[1]),
                    end=None if s.end is None else (walls.get((p.id, s.end[0]), s.end[0]), s.end[1]),
                ))
            new_code = TangleCode(
                crossings=tuple(replace(c, id=crossings.get((p.id, c.id), c.id)) for c in code.crossings),
                strands=tuple(new_strands),
            )
            yield Piece(pm(p.id), new_code,
                        tuple(replace(w, id=walls.get((p.id, w.id), w.id)) for w in p.walls))

    def wref(r: WallRef) -> WallRef:
        return (pm(r[0]), walls.get(r, r[1]))

    new_pairs = tuple(
        replace(q, id=pairs.get(q.id, q.id), wall_a=wref(q.wall_a), wall_b=wref(q.wall_b))
        for q in d.pairs)
    new_circles = tuple(
        replace(c, id=circles.get(c.id, c.id),
                strand_cycle=tuple((pm(p), strands.get((p, s), s)) for p, s in c.strand_cycle))
        for c in d.circles)

    def item(i):
        if isinstance(i, FramingParallel):
            return FramingParallel(circles.get(i.circle, i.circle), i.sign)
        return WallCurve(pairs.get(i.pair, i.pair), i.index)

    new_surfaces = tuple(
        replace(f, id=surfaces.get(f.id, f.id), boundary=tuple(item(i) for i in f.boundary))
        for f in d.surfaces)
    maps = d.internal_maps
    if maps is not None:
        maps = InternalMaps(
            on_pieces=tuple(sorted((pm(a), pm(b)) for a, b in maps.on_pieces)),
            on_pairs=tuple(sorted((pairs.get(a, a), pairs.get(b, b)) for a, b in maps.on_pairs)),
            on_circles=tuple(sorted((circles.get(a, a), circles.get(b, b)) for a, b in maps.on_circles)),
            on_surfaces=tuple(sorted((surfaces.get(a, a), surfaces.get(b, b)) for a, b in maps.on_surfaces)),
            on_sinks=maps.on_sinks,
        )
    ann = d.annotation
    if ann is not None:
        ann = replace(ann, dotted=tuple(circles.get(c, c) for c in ann.dotted))
    return replace(d, pieces=tuple(new_pieces()), pairs=new_pairs, circles=new_circles,
                   surfaces=new_surfaces, internal_maps=maps, annotation=ann)
