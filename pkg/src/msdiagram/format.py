"""MSD/1 text format: one record per line, key=value fields, '#' comments.

Canonical files list records sorted by kind and then by natural id order,
so parse and serialize are mutually inverse: parse(serialize(d)) equals d
structurally, and serialize(parse(text)) reproduces canonical text byte
for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    Diagram,
    FramingParallel,
    GluedCircle,
    InternalMaps,
    Kind,
    KirbyAnnotation,
    Piece,
    SpanningSurface,
    SpherePair,
    SphereWall,
    WallCurve,
)
from .tangle import Crossing, Strand, TangleCode, crossing_passages, crossing_sign

HEADER = "msd 1"
_ID = re.compile(r"[A-Za-z0-9_+-]+\Z")


@dataclass
class ParseError(Exception):
    line: int
    token: str
    expected: str

    def __str__(self):
        return f"line {self.line}: got {self.token!r}, expected {self.expected}"


def natural_key(s: str):
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s))


def _check_id(s: str, what: str):
    if not _ID.match(s):
        raise ValueError(f"{what} id {s!r} contains reserved characters")


# ---------------------------------------------------------------------------
# serialization


def _crossing_ends(code: TangleCode, cid: str) -> str:
    occupant: dict[int, str] = {}
    for s in code.strands:
        for k, (c, p) in enumerate(s.visits):
            if c == cid:
                occupant[p] = f"{s.id}.{k}.i"
                occupant[(p + 2) % 4] = f"{s.id}.{k}.o"
    return ",".join(occupant[p] for p in range(4))


def serialize(d: Diagram) -> str:
    """Canonical MSD/1 text for a diagram."""
    lines = [HEADER]
    for p in sorted(d.pieces, key=lambda p: natural_key(p.id)):
        _check_id(p.id, "piece")
        lines.append(f"piece {p.id}")
    for p in sorted(d.pieces, key=lambda p: natural_key(p.id)):
        for w in sorted(p.walls, key=lambda w: natural_key(w.id)):
            _check_id(w.id, "wall")
            lines.append(f"wall {p.id}.{w.id} points={w.points}")
    for q in sorted(d.pairs, key=lambda q: natural_key(q.id)):
        _check_id(q.id, "pair")
        match = ",".join(str(i) for i in q.matching) if q.matching else "-"
        orient = "+" if q.orientation > 0 else "-"
        lines.append(
            f"pair {q.id} a={q.wall_a[0]}.{q.wall_a[1]} b={q.wall_b[0]}.{q.wall_b[1]} "
            f"match={match} orient={orient}")
    for p in sorted(d.pieces, key=lambda p: natural_key(p.id)):
        for c in sorted(p.tangle.crossings, key=lambda c: natural_key(c.id)):
            _check_id(c.id, "crossing")
            sgn = "+" if crossing_sign(p.tangle, c.id) > 0 else "-"
            lines.append(
                f"crossing {p.id}.{c.id} ends={_crossing_ends(p.tangle, c.id)} "
                f"over={c.over} sign={sgn}")
    for p in sorted(d.pieces, key=lambda p: natural_key(p.id)):
        for s in sorted(p.tangle.strands, key=lambda s: natural_key(s.id)):
            _check_id(s.id, "strand")
            path = ",".join(f"{c}:{port}" for c, port in s.visits) if s.visits else "-"
            frm = f"{s.start[0]}:{s.start[1]}" if s.start else "-"
            to = f"{s.end[0]}:{s.end[1]}" if s.end else "-"
            lines.append(f"strand {p.id}.{s.id} path={path} from={frm} to={to}")
    for c in sorted(d.circles, key=lambda c: natural_key(c.id)):
        _check_id(c.id, "circle")
        strands = ",".join(f"{pid}.{sid}" for pid, sid in c.strand_cycle)
        lines.append(f"circle {c.id} strands={strands} framing={c.framing}")
    for f in sorted(d.surfaces, key=lambda f: natural_key(f.id)):
        _check_id(f.id, "surface")
        items = []
        for item in f.boundary:
            if isinstance(item, FramingParallel):
                items.append(f"C{item.circle}:{'+' if item.sign > 0 else '-'}")
            else:
                items.append(f"W{item.pair}:{item.index}")
        lines.append(f"surface {f.id} genus={f.genus} boundary={','.join(items) or '-'}")
    sinks = f"sinks {d.sink_count}"
    if d.sink_incidence is not None:
        rows = ";".join(",".join(str(x) for x in row) for row in d.sink_incidence)
        sinks += f" incidence={rows}"
    lines.append(sinks)
    if d.internal_maps is not None:
        m = d.internal_maps

        def perm(pairs):
            items = sorted(pairs, key=lambda ab: natural_key(ab[0]))
            return ",".join(b for _, b in items) if items else "-"

        sinks_perm = ",".join(str(i) for i in m.on_sinks) if m.on_sinks else "-"
        lines.append(
            f"imap pieces={perm(m.on_pieces)} pairs={perm(m.on_pairs)} "
            f"circles={perm(m.on_circles)} surfaces={perm(m.on_surfaces)} "
            f"sinks={sinks_perm}")
    if d.annotation is not None:
        a = d.annotation
        line = (f"annotation one_handles={a.one_handles} "
                f"three_handles={a.three_handles} sinks={a.sinks}")
        if a.dotted:
            line += f" dotted={','.join(a.dotted)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str):
        self.records: list[tuple[int, list[str]]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.records.append((lineno, body.split()))

    def fail(self, lineno: int, token: str, expected: str):
        raise ParseError(lineno, token, expected)


def _fields(parser: _Parser, lineno: int, tokens: list[str],
            required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            parser.fail(lineno, tok, "key=value field")
        k, v = tok.split("=", 1)
        if k not in required and k not in optional:
            parser.fail(lineno, k, f"one of {', '.join(required + optional)}")
        if k in out:
            parser.fail(lineno, k, "each key once")
        out[k] = v
    for k in required:
        if k not in out:
            parser.fail(lineno, tokens[0] if tokens else "", f"missing field {k}")
    return out


def _split_ref(parser, lineno, token, what) -> tuple[str, str]:
    if token.count(".") != 1:
        parser.fail(lineno, token, f"{what} as piece.id")
    a, b = token.split(".")
    return a, b


def _int(parser, lineno, token) -> int:
    try:
        return int(token)
    except ValueError:
        parser.fail(lineno, token, "an integer")


def parse(text: str) -> Diagram:
    """Parse MSD/1 text; raises ParseError at the first malformed record."""
    parser = _Parser(text)
    if not parser.records or parser.records[0][1] != ["msd", "1"]:
        got = " ".join(parser.records[0][1]) if parser.records else "(empty)"
        raise ParseError(parser.records[0][0] if parser.records else 1, got, "header 'msd 1'")

    pieces: dict[str, dict] = {}
    pairs: list[SpherePair] = []
    circles: list[GluedCircle] = []
    surfaces: list[SpanningSurface] = []
    sink_count = None
    sink_incidence = None
    imap = None
    annotation = None
    crossing_checks: list[tuple[int, str, str, str]] = []

    for lineno, tokens in parser.records[1:]:
        kind, rest = tokens[0], tokens[1:]
        if kind == "piece":
            if len(rest) != 1:
                parser.fail(lineno, " ".join(rest), "piece <id>")
            if rest[0] in pieces:
                parser.fail(lineno, rest[0], "a fresh piece id")
            pieces[rest[0]] = {"walls": [], "crossings": [], "strands": []}
        elif kind == "wall":
            if len(rest) < 1:
                parser.fail(lineno, "", "wall <piece>.<id> points=<k>")
            pid, wid = _split_ref(parser, lineno, rest[0], "wall")
            if pid not in pieces:
                parser.fail(lineno, pid, "a declared piece")
            f = _fields(parser, lineno, rest[1:], ("points",))
            pieces[pid]["walls"].append(SphereWall(wid, _int(parser, lineno, f["points"])))
        elif kind == "pair":
            if len(rest) < 1:
                parser.fail(lineno, "", "pair <id> a=.. b=.. match=.. orient=..")
            f = _fields(parser, lineno, rest[1:], ("a", "b", "match", "orient"))
            wa = _split_ref(parser, lineno, f["a"], "wall reference")
            wb = _split_ref(parser, lineno, f["b"], "wall reference")
            if f["orient"] not in "+-":
                parser.fail(lineno, f["orient"], "+ or -")
            matching = ()
            if f["match"] != "-":
                matching = tuple(_int(parser, lineno, t) for t in f["match"].split(","))
            pairs.append(SpherePair(rest[0], wa, wb, matching,
                                    1 if f["orient"] == "+" else -1))
        elif kind == "crossing":
            if len(rest) < 1:
                parser.fail(lineno, "", "crossing <piece>.<id> ends=.. over=.. sign=..")
            pid, cid = _split_ref(parser, lineno, rest[0], "crossing")
            if pid not in pieces:
                parser.fail(lineno, pid, "a declared piece")
            f = _fields(parser, lineno, rest[1:], ("ends", "over", "sign"))
            over = _int(parser, lineno, f["over"])
            if over not in (1, 2):
                parser.fail(lineno, f["over"], "over=1 or over=2")
            if f["sign"] not in "+-":
                parser.fail(lineno, f["sign"], "+ or -")
            pieces[pid]["crossings"].append(Crossing(cid, over))
            crossing_checks.append((lineno, pid, cid, f["sign"]))
        elif kind == "strand":
            if len(rest) < 1:
                parser.fail(lineno, "", "strand <piece>.<id> path=.. from=.. to=..")
            pid, sid = _split_ref(parser, lineno, rest[0], "strand")
            if pid not in pieces:
                parser.fail(lineno, pid, "a declared piece")
            f = _fields(parser, lineno, rest[1:], ("path", "from", "to"))
            visits = []
            if f["path"] != "-":
                for node in f["path"].split(","):
                    if ":" not in node:
                        parser.fail(lineno, node, "crossing:port")
                    c, p = node.rsplit(":", 1)
                    visits.append((c, _int(parser, lineno, p)))

            def endpoint(tok):
                if tok == "-":
                    return None
                if ":" not in tok:
                    parser.fail(lineno, tok, "wall:point or -")
                w, i = tok.rsplit(":", 1)
                return (w, _int(parser, lineno, i))

            pieces[pid]["strands"].append(
                Strand(sid, tuple(visits), endpoint(f["from"]), endpoint(f["to"])))
        elif kind == "circle":
            if len(rest) < 1:
                parser.fail(lineno, "", "circle <id> strands=.. framing=..")
            f = _fields(parser, lineno, rest[1:], ("strands", "framing"))
            cycle = tuple(
                _split_ref(parser, lineno, t, "strand reference")
                for t in f["strands"].split(","))
            circles.append(GluedCircle(rest[0], cycle, _int(parser, lineno, f["framing"])))
        elif kind == "surface":
            if len(rest) < 1:
                parser.fail(lineno, "", "surface <id> genus=.. boundary=..")
            f = _fields(parser, lineno, rest[1:], ("genus", "boundary"))
            items = []
            if f["boundary"] != "-":
                for tok in f["boundary"].split(","):
                    if ":" not in tok or len(tok) < 3:
                        parser.fail(lineno, tok, "C<circle>:<sign> or W<pair>:<index>")
                    ref, arg = tok.rsplit(":", 1)
                    if ref.startswith("C"):
                        if arg not in "+-":
                            parser.fail(lineno, arg, "+ or -")
                        items.append(FramingParallel(ref[1:], 1 if arg == "+" else -1))
                    elif ref.startswith("W"):
                        items.append(WallCurve(ref[1:], _int(parser, lineno, arg)))
                    else:
                        parser.fail(lineno, tok, "C<circle>:<sign> or W<pair>:<index>")
            surfaces.append(SpanningSurface(rest[0], _int(parser, lineno, f["genus"]),
                                            tuple(items)))
        elif kind == "sinks":
            if sink_count is not None:
                parser.fail(lineno, "sinks", "a single sinks record")
            if len(rest) < 1:
                parser.fail(lineno, "", "sinks <count>")
            sink_count = _int(parser, lineno, rest[0])
            f = _fields(parser, lineno, rest[1:], (), ("incidence",))
            if "incidence" in f:
                sink_incidence = tuple(
                    tuple(_int(parser, lineno, x) for x in row.split(",") if x != "")
                    for row in f["incidence"].split(";"))
        elif kind == "imap":
            f = _fields(parser, lineno, rest,
                        ("pieces", "pairs", "circles", "surfaces", "sinks"))
            imap = f  # resolved against sorted ids below
        elif kind == "annotation":
            f = _fields(parser, lineno, rest,
                        ("one_handles", "three_handles", "sinks"), ("dotted",))
            dotted = tuple(f["dotted"].split(",")) if f.get("dotted") else ()
            annotation = KirbyAnnotation(
                _int(parser, lineno, f["one_handles"]),
                _int(parser, lineno, f["three_handles"]),
                _int(parser, lineno, f["sinks"]), dotted)
        else:
            parser.fail(lineno, kind, "a record kind")

    if sink_count is None:
        raise ParseError(parser.records[-1][0], "(end)", "a sinks record")

    built_pieces = tuple(
        Piece(pid, TangleCode(tuple(data["crossings"]), tuple(data["strands"])),
              tuple(data["walls"]))
        for pid, data in pieces.items())
    maps = None
    kind_flag = Kind.VECTOR_FIELD
    if imap is not None:
        kind_flag = Kind.DIFFEOMORPHISM

        def resolve(field, ids):
            src = sorted(ids, key=natural_key)
            if imap[field] == "-":
                images = []
            else:
                images = imap[field].split(",")
            if len(images) != len(src):
                raise ParseError(0, imap[field], f"{len(src)} images for {field}")
            return tuple(zip(src, images))

        sinks_perm = () if imap["sinks"] == "-" else tuple(
            int(x) for x in imap["sinks"].split(","))
        maps = InternalMaps(
            on_pieces=resolve("pieces", [p.id for p in built_pieces]),
            on_pairs=resolve("pairs", [q.id for q in pairs]),
            on_circles=resolve("circles", [c.id for c in circles]),
            on_surfaces=resolve("surfaces", [f.id for f in surfaces]),
            on_sinks=sinks_perm,
        )
    d = Diagram(
        pieces=built_pieces,
        pairs=tuple(pairs),
        circles=tuple(circles),
        surfaces=tuple(surfaces),
        sink_count=sink_count,
        internal_maps=maps,
        kind=kind_flag,
        sink_incidence=sink_incidence,
        annotation=annotation,
    )
    for lineno, pid, cid, sgn in crossing_checks:
        try:
            actual = crossing_sign(d.piece(pid).tangle, cid)
        except Exception:
            continue  # structural breakage is validate's business
        if ("+" if actual > 0 else "-") != sgn:
            raise ParseError(lineno, sgn, f"sign consistent with strand data ({actual:+d})")
    return d


def canonical(d: Diagram) -> Diagram:
    """Normalize record order: parse(serialize(d))."""
    return parse(serialize(d))


# ---------------------------------------------------------------------------
# move logs


def serialize_moves(moves) -> str:
    """One replayable record per move: move <tag> <key=value fields>."""
    lines = []
    for m in moves:
        if m.tag == "blow-up":
            piece, region, sign = m.args
            lines.append(f"move blow-up piece={piece} region={region} "
                         f"sign={'+' if sign > 0 else '-'}")
        elif m.tag == "blow-down":
            lines.append(f"move blow-down circle={m.args[0]}")
        elif m.tag == "handle-slide":
            c1, c2, band = m.args
            pid, (s1, a1), (s2, a2), orient = band
            lines.append(f"move handle-slide c1={c1} c2={c2} "
                         f"band={pid}:{s1}.{a1}:{s2}.{a2}:{'+' if orient > 0 else '-'}")
        elif m.tag == "merge-pieces":
            lines.append(f"move merge-pieces pair={m.args[0]}")
        elif m.tag == "delete-surface":
            lines.append(f"move delete-surface surface={m.args[0]} circle={m.args[1]}")
        elif m.tag == "replace-pair":
            lines.append(f"move replace-pair pair={m.args[0]} circle={m.args[1]}")
        else:
            raise ValueError(f"unknown move tag {m.tag!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_moves(text: str):
    """Inverse of serialize_moves."""
    from .calculus import KirbyMove

    moves = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        if tokens[0] != "move" or len(tokens) < 2:
            raise ParseError(lineno, tokens[0], "a move record")
        tag = tokens[1]
        fields = {}
        for tok in tokens[2:]:
            if "=" not in tok:
                raise ParseError(lineno, tok, "key=value field")
            k, v = tok.split("=", 1)
            fields[k] = v
        try:
            if tag == "blow-up":
                moves.append(KirbyMove("blow-up", (
                    fields["piece"], int(fields["region"]),
                    1 if fields["sign"] == "+" else -1)))
            elif tag == "blow-down":
                moves.append(KirbyMove("blow-down", (fields["circle"],)))
            elif tag == "handle-slide":
                pid, a1, a2, orient = fields["band"].split(":")
                s1, i1 = a1.rsplit(".", 1)
                s2, i2 = a2.rsplit(".", 1)
                band = (pid, (s1, int(i1)), (s2, int(i2)),
                        1 if orient == "+" else -1)
                moves.append(KirbyMove("handle-slide",
                                       (fields["c1"], fields["c2"], band)))
            elif tag == "merge-pieces":
                moves.append(KirbyMove("merge-pieces", (fields["pair"],)))
            elif tag == "delete-surface":
                moves.append(KirbyMove("delete-surface",
                                       (fields["surface"], fields["circle"])))
            elif tag == "replace-pair":
                moves.append(KirbyMove("replace-pair",
                                       (fields["pair"], fields["circle"])))
            else:
                raise ParseError(lineno, tag, "a known move tag")
        except KeyError as e:
            raise ParseError(lineno, str(e), "a required move field")
    return moves
