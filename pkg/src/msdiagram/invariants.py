"""Algebraic invariants: handle chain complex, integer homology, linking data.

All linear algebra is exact over the integers (arbitrary precision); matrices
are lists of row lists.  The handle chain complex of a diagram runs

    C4 (sinks) -> C3 (surfaces) -> C2 (circles) -> C1 (pairs) -> C0 (pieces)

with boundary maps read off incidence data: signed passages of circles
through pairs, signed framing-parallel multiplicities of surfaces, and the
piece graph of the pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Diagram,
    DiagramError,
    FramingParallel,
    circle_passages,
    diagram_linking,
    handle_counts,
    validate,
)

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# exact integer matrix routines


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b:
        return zeros(len(a), len(b[0]) if b else 0)
    assert len(a[0]) == len(b)
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def smith_normal_form(a: Matrix) -> list[int]:
    """Diagonal of the Smith normal form, nonnegative, divisibility-ordered."""
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0]) if m else 0
    diag = []
    r = c = 0
    while r < rows and c < cols:
        # find a pivot with the smallest nonzero absolute value
        best = None
        for i in range(r, rows):
            for j in range(c, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        m[r], m[i] = m[i], m[r]
        for row in m:
            row[c], row[j] = row[j], row[c]
        # clear the pivot row and column; restart if a remainder shrinks below
        while True:
            for i in range(r + 1, rows):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    for j in range(c, cols):
                        m[i][j] -= q * m[r][j]
            for j in range(c + 1, cols):
                if m[r][j]:
                    q = m[r][j] // m[r][c]
                    for i in range(r, rows):
                        m[i][j] -= q * m[i][c]
            col_ok = all(m[i][c] == 0 for i in range(r + 1, rows))
            row_ok = all(m[r][j] == 0 for j in range(c + 1, cols))
            if col_ok and row_ok:
                break
            # a smaller remainder may have appeared; re-pivot on it
            best = (r, c)
            for i in range(r, rows):
                for j in range(c, cols):
                    if m[i][j] != 0 and abs(m[i][j]) < abs(m[best[0]][best[1]]):
                        best = (i, j)
            i, j = best
            m[r], m[i] = m[i], m[r]
            for row in m:
                row[c], row[j] = row[j], row[c]
        diag.append(abs(m[r][c]))
        r += 1
        c += 1
    # enforce divisibility d1 | d2 | ...
    changed = True
    while changed:
        changed = False
        for k in range(len(diag) - 1):
            a_, b_ = diag[k], diag[k + 1]
            if b_ % a_ != 0:
                from math import gcd
                g = gcd(a_, b_)
                diag[k], diag[k + 1] = g, a_ * b_ // g
                changed = True
    return diag


def rank(a: Matrix) -> int:
    return sum(1 for x in smith_normal_form(a) if x != 0)


def det(a: Matrix) -> int:
    """Exact determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(a)
    if n == 0:
        return 1
    assert all(len(r) == n for r in a)
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def signature(a: Matrix) -> int:
    """Signature of a symmetric integer matrix, exact over the rationals.

    Symmetric pivoting with the split trick for hyperbolic 2x2 blocks
    (zero diagonal, nonzero off-diagonal contributes signature 0).
    """
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    idx = list(range(n))
    sig = 0

    def eliminate(p):
        piv = m[p][p]
        for i in idx:
            if i == p:
                continue
            f = m[i][p] / piv
            if f == 0:
                continue
            for j in idx:
                if j != p:
                    m[i][j] -= f * m[p][j]
            m[i][p] = Fraction(0)
            m[p][i] = Fraction(0)

    while idx:
        p = next((i for i in idx if m[i][i] != 0), None)
        if p is not None:
            sig += 1 if m[p][p] > 0 else -1
            eliminate(p)
            idx.remove(p)
            continue
        off = None
        for i in idx:
            for j in idx:
                if i != j and m[i][j] != 0:
                    off = (i, j)
                    break
            if off:
                break
        if off is None:
            break  # remaining block is zero
        i, j = off
        # x_i -> x_i + x_j turns the block diagonal entry nonzero
        for k in range(n):
            m[i][k] += m[j][k]
        for k in range(n):
            m[k][i] += m[k][j]
        # now m[i][i] = 2*m_ij != 0; loop continues with a real pivot
    return sig


# ---------------------------------------------------------------------------
# chain complex and homology


@dataclass(frozen=True)
class ChainComplex:
    """Integer boundary matrices d1..d4; dk maps k-handles to (k-1)-handles.

    Row lists lose their width when empty, so the chain group ranks are
    carried explicitly in dims.
    """

    d1: Matrix  # pieces x pairs
    d2: Matrix  # pairs x circles
    d3: Matrix  # circles x surfaces
    d4: Matrix  # surfaces x sinks
    dims: tuple[int, int, int, int, int]
    labels: tuple[tuple[str, ...], ...] = ((), (), (), ())

    def ranks(self) -> tuple[int, int, int, int, int]:
        return self.dims


@dataclass(frozen=True)
class LinkingMatrix:
    """Symmetric matrix of pairwise linkings with framings on the diagonal."""

    circles: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    def as_list(self) -> Matrix:
        return [list(r) for r in self.entries]


def chain_complex(d: Diagram) -> ChainComplex:
    """Boundary matrices of the handle decomposition carried by the diagram."""
    report = validate(d)
    if not report.ok:
        raise DiagramError(f"invalid diagram: {report.errors()[0].message}")
    piece_ids = [p.id for p in d.pieces]
    pair_ids = [q.id for q in d.pairs]
    circle_ids = [c.id for c in d.circles]
    surface_ids = [f.id for f in d.surfaces]
    n0, n1, n2, n3, n4 = handle_counts(d)

    d1 = zeros(n0, n1)
    for j, q in enumerate(d.pairs):
        d1[piece_ids.index(q.wall_b[0])][j] += 1
        d1[piece_ids.index(q.wall_a[0])][j] -= 1

    d2 = zeros(n1, n2)
    for j, c in enumerate(d.circles):
        for qid, sign in circle_passages(d, c.id):
            d2[pair_ids.index(qid)][j] += sign

    d3 = zeros(n2, n3)
    for j, f in enumerate(d.surfaces):
        for item in f.boundary:
            if isinstance(item, FramingParallel):
                d3[circle_ids.index(item.circle)][j] += item.sign

    if d.sink_incidence is not None:
        d4 = [[d.sink_incidence[j][i] for j in range(n4)] for i in range(n3)]
    elif n4 == 1:
        d4 = zeros(n3, 1)  # both belt points of each surface land on the one sink
    elif n3 == 0:
        d4 = zeros(0, n4)
    else:
        raise DiagramError(
            "multi-sink diagram with surfaces needs an explicit sink incidence block")

    for name, left, right in (("d1.d2", d1, d2), ("d2.d3", d2, d3), ("d3.d4", d3, d4)):
        if left and right and right[0] and not is_zero(mat_mul(left, right)):
            raise DiagramError(f"boundary maps do not compose to zero at {name}")
    return ChainComplex(d1, d2, d3, d4, dims=(n0, n1, n2, n3, n4),
                        labels=(tuple(pair_ids), tuple(circle_ids), tuple(surface_ids),
                                tuple(range(n4))))


def homology(d: Diagram) -> list[tuple[int, tuple[int, ...]]]:
    """Integral homology (betti, torsion coefficients) in degrees 0..4."""
    cx = chain_complex(d)
    n = cx.ranks()
    boundary = [zeros(0, n[0]), cx.d1, cx.d2, cx.d3, cx.d4, zeros(n[4], 0)]
    out = []
    for k in range(5):
        snf_in = smith_normal_form(boundary[k + 1])
        rank_in = sum(1 for x in snf_in if x)
        rank_out = rank(boundary[k]) if k > 0 else 0
        betti = n[k] - rank_out - rank_in
        torsion = tuple(x for x in snf_in if x > 1)
        out.append((betti, torsion))
    return out


def euler_characteristic(d: Diagram) -> int:
    n0, n1, n2, n3, n4 = handle_counts(d)
    return n0 - n1 + n2 - n3 + n4


def linking_matrix(d: Diagram) -> LinkingMatrix:
    """Framings on the diagonal, pairwise circle linkings off it."""
    report = validate(d)
    if not report.ok:
        raise DiagramError(f"invalid diagram: {report.errors()[0].message}")
    ids = [c.id for c in d.circles]
    n = len(ids)
    m = zeros(n, n)
    for i, c in enumerate(d.circles):
        m[i][i] = c.framing
        for j in range(i + 1, n):
            v = diagram_linking(d, c.id, ids[j])
            m[i][j] = m[j][i] = v
    return LinkingMatrix(tuple(ids), tuple(tuple(r) for r in m))


def intersection_form(d: Diagram) -> Matrix:
    """Intersection form read from a diagram with no pairs and no surfaces."""
    if d.pairs or d.surfaces:
        raise DiagramError(
            "intersection form needs a diagram without sphere pairs and surfaces")
    return linking_matrix(d).as_list()


# ---------------------------------------------------------------------------
# the surgered 3-manifold


@dataclass(frozen=True)
class SurgeryPresentation:
    """Everything the surgery on the glued 3-manifold leaves behind.

    H1 of the surgered manifold is presented by one generator per circle
    meridian and one per sphere pair, with one relation per circle (its
    framed parallel) and one per spanning-tree pair of the piece graph.
    Surfaces close up to embedded 2-spheres; only their count survives.
    """

    circles: tuple[str, ...]
    framings: tuple[int, ...]
    pairs: tuple[str, ...]
    linking: tuple[tuple[int, ...], ...]
    windings: tuple[tuple[int, ...], ...]   # circles x pairs, signed passages
    tree_pairs: tuple[str, ...]             # spanning forest of the piece graph
    sphere_count: int

    def relation_matrix(self) -> Matrix:
        m = len(self.circles)
        n = len(self.pairs)
        rows = []
        for i in range(m):
            rows.append(list(self.linking[i]) + list(self.windings[i]))
        for qid in self.tree_pairs:
            row = [0] * (m + n)
            row[m + self.pairs.index(qid)] = 1
            rows.append(row)
        return rows

    def h1(self) -> tuple[int, tuple[int, ...]]:
        gens = len(self.circles) + len(self.pairs)
        rel = self.relation_matrix()
        if not rel:
            return gens, ()
        snf = smith_normal_form(rel)
        r = sum(1 for x in snf if x)
        return gens - r, tuple(x for x in snf if x > 1)


def _spanning_forest(d: Diagram) -> list[str]:
    """Pair ids forming a spanning forest of the piece graph."""
    parent: dict[str, str] = {p.id: p.id for p in d.pieces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = []
    for q in d.pairs:
        a, b = find(q.wall_a[0]), find(q.wall_b[0])
        if a != b:
            parent[a] = b
            tree.append(q.id)
    return tree


def surgery_presentation(d: Diagram) -> SurgeryPresentation:
    report = validate(d)
    if not report.ok:
        raise DiagramError(f"invalid diagram: {report.errors()[0].message}")
    lm = linking_matrix(d)
    pair_ids = [q.id for q in d.pairs]
    windings = []
    for c in d.circles:
        row = [0] * len(pair_ids)
        for qid, sign in circle_passages(d, c.id):
            row[pair_ids.index(qid)] += sign
        windings.append(tuple(row))
    return SurgeryPresentation(
        circles=lm.circles,
        framings=tuple(c.framing for c in d.circles),
        pairs=tuple(pair_ids),
        linking=lm.entries,
        windings=tuple(windings),
        tree_pairs=tuple(_spanning_forest(d)),
        sphere_count=len(d.surfaces),
    )


def surgered_h1(d: Diagram) -> tuple[int, tuple[int, ...]]:
    """H1 (rank, torsion) of the 3-manifold obtained by the spherical surgeries."""
    return surgery_presentation(d).h1()


# ---------------------------------------------------------------------------
# Kirby-form diagrams with an annotation block


def annotated_homology(d: Diagram) -> list[tuple[int, tuple[int, ...]]]:
    """Homology of the presented manifold for a diagram in Kirby form.

    Dotted circles in the annotation are 1-handles; surfaces and sinks
    survive only as counts, so degrees 2..4 are reconstructed through
    Poincare duality for the closed connected orientable manifold.
    """
    if d.annotation is None:
        return homology(d)
    ann = d.annotation
    dotted = set(ann.dotted)
    lm = linking_matrix(d)
    dotted_idx = [i for i, c in enumerate(lm.circles) if c in dotted]
    handle_idx = [i for i, c in enumerate(lm.circles) if c not in dotted]
    rel = [[lm.entries[i][j] for j in dotted_idx] for i in handle_idx]
    if rel and rel[0]:
        snf = smith_normal_form(rel)
        r = sum(1 for x in snf if x)
        torsion = tuple(x for x in snf if x > 1)
    else:
        snf, r, torsion = [], 0, ()
    b1 = len(dotted_idx) - r
    chi = (1 - ann.one_handles + (len(lm.circles) - len(dotted_idx))
           - ann.three_handles + ann.sinks)
    b2 = chi - 2 + 2 * b1
    return [(1, ()), (b1, torsion), (b2, torsion), (b1, ()), (1, ())]
