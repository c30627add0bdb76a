"""Combinatorial rewrites of PD codes: handle attachments and Reidemeister moves.

All moves keep the labels of edges away from the move site.  Crossings that a
move creates are appended at the end of the crossing list; crossings it
removes are deleted, keeping the order of the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import LinkDiagram, _UnionFind, relabel
from .errors import PreconditionError, SiteError

__all__ = [
    "add_loop",
    "remove_loop",
    "band",
    "band_sites",
    "r1",
    "r1_remove",
    "r2_local",
    "common_faces",
    "r2",
    "r2_remove",
    "r3",
    "find_isomorphism",
    "Isomorphism",
    "common_face",
]


def _fresh(d: LinkDiagram, k: int = 1) -> list[int]:
    m = d.max_edge()
    return list(range(m + 1, m + 1 + k))


def _rename_slot(crossings: list[list[int]], where: tuple[int, int], new: int) -> None:
    c, s = where
    crossings[c][s] = new


def add_loop(d: LinkDiagram) -> tuple[LinkDiagram, int]:
    """0-handle: a new crossingless loop with a fresh id."""
    k = _fresh(d)[0]
    return LinkDiagram(d.crossings, d.loops + (k,), d.basepoint), k


def remove_loop(d: LinkDiagram, k: int) -> LinkDiagram:
    """2-handle: delete the crossingless loop ``k``."""
    if k not in d.loops:
        raise SiteError(f"{k} is not a crossingless loop of the diagram")
    if d.basepoint == k:
        raise SiteError("cannot cap off the based component")
    return LinkDiagram(d.crossings, [x for x in d.loops if x != k], d.basepoint)


# ---------------------------------------------------------------------------
# faces


def _darts_of(d: LinkDiagram, e: int):
    """(face index, position, direction) for each face side made by edge e."""
    out = []
    for fi, face in enumerate(d.faces()):
        for pos, (c, s, sgn) in enumerate(face):
            if d.crossings[c][s] == e:
                out.append((fi, pos, sgn))
    return out


def common_faces(d: LinkDiagram, e1: int, e2: int) -> list[tuple[int, int, int]]:
    """Faces bounded by both edges, as (face, dir1, dir2) with the traversal directions there."""
    a, b = _darts_of(d, e1), _darts_of(d, e2)
    return [(fa, sa, sb) for fa, pa, sa in a for fb, pb, sb in b if fa == fb and pa != pb]


def common_face(d: LinkDiagram, e1: int, e2: int, same_direction: bool | None = None):
    """First face bounded by both edges; returns (face, dir1, dir2) or None."""
    for fa, sa, sb in common_faces(d, e1, e2):
        if same_direction is None or (sa == sb) == same_direction:
            return fa, sa, sb
    return None


def band_sites(d: LinkDiagram) -> list[tuple[int, int]]:
    """Pairs (e1, e2) admitting an oriented band (1-handle)."""
    out = []
    for e1 in d.edges:
        for e2 in d.edges:
            if e1 < e2:
                try:
                    band(d, e1, e2)
                    out.append((e1, e2))
                except PreconditionError:
                    pass
    return out


def band(d: LinkDiagram, e1: int, e2: int) -> tuple[LinkDiagram, dict]:
    """Oriented 1-handle between edges e1 and e2: their heads are swapped.

    The new edge running from the tail of e1 to the head of e2 keeps the label
    e1; the one from the tail of e2 to the head of e1 keeps e2.  The band must
    lie in a face both edges bound, traversed in the same direction there (or
    the edges must sit on different pieces of the diagram, or on loops).
    Banding an edge with itself splits off a new loop.  Returns the new
    diagram and a dict describing the site (used to build the saddle cube).
    """
    if e1 not in d.edges or e2 not in d.edges:
        raise SiteError(f"band site ({e1}, {e2}) uses unknown edges")
    loops = list(d.loops)
    cr = [list(c) for c in d.crossings]
    info = {"e1": e1, "e2": e2}
    if e1 == e2:
        new = _fresh(d)[0]
        info["new"] = new
        # a small loop is pinched off next to e1
        return LinkDiagram(cr, loops + [new], d.basepoint), info
    l1, l2 = e1 in loops, e2 in loops
    if l1 and l2:
        loops.remove(e2)
        return LinkDiagram(cr, loops, _bp(d, e2, e1)), info
    if l1 or l2:
        loop, e = (e1, e2) if l1 else (e2, e1)
        # the loop is absorbed: e's tail -> loop -> e's head; the edge keeps e's label
        loops.remove(loop)
        return LinkDiagram(cr, loops, _bp(d, loop, e)), info
    p1, p2 = d.piece_of_edge(e1), d.piece_of_edge(e2)
    if p1 == p2 and common_face(d, e1, e2, same_direction=True) is None:
        raise SiteError(f"edges {e1} and {e2} do not bound a common face with matching orientations")
    h1, h2 = d.heads[e1], d.heads[e2]
    _rename_slot(cr, h1, e2)
    _rename_slot(cr, h2, e1)
    return LinkDiagram(cr, loops, d.basepoint), info


def _bp(d: LinkDiagram, old: int, new: int):
    return new if d.basepoint == old else d.basepoint


# ---------------------------------------------------------------------------
# Reidemeister I


def r1(d: LinkDiagram, e: int, sign: int) -> tuple[LinkDiagram, dict]:
    """Add a kink of the given sign on edge e.

    The part of e before the kink keeps the label e, the small loop gets a
    fresh label m and the part after the kink a fresh label f.  The new
    crossing is X[e, f, m, m] (positive) or X[e, m, m, f] (negative).
    """
    if e not in d.edges:
        raise SiteError(f"edge {e} is not in the diagram")
    if sign not in (1, -1):
        raise SiteError("kink sign must be +1 or -1")
    cr = [list(c) for c in d.crossings]
    loops = list(d.loops)
    if e in loops:
        m = _fresh(d)[0]
        f = e
        loops.remove(e)
    else:
        m, f = _fresh(d, 2)
        _rename_slot(cr, d.heads[e], f)
    cr.append([e, f, m, m] if sign > 0 else [e, m, m, f])
    return LinkDiagram(cr, loops, d.basepoint), {"e": e, "loop": m, "after": f}


def r1_remove(d: LinkDiagram, c: int) -> LinkDiagram:
    """Remove a kink at crossing c; the merged edge keeps the incoming label."""
    x = d.crossings[c]
    counts = {e: x.count(e) for e in x}
    loopers = [e for e, k in counts.items() if k == 2]
    cr = [list(y) for i, y in enumerate(d.crossings) if i != c]
    loops = list(d.loops)
    if len(counts) == 2:
        # one-crossing unknot: keep the label entering the under-strand
        loops.append(x[0])
        return LinkDiagram(cr, loops, x[0] if d.basepoint is not None else None)
    if len(loopers) != 1 or len(counts) != 3:
        raise SiteError(f"crossing {c} is not a kink")
    m = loopers[0]
    ends = [e for e in x if e != m]
    ein = next(e for e in ends if d.heads[e][0] == c)
    eout = ends[1] if ends[0] == ein else ends[0]
    if d.basepoint == m:
        raise SiteError("basepoint lies on the kink")
    hc, hs = d.heads[eout]
    hc = hc - (1 if hc > c else 0)
    cr[hc][hs] = ein
    return LinkDiagram(cr, loops, _bp(d, eout, ein))


# ---------------------------------------------------------------------------
# Reidemeister II

_CCW = ("E", "N", "W", "S")


def _crossing_from_arms(arms: dict[str, int], under: tuple[str, str]) -> list[int]:
    """Tuple counterclockwise from the incoming under arm ``under[0]``."""
    start = _CCW.index(under[0])
    return [arms[_CCW[(start + k) % 4]] for k in range(4)]


def r2_local(
    d: LinkDiagram,
    e1: int,
    e2: int,
    t1: int,
    t2: int,
    over: bool,
) -> tuple[LinkDiagram, dict]:
    """RII pushing e1 across e2 inside a face where e1 is traversed with
    direction t1 and e2 with t2 (face kept on the right).

    Local model: e1 runs west to east along the top of the face and dips
    south across e2, which runs east to west along the bottom.  The pieces of
    e1 are p1 (west), p2 (dip), p3 (east); those of e2 are q1 (east), q2
    (middle), q3 (west).  Left crossing L: N=p1, S=p2, E=q2, W=q3.  Right
    crossing R: S=p2, N=p3, E=q1, W=q2.
    """
    cr = [list(c) for c in d.crossings]
    loops = list(d.loops)
    fresh = iter(_fresh(d, 4))

    def pieces(e, t):
        if e in loops:
            loops.remove(e)
            mid = next(fresh)
            # loop: first and last piece are the same edge
            return (e, mid, e) if t > 0 else (e, mid, e)
        a, b = next(fresh), next(fresh)
        if t > 0:
            seq = (e, a, b)
            _rename_slot(cr, d.heads[e], b)
        else:
            seq = (b, a, e)
            _rename_slot(cr, d.heads[e], b)
        return seq

    p1, p2, p3 = pieces(e1, t1)
    q1, q2, q3 = pieces(e2, t2)
    L = {"N": p1, "S": p2, "E": q2, "W": q3}
    R = {"S": p2, "N": p3, "E": q1, "W": q2}
    # incoming arms given the flow directions
    e1_in_L = "N" if t1 > 0 else "S"
    e1_in_R = "S" if t1 > 0 else "N"
    e2_in_L = "E" if t2 > 0 else "W"
    e2_in_R = "E" if t2 > 0 else "W"
    opp = {"N": "S", "S": "N", "E": "W", "W": "E"}
    if over:
        xl = _crossing_from_arms(L, (e2_in_L, opp[e2_in_L]))
        xr = _crossing_from_arms(R, (e2_in_R, opp[e2_in_R]))
    else:
        xl = _crossing_from_arms(L, (e1_in_L, opp[e1_in_L]))
        xr = _crossing_from_arms(R, (e1_in_R, opp[e1_in_R]))
    cr.append(xl)
    cr.append(xr)
    out = LinkDiagram(cr, loops, d.basepoint)
    return out, {"e1": (p1, p2, p3), "e2": (q1, q2, q3), "crossings": (len(cr) - 2, len(cr) - 1)}


def r2(d: LinkDiagram, e1: int, e2: int, over: bool = True, t1: int | None = None, t2: int | None = None):
    """RII move creating a bigon between e1 and e2, with e1 over e2 when ``over``.

    For edges on one piece of the diagram the first common face is used.
    Loops and edges on different pieces may set the traversal directions
    t1 and t2 explicitly (default: opposite, +1 and -1 so that the strands
    run antiparallel across the bigon).
    """
    if e1 == e2:
        raise SiteError("RII needs two different edges")
    if e1 not in d.edges or e2 not in d.edges:
        raise SiteError(f"RII site ({e1}, {e2}) uses unknown edges")
    p1, p2 = d.piece_of_edge(e1), d.piece_of_edge(e2)
    if p1 is not None and p1 == p2:
        f = common_face(d, e1, e2)
        if f is None:
            raise SiteError(f"edges {e1} and {e2} do not bound a common face")
        if t1 is not None or t2 is not None:
            f = next(
                (g for g in common_faces(d, e1, e2) if (t1 is None or g[1] == t1) and (t2 is None or g[2] == t2)),
                None,
            )
            if f is None:
                raise SiteError(f"no common face of {e1} and {e2} with the requested traversal directions")
        _, t1, t2 = f
    else:
        if t1 is None:
            t1 = _default_dir(d, e1)
        if t2 is None:
            t2 = _default_dir(d, e2, opposite_to=t1 if p1 is None and p2 is None else None)
    return r2_local(d, e1, e2, t1, t2, over)


def _default_dir(d: LinkDiagram, e: int, opposite_to: int | None = None) -> int:
    if e in d.loops:
        return -opposite_to if opposite_to else 1
    return _darts_of(d, e)[0][2]


def r2_remove(d: LinkDiagram, a: int, b: int) -> LinkDiagram:
    """Remove the bigon bounded by edges a and b.

    The two strands through the bigon each collapse to one edge, which keeps
    the label of the piece entering the bigon.
    """
    da, db = _darts_of(d, a), _darts_of(d, b)
    face = None
    for fi, _, _ in da:
        if any(fj == fi for fj, _, _ in db) and len(d.faces()[fi]) == 2:
            face = fi
    if face is None:
        raise SiteError(f"edges {a} and {b} do not bound a bigon")
    ca = {d.tails[a][0], d.heads[a][0]}
    cb = {d.tails[b][0], d.heads[b][0]}
    if ca != cb or len(ca) != 2:
        raise SiteError("bigon must have two distinct corner crossings")
    c1, c2 = sorted(ca)
    over_a = [d.is_over(c, a) for c in (c1, c2)]
    if over_a[0] != over_a[1]:
        raise SiteError("bigon is not a Reidemeister II site (over/under alternate)")
    for c in (c1, c2):
        x = d.crossings[c]
        if x.count(a) != 1 or x.count(b) != 1 or x[(x.index(a) + 2) % 4] == b:
            raise SiteError("bigon is not a Reidemeister II site (two strands must cross twice)")
    bp = d.basepoint
    if bp is not None and bp in (a, b):
        raise SiteError("basepoint lies on the bigon")
    # strands through the two corners collapse
    uf = _UnionFind()
    for c in (c1, c2):
        x = d.crossings[c]
        for e in x:
            uf.add(e)
        uf.union(x[0], x[2])
        uf.union(x[1], x[3])
    keep = [i for i in range(len(d.crossings)) if i not in (c1, c2)]
    outside = {e for i in keep for e in d.crossings[i]}
    rename = {}
    loops = list(d.loops)
    for members in uf.groups().values():
        ext = [e for e in members if e in outside]
        if not ext:
            # a whole component ran through the corners
            entering = [e for e in members if e not in (a, b)]
            loops.append(min(entering) if entering else min(members))
            continue
        into = [e for e in ext if d.heads[e][0] in (c1, c2)]
        out_of = [e for e in ext if d.tails[e][0] in (c1, c2)]
        if len(into) != 1 or len(out_of) != 1:
            raise SiteError("bigon corners do not form two through-strands")
        rename[out_of[0]] = into[0]
    cr = [[rename.get(e, e) for e in d.crossings[i]] for i in keep]
    if bp is not None:
        if bp not in outside and bp not in d.loops:
            raise SiteError("basepoint lies inside the bigon")
        bp = rename.get(bp, bp)
    return LinkDiagram(cr, loops, bp)


# ---------------------------------------------------------------------------
# Reidemeister III


def r3(d: LinkDiagram, a: int, b: int, c: int) -> LinkDiagram:
    """Slide a strand across the crossing opposite the triangle bounded by edges a, b, c."""
    tri = None
    for fi, face in enumerate(d.faces()):
        if len(face) == 3 and {d.crossings[x][s] for x, s, _ in face} == {a, b, c}:
            tri = fi
    if tri is None:
        raise SiteError(f"edges {a}, {b}, {c} do not bound a triangular face")
    corners = set()
    for e in (a, b, c):
        corners |= {d.tails[e][0], d.heads[e][0]}
    if len(corners) != 3:
        raise SiteError("triangle must have three distinct corners")
    overs = sorted(sum(d.is_over(x, e) for x in (d.tails[e][0], d.heads[e][0])) for e in (a, b, c))
    if overs != [0, 1, 2]:
        raise SiteError("triangle is not a Reidemeister III site: no strand lies over both its crossings")
    # per crossing: strand data (in, out) for under and over, plus sign
    data = {}
    for x in corners:
        u = d.strand_through(x, 0)
        o = d.strand_through(x, 1)
        data[x] = [list(u), list(o), d.signs[x]]
    for e in (a, b, c):
        x1, x2 = d.tails[e][0], d.heads[e][0]
        # strand s0 -> x1 -> e -> x2 -> s2 becomes s0 -> x2 -> e -> x1 -> s2
        k1 = 0 if e in data[x1][0] else 1
        k2 = 0 if e in data[x2][0] else 1
        s0 = data[x1][k1][0]
        s2 = data[x2][k2][1]
        data[x1][k1] = [e, s2]
        data[x2][k2] = [s0, e]
    cr = [list(y) for y in d.crossings]
    for x, (u, o, sg) in data.items():
        if sg > 0:
            cr[x] = [u[0], o[1], u[1], o[0]]
        else:
            cr[x] = [u[0], o[0], u[1], o[1]]
    return LinkDiagram(cr, d.loops, d.basepoint)


# ---------------------------------------------------------------------------
# isomorphism


@dataclass(frozen=True)
class Isomorphism:
    """Edge bijection and crossing permutation carrying one diagram onto another."""

    edges: dict
    crossings: tuple[int, ...]


def find_isomorphism(d1: LinkDiagram, d2: LinkDiagram, respect_basepoint: bool = False) -> Isomorphism | None:
    """Search for an edge bijection mapping the crossing tuples of d1 onto those of d2."""
    if (d1.n_crossings, len(d1.loops), len(d1.edges)) != (d2.n_crossings, len(d2.loops), len(d2.edges)):
        return None
    pieces = d1.pieces()

    def extend(emap, cmap, start, target):
        emap, cmap = dict(emap), dict(cmap)
        stack = [(start, target)]
        used = set(cmap.values())
        if target in used:
            return None
        while stack:
            x, y = stack.pop()
            if x in cmap:
                if cmap[x] != y:
                    return None
                continue
            if y in used:
                return None
            cmap[x] = y
            used.add(y)
            for s in range(4):
                e, f = d1.crossings[x][s], d2.crossings[y][s]
                if emap.get(e, f) != f:
                    return None
                if e not in emap:
                    if f in emap.values():
                        return None
                    emap[e] = f
                for (c, t) in d1.occurrences(e):
                    if (c, t) == (x, s):
                        continue
                    other = [(c2, t2) for (c2, t2) in d2.occurrences(f) if (c2, t2) != (y, s)]
                    if not other or other[0][1] != t:
                        return None
                    stack.append((c, other[0][0]))
        return emap, cmap

    def search(i, emap, cmap):
        if i == len(pieces):
            return emap, cmap
        start = min(pieces[i])
        for y in range(d2.n_crossings):
            if y in cmap.values():
                continue
            r = extend(emap, cmap, start, y)
            if r is None:
                continue
            found = search(i + 1, *r)
            if found is not None:
                return found
        return None

    found = search(0, {}, {})
    if found is None:
        return None
    emap, cmap = found
    for k1, k2 in zip(d1.loops, d2.loops):
        emap[k1] = k2
    if respect_basepoint and d1.basepoint is not None:
        if emap.get(d1.basepoint) != d2.basepoint:
            return None
    perm = tuple(cmap[i] for i in range(d1.n_crossings))
    return Isomorphism(emap, perm)
