"""Link diagrams as PD codes, complete resolutions and the cube of resolutions.

Conventions
-----------
A crossing ``X[i, j, k, l]`` lists its four edges counterclockwise starting at
the incoming under-strand, so the under-strand runs from ``i`` to ``k``.  The
over-strand runs ``l -> j`` at a positive crossing and ``j -> l`` at a
negative one.  The 0-smoothing joins ``(i, j)`` and ``(k, l)``; the
1-smoothing joins ``(i, l)`` and ``(j, k)``.  With this choice the 0-smoothing
of a positive crossing is the oriented one.

Crossingless unknotted components are written ``U[k]`` where ``k`` is the id
of the single edge forming the loop.  ``base=e`` marks a basepoint edge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import MalformedDiagramError, OrientationError, ParseError, PreconditionError

__all__ = [
    "LinkDiagram",
    "CubeVertex",
    "ResolutionState",
    "EdgeTransition",
    "Cube",
    "parse_pd",
    "parse_braid",
    "parse_diagram",
    "resolve",
    "cube_edges",
    "disjoint_union",
    "mirror",
    "relabel",
]

Pair = tuple[int, int]


class _UnionFind:
    def __init__(self, items: Iterable[int] = ()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


class LinkDiagram:
    """An oriented planar link diagram given combinatorially.

    Attributes set at construction: ``crossings`` (tuple of 4-tuples),
    ``loops`` (sorted tuple of crossingless loop ids), ``basepoint``,
    ``signs`` (+1/-1 per crossing), ``heads`` and ``tails`` (edge -> (crossing,
    slot) where the edge ends or starts), ``components`` (edge ids in
    traversal order, one tuple per link component).
    """

    def __init__(self, crossings: Iterable[Sequence[int]] = (), loops: Iterable[int] = (), basepoint: int | None = None):
        self.crossings = tuple(tuple(int(x) for x in c) for c in crossings)
        self.loops = tuple(sorted(int(k) for k in loops))
        self.basepoint = None if basepoint is None else int(basepoint)
        for c in self.crossings:
            if len(c) != 4:
                raise MalformedDiagramError(f"crossing {c} does not have four edges")
        occ: dict[int, list[tuple[int, int]]] = {}
        for ci, c in enumerate(self.crossings):
            for s, e in enumerate(c):
                occ.setdefault(e, []).append((ci, s))
        for e, o in occ.items():
            if len(o) != 2:
                raise MalformedDiagramError(f"edge {e} appears {len(o)} time(s); every edge must appear exactly twice")
        if len(set(self.loops)) != len(self.loops):
            raise MalformedDiagramError("repeated crossingless loop id")
        for k in self.loops:
            if k in occ:
                raise MalformedDiagramError(f"loop id {k} is also used by a crossing")
        self._occ = {e: tuple(o) for e, o in occ.items()}
        self.edges = tuple(sorted(list(occ) + list(self.loops)))
        if self.basepoint is not None and self.basepoint not in set(self.edges):
            raise MalformedDiagramError(f"basepoint edge {self.basepoint} is not in the diagram")
        self._orient()
        self._cube = None
        self._faces = None

    # -- orientation ----------------------------------------------------
    def _trace(self, e0: int, tail: tuple[int, int]):
        """Follow a strand from edge e0 leaving ``tail``; returns [(edge, tail, head)]."""
        path = []
        e, t = e0, tail
        while True:
            o = self._occ[e]
            h = o[1] if o[0] == t else o[0]
            path.append((e, t, h))
            c, s = h
            s2 = (s + 2) % 4
            e = self.crossings[c][s2]
            t = (c, s2)
            if e == e0 and t == tail:
                return path

    def _orient(self):
        heads: dict[int, tuple[int, int]] = {}
        tails: dict[int, tuple[int, int]] = {}
        comps = []
        seen: set[int] = set()
        for e0 in sorted(self._occ):
            if e0 in seen:
                continue
            path = self._trace(e0, self._occ[e0][0])
            fwd = back = 0
            for _, t, h in path:
                if h[1] == 0 or t[1] == 2:
                    fwd += 1
                if h[1] == 2 or t[1] == 0:
                    back += 1
            if fwd and back:
                raise OrientationError(
                    f"component through edge {e0} cannot be oriented consistently with the under-strand slots"
                )
            if back:
                path = self._trace(e0, self._occ[e0][1])
            elif not fwd:
                # over-strands only: orient so that edge ids increase when possible
                alt = self._trace(e0, self._occ[e0][1])
                if len(path) > 1 and path[1][0] != e0 + 1 and alt[1][0] == e0 + 1:
                    path = alt
            for e, t, h in path:
                if e in seen:
                    raise OrientationError(f"edge {e} traversed twice")
                seen.add(e)
                tails[e], heads[e] = t, h
            comps.append(tuple(e for e, _, _ in path))
        signs = []
        for ci, c in enumerate(self.crossings):
            if heads.get(c[0]) != (ci, 0) or tails.get(c[2]) != (ci, 2):
                raise OrientationError(f"crossing {ci} under-strand is not oriented from slot 0 to slot 2")
            if heads.get(c[3]) == (ci, 3):
                signs.append(1)
            elif heads.get(c[1]) == (ci, 1):
                signs.append(-1)
            else:
                raise OrientationError(f"crossing {ci} over-strand orientation is inconsistent")
        for k in self.loops:
            comps.append((k,))
        self.heads, self.tails = heads, tails
        self.signs = tuple(signs)
        self.components = tuple(comps)

    # -- basic data -----------------------------------------------------
    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def edge_orientations(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        return {e: (self.tails[e], self.heads[e]) for e in self._occ}

    def occurrences(self, e: int) -> tuple[tuple[int, int], ...]:
        return self._occ.get(e, ())

    def max_edge(self) -> int:
        return max(self.edges) if self.edges else 0

    def component_of(self, e: int) -> int:
        for i, comp in enumerate(self.components):
            if e in comp:
                return i
        raise PreconditionError(f"edge {e} is not in the diagram")

    def strand_through(self, c: int, slot: int) -> tuple[int, int]:
        """(incoming edge, outgoing edge) of the strand using ``slot`` at crossing c."""
        x = self.crossings[c]
        a, b = x[slot], x[(slot + 2) % 4]
        if self.heads.get(a) == (c, slot):
            return a, b
        return b, a

    def is_over(self, c: int, e: int) -> bool:
        x = self.crossings[c]
        return e in (x[1], x[3]) and e not in (x[0], x[2])

    def with_basepoint(self, e: int | None) -> "LinkDiagram":
        return LinkDiagram(self.crossings, self.loops, e)

    def __eq__(self, other):
        return (
            isinstance(other, LinkDiagram)
            and self.crossings == other.crossings
            and self.loops == other.loops
            and self.basepoint == other.basepoint
        )

    def __hash__(self):
        return hash((self.crossings, self.loops, self.basepoint))

    def __repr__(self):
        return f"LinkDiagram({self.to_pd()!r})"

    def to_pd(self) -> str:
        body = ",".join("X[" + ",".join(map(str, c)) + "]" for c in self.crossings)
        parts = [f"PD[{body}]"] if self.crossings or not self.loops else []
        parts += [f"U[{k}]" for k in self.loops]
        if self.basepoint is not None:
            parts.append(f"base={self.basepoint}")
        return " ".join(parts)

    # -- planar structure -------------------------------------------------
    def faces(self) -> list[list[tuple[int, int, int]]]:
        """Faces of the diagram's planar graph as cycles of darts.

        A dart (c, s, dir) travels along edge ``crossings[c][s]`` away from
        crossing c; ``dir`` is +1 when this agrees with the orientation.  Each
        face is traversed keeping it on the right.  Crossingless loops are
        not included.
        """
        if self._faces is None:
            nxt = {}
            for c, x in enumerate(self.crossings):
                for s, e in enumerate(x):
                    o = self._occ[e]
                    c2, s2 = o[1] if o[0] == (c, s) else o[0]
                    nxt[(c, s)] = (c2, (s2 + 1) % 4)
            seen = set()
            faces = []
            for d in sorted(nxt):
                if d in seen:
                    continue
                cyc = []
                while d not in seen:
                    seen.add(d)
                    c, s = d
                    e = self.crossings[c][s]
                    cyc.append((c, s, 1 if self.tails[e] == (c, s) else -1))
                    d = nxt[d]
                faces.append(cyc)
            self._faces = faces
        return self._faces

    def pieces(self) -> list[set[int]]:
        """Connected pieces of the crossing graph, as sets of crossing indices."""
        uf = _UnionFind(range(self.n_crossings))
        for o in self._occ.values():
            uf.union(o[0][0], o[1][0])
        return [set(g) for _, g in sorted(uf.groups().items())]

    def piece_of_edge(self, e: int) -> int | None:
        if e in self.loops:
            return None
        c = self._occ[e][0][0]
        for i, p in enumerate(self.pieces()):
            if c in p:
                return i
        return None

    def is_planar(self) -> bool:
        """Euler characteristic check: each connected piece with n crossings has n + 2 faces."""
        faces = self.faces()
        for piece in self.pieces():
            nf = sum(1 for f in faces if f[0][0] in piece)
            if nf != len(piece) + 2:
                return False
        return True

    # -- cube -------------------------------------------------------------
    def smoothings(self) -> list[tuple[tuple[Pair, Pair], tuple[Pair, Pair]]]:
        return [(((i, j), (k, l)), ((i, l), (j, k))) for (i, j, k, l) in self.crossings]

    def cube(self) -> "Cube":
        if self._cube is None:
            self._cube = Cube(self.smoothings(), self.edges)
        return self._cube


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(X|U)\s*\[([^\]]*)\]|base\s*=\s*(-?\d+)|(PD\s*\[)|(\])|(,))")


def parse_pd(text: str) -> LinkDiagram:
    """Parse ``PD[X[...],...]`` text, optionally followed by ``U[k]`` tokens and ``base=e``."""
    if not isinstance(text, str):
        raise ParseError("PD code must be a string")
    crossings, loops, base = [], [], None
    pos, depth = 0, 0
    s = text.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected text at position {pos}: {s[pos:pos + 20]!r}")
        kind, args, b, open_pd, close, _ = m.groups()
        if kind:
            try:
                nums = [int(a) for a in args.split(",")] if args.strip() else []
            except ValueError:
                raise ParseError(f"non-integer edge label in {kind}[{args}]") from None
            if kind == "X":
                if len(nums) != 4:
                    raise ParseError(f"X[...] needs four edge labels, got {len(nums)}")
                crossings.append(nums)
            else:
                if len(nums) != 1:
                    raise ParseError("U[...] takes exactly one edge label")
                loops.append(nums[0])
        elif b is not None:
            if base is not None:
                raise ParseError("basepoint given twice")
            base = int(b)
        elif open_pd:
            if depth:
                raise ParseError("nested PD[")
            depth = 1
        elif close:
            if not depth:
                raise ParseError(f"unbalanced ']' at position {pos}")
            depth = 0
        pos = m.end()
    if depth:
        raise ParseError("missing closing ']'")
    return LinkDiagram(crossings, loops, base)


_BRAID = re.compile(r"^\s*braid\s*\(\s*(\d+)\s*\)\s*:(.*)$", re.S)


def parse_braid(word: str | Sequence[int], strands: int | None = None) -> LinkDiagram:
    """Closure of a braid.

    ``word`` is either text like ``"s1 s1 -s2"`` (or ``"braid(3): s1 -s2"``,
    which carries the strand count) or a sequence of nonzero integers.  The
    letter ``s_i`` is a positive crossing between strands i and i+1.
    """
    if isinstance(word, str):
        m = _BRAID.match(word)
        if m:
            if strands is not None and strands != int(m.group(1)):
                raise ParseError("strand count given twice and inconsistent")
            strands = int(m.group(1))
            word = m.group(2)
        letters = []
        for tok in word.replace(",", " ").split():
            mm = re.fullmatch(r"(-?)s(\d+)(?:\^(-?\d+))?", tok)
            if not mm:
                raise ParseError(f"bad braid letter {tok!r}")
            i = int(mm.group(2))
            sgn = -1 if mm.group(1) else 1
            p = int(mm.group(3)) if mm.group(3) else 1
            if p < 0:
                sgn, p = -sgn, -p
            letters += [sgn * i] * p
    else:
        letters = [int(x) for x in word]
    if strands is None:
        raise ParseError("strand count is required")
    if strands < 1:
        raise ParseError("a braid needs at least one strand")
    for x in letters:
        if x == 0 or abs(x) >= strands:
            raise ParseError(f"letter {x} out of range for {strands} strands")
    start = list(range(1, strands + 1))
    state = list(start)
    nxt = strands + 1
    raw = []
    for x in letters:
        i = abs(x) - 1
        a, b = state[i], state[i + 1]
        a2, b2 = nxt, nxt + 1
        nxt += 2
        if x > 0:
            raw.append([b, a2, b2, a])
        else:
            raw.append([a, b, a2, b2])
        state[i], state[i + 1] = b2, a2
    ident = {state[p]: start[p] for p in range(strands)}
    # closing can chain through edges that were never used by a crossing
    def close(e):
        seen = set()
        while e in ident and ident[e] != e and e not in seen:
            seen.add(e)
            e = ident[e]
        return e

    crossings = [[close(e) for e in c] for c in raw]
    used = {e for c in crossings for e in c}
    loops = sorted({close(e) for e in start} - used)
    return _normalize(LinkDiagram(crossings, loops))


def _normalize(d: LinkDiagram) -> LinkDiagram:
    """Relabel edges 1, 2, ... along the components in traversal order."""
    mapping = {}
    k = 1
    for comp in d.components:
        for e in comp:
            mapping[e] = k
            k += 1
    return relabel(d, mapping)


def parse_diagram(text: str) -> LinkDiagram:
    """Accept either a braid word ``braid(n): ...`` or PD text."""
    t = text.strip()
    if t.startswith("braid"):
        return parse_braid(t)
    return parse_pd(t)


def relabel(d: LinkDiagram, mapping: dict[int, int]) -> LinkDiagram:
    """Rename edges; unmapped edges keep their ids.  Must stay injective."""
    f = lambda e: mapping.get(e, e)
    new_edges = [f(e) for e in d.edges]
    if len(set(new_edges)) != len(new_edges):
        raise PreconditionError("relabelling is not injective")
    bp = None if d.basepoint is None else f(d.basepoint)
    return LinkDiagram([[f(e) for e in c] for c in d.crossings], [f(k) for k in d.loops], bp)


def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> tuple[LinkDiagram, dict[int, int]]:
    """D1 followed by a shifted copy of D2; returns the diagram and the shift map on D2's edges."""
    off = d1.max_edge()
    shift = {e: e + off for e in d2.edges}
    d2s = relabel(d2, shift)
    bp = d1.basepoint if d1.basepoint is not None else d2s.basepoint
    return LinkDiagram(d1.crossings + d2s.crossings, d1.loops + d2s.loops, bp), shift


def mirror(d: LinkDiagram) -> LinkDiagram:
    """Swap over and under at every crossing.

    Edges are first renumbered along the components in their direction of
    travel: a component that becomes all-over in the mirror is then oriented
    by increasing edge ids, which keeps the orientation of every component.
    """
    d = _normalize(d)
    out = []
    for c, s in zip(d.crossings, d.signs):
        i, j, k, l = c
        out.append((l, i, j, k) if s > 0 else (j, k, l, i))
    return LinkDiagram(out, d.loops, d.basepoint)


# ---------------------------------------------------------------------------
# resolutions and the cube


@dataclass(frozen=True)
class CubeVertex:
    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("cube vertex bits must be 0 or 1")

    def __len__(self):
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)


@dataclass(frozen=True)
class ResolutionState:
    """Circles of one complete resolution.

    ``circles`` is sorted; each circle is named by its minimum edge id.
    ``local`` records, per crossing, the pairs of edges joined there.
    """

    bits: tuple[int, ...]
    circles: tuple[int, ...]
    edge_to_circle: dict[int, int] = field(compare=False)
    local: tuple[tuple[Pair, Pair], ...] = field(compare=False, default=())

    @property
    def position(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.circles)}

    def circle_edges(self, c: int) -> list[int]:
        return sorted(e for e, k in self.edge_to_circle.items() if k == c)


@dataclass(frozen=True)
class EdgeTransition:
    """Saddle between two resolutions differing at one crossing.

    For a merge, ``inputs`` holds the two merging circles and ``outputs`` the
    result; for a split it is the other way around.  ``correspondence`` maps
    every untouched source circle to its target circle.
    """

    source: tuple[int, ...]
    target: tuple[int, ...]
    crossing: int
    kind: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    correspondence: dict[int, int] = field(compare=False)


def _as_bits(v, n: int) -> tuple[int, ...]:
    if isinstance(v, CubeVertex):
        v = v.bits
    if isinstance(v, int):
        return tuple((v >> (n - 1 - j)) & 1 for j in range(n))
    t = tuple(int(b) for b in v)
    if len(t) != n:
        raise PreconditionError(f"vertex has {len(t)} bits but the diagram has {n} crossings")
    return t


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | b
    return v


class Cube:
    """Cube of resolutions for a list of crossings given by their two smoothings.

    Vertices are bit tuples; internally also integers whose binary expansion
    (first crossing = most significant bit) orders them lexicographically.
    """

    def __init__(self, smoothings: Sequence[tuple[tuple[Pair, Pair], tuple[Pair, Pair]]], edges: Iterable[int]):
        self.smoothings = [tuple(tuple(tuple(p) for p in sm) for sm in x) for x in smoothings]
        self.edges = tuple(sorted(set(edges)))
        self.n = len(self.smoothings)
        self._res: dict[tuple[int, ...], ResolutionState] = {}
        self._edges_cache = None

    def resolve(self, v) -> ResolutionState:
        bits = _as_bits(v, self.n)
        r = self._res.get(bits)
        if r is None:
            uf = _UnionFind(self.edges)
            local = []
            for j, b in enumerate(bits):
                pairs = self.smoothings[j][b]
                local.append(pairs)
                for a, c in pairs:
                    uf.union(a, c)
            e2c = {e: uf.find(e) for e in self.edges}
            r = ResolutionState(bits, tuple(sorted(set(e2c.values()))), e2c, tuple(local))
            self._res[bits] = r
        return r

    def transition(self, v, j: int) -> EdgeTransition:
        src = _as_bits(v, self.n)
        if src[j]:
            raise PreconditionError("crossing already 1-resolved at source vertex")
        tgt = src[:j] + (1,) + src[j + 1:]
        r0, r1 = self.resolve(src), self.resolve(tgt)
        ends = {e for p in self.smoothings[j][0] for e in p}
        a = sorted({r0.edge_to_circle[e] for e in ends})
        b = sorted({r1.edge_to_circle[e] for e in ends})
        if len(a) == 2 and len(b) == 1:
            kind = "merge"
        elif len(a) == 1 and len(b) == 2:
            kind = "split"
        else:
            raise MalformedDiagramError(
                f"saddle at crossing {j} neither merges nor splits circles; the diagram is not planar"
            )
        corr = {}
        for c in r0.circles:
            if c not in a:
                corr[c] = r1.edge_to_circle[c]
        return EdgeTransition(src, tgt, j, kind, tuple(a), tuple(b), corr)

    def transitions(self) -> list[EdgeTransition]:
        if self._edges_cache is None:
            out = []
            for v in range(1 << self.n):
                bits = _as_bits(v, self.n)
                for j in range(self.n):
                    if not bits[j]:
                        out.append(self.transition(bits, j))
            self._edges_cache = out
        return self._edges_cache


def resolve(d: LinkDiagram, v) -> ResolutionState:
    """Circles of the resolution of ``d`` at cube vertex ``v``."""
    return d.cube().resolve(v)


def cube_edges(d: LinkDiagram) -> list[EdgeTransition]:
    """Every edge of the cube, ordered by (source vertex, crossing)."""
    return d.cube().transitions()
