"""Filtered chain maps for movie moves.

Handle attachments and planar relabellings act directly on cube generators.
Reidemeister maps are assembled from births, saddles and a transport through
the homology of a small unlink diagram, which is collapsed fiberwise over the
generators of the rest of the diagram.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Sequence

from .diagram import Cube, LinkDiagram, parse_diagram, relabel
from .errors import IntegrityError, ParseError, PreconditionError, SiteError
from .f2core import F2Matrix, mat_mul
from .moves import (
    Isomorphism,
    add_loop,
    band,
    band_sites,
    find_isomorphism,
    r1,
    r1_remove,
    r2,
    r2_remove,
    r3,
    remove_loop,
)
from .specseq import (
    FilteredComplex,
    FilteredMap,
    SpectralSequence,
    _Reducer,
    compute_pages,
    identity_map,
    induced_page_map,
)
from .theories import CubeData, TheorySpec, _iter_bits, build_complex, khovanov, parse_theory

__all__ = [
    "ElementaryMove",
    "Movie",
    "parse_movie",
    "isotopy_map",
    "handle0_map",
    "handle1_map",
    "handle2_map",
    "handle1_check",
    "reidemeister_map",
    "elementary_map",
    "movie_map",
    "movie_page_maps",
    "extend_to_chain_map",
    "saddle_cube",
]


# ---------------------------------------------------------------------------
# small caches

_CACHE: "OrderedDict[tuple, FilteredComplex]" = OrderedDict()
_CACHE_SIZE = 48


def _theory(t) -> TheorySpec:
    return parse_theory(t) if isinstance(t, str) else t


def complex_of(d: LinkDiagram, t) -> FilteredComplex:
    """build_complex with a small LRU cache keyed by diagram and theory name."""
    t = _theory(t)
    key = (d, d.basepoint, t.name)
    c = _CACHE.get(key)
    if c is None:
        c = build_complex(d, t)
        _CACHE[key] = c
        if len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    else:
        _CACHE.move_to_end(key)
    return c


def _degree(t: TheorySpec, dq: int) -> int:
    """Filtration degree of a map changing q by dq and preserving h."""
    return t.filtration_of(0, dq) - t.filtration_of(0, 0)


def _map(src, tgt, cols, degree, name, check=True) -> FilteredMap:
    m = F2Matrix.from_columns(len(tgt), len(src), cols)
    return FilteredMap(src, tgt, m, degree, check=check, name=name)


def _chain(maps: Sequence[FilteredMap], name: str = "", check: bool = True) -> FilteredMap:
    """Compose maps listed in the order they are applied."""
    f = maps[0]
    m = f.matrix
    deg = f.degree
    for g in maps[1:]:
        if len(g.source) != len(f.target):
            raise IntegrityError("composition of incompatible maps")
        m = mat_mul(g.matrix, m)
        deg += g.degree
        f = g
    return FilteredMap(maps[0].source, maps[-1].target, m, deg, check=check, name=name)


# ---------------------------------------------------------------------------
# planar isotopy


def isotopy_map(d1: LinkDiagram, d2: LinkDiagram, t, iso: Isomorphism | None = None, check: bool = True) -> FilteredMap:
    """The permutation isomorphism C(d1) -> C(d2) induced by a relabelling."""
    t = _theory(t)
    if iso is None:
        iso = find_isomorphism(d1, d2)
        if iso is None:
            raise SiteError("diagrams are not related by a relabelling")
    c1, c2 = complex_of(d1, t), complex_of(d2, t)
    cube2 = d2.cube()
    perm = iso.crossings
    n = d1.n_crossings
    cols = {}
    for j, (bits, wedge) in enumerate(c1.generators):
        b2 = [0] * n
        for i, b in enumerate(bits):
            b2[perm[i]] = b
        b2 = tuple(b2)
        e2c = cube2.resolve(b2).edge_to_circle
        w2 = tuple(sorted(e2c[iso.edges[c]] for c in wedge))
        cols[j] = [c2.index_of((b2, w2))]
    return _map(c1, c2, cols, 0, "iso", check)


# ---------------------------------------------------------------------------
# 0- and 2-handles


def handle0_map(d: LinkDiagram, t, check: bool = True) -> tuple[FilteredMap, LinkDiagram]:
    """Birth of a loop: x -> x (x) 1."""
    t = _theory(t)
    d2, _ = add_loop(d)
    c1, c2 = complex_of(d, t), complex_of(d2, t)
    cols = {j: [c2.index_of(g)] for j, g in enumerate(c1.generators)}
    return _map(c1, c2, cols, _degree(t, 1), "h0", check), d2


def handle2_map(d: LinkDiagram, k: int, t, check: bool = True) -> tuple[FilteredMap, LinkDiagram]:
    """Death of the crossingless loop k: x (x) u -> x and x (x) 1 -> 0."""
    t = _theory(t)
    if k not in d.loops:
        raise SiteError(f"{k} is not a crossingless split unknot of the diagram")
    d2 = remove_loop(d, k)
    c1, c2 = complex_of(d, t), complex_of(d2, t)
    cols = {}
    for j, (bits, wedge) in enumerate(c1.generators):
        if k in wedge:
            cols[j] = [c2.index_of((bits, tuple(x for x in wedge if x != k)))]
    return _map(c1, c2, cols, _degree(t, 1), "h2", check), d2


# ---------------------------------------------------------------------------
# 1-handles


def _smooth(x):
    i, j, k, l = x
    return (((i, j), (k, l)), ((i, l), (j, k)))


def saddle_cube(d: LinkDiagram, e1: int, e2: int) -> tuple[Cube, LinkDiagram]:
    """The cube of the diagram with one extra crossing whose 0-resolution is d
    and whose 1-resolution is the banded diagram; the extra crossing is last."""
    d2, _ = band(d, e1, e2)
    cr = [list(c) for c in d.crossings]
    top = d.max_edge()
    loops = set(d.loops)
    edges = set(d.edges)
    if e1 == e2:
        n, h = top + 1, top + 2
        edges.add(n)
        if e1 in loops:
            extra = (((e1, n), (n, e1)), ((e1, e1), (n, n)))
        else:
            c, s = d.heads[e1]
            cr[c][s] = h
            edges.add(h)
            extra = (((e1, n), (n, h)), ((e1, h), (n, n)))
    elif e1 in loops and e2 in loops:
        extra = (((e1, e1), (e2, e2)), ((e1, e2), (e2, e1)))
    elif e1 in loops or e2 in loops:
        lp, e = (e1, e2) if e1 in loops else (e2, e1)
        h = top + 1
        c, s = d.heads[e]
        cr[c][s] = h
        edges.add(h)
        extra = (((e, h), (lp, lp)), ((e, lp), (lp, h)))
    else:
        h1, h2 = top + 1, top + 2
        (c1, s1), (c2, s2) = d.heads[e1], d.heads[e2]
        cr[c1][s1] = h1
        cr[c2][s2] = h2
        edges |= {h1, h2}
        extra = (((e1, h1), (e2, h2)), ((e1, h2), (e2, h1)))
    smoothings = [_smooth(x) for x in cr] + [extra]
    return Cube(smoothings, edges), d2


def handle1_map(
    d: LinkDiagram, e1: int, e2: int, t, reverse: bool = False, check: bool = True
) -> tuple[FilteredMap, LinkDiagram]:
    """Saddle along a band between e1 and e2.

    The map collects the components of the theory's differential on the
    augmented cube that go from the 0-end to the 1-end of the extra crossing.
    With ``reverse`` the band is undone: the map goes from the banded diagram
    back to ``d``.
    """
    t = _theory(t)
    cube, d2 = saddle_cube(d, e1, e2)
    if reverse:
        sm = list(cube.smoothings)
        z, o = sm[-1]
        sm[-1] = (o, z)
        cube = Cube(sm, cube.edges)
        src, tgt = d2, d
    else:
        src, tgt = d, d2
    cd = CubeData(cube)
    blocks = t.blocks(cd)
    cs, ct = complex_of(src, t), complex_of(tgt, t)
    scube, tcube = src.cube(), tgt.cube()
    tpos_cache: dict[int, tuple] = {}

    def target_lookup(w):
        hit = tpos_cache.get(w)
        if hit is None:
            rw = cd.res[w]
            bits = cd.bits(w)[:-1]
            rt = tcube.resolve(bits)
            to_t = {}
            for e in tgt.edges:
                to_t[rw.edge_to_circle[e]] = rt.edge_to_circle[e]
            hit = (bits, [to_t[c] for c in rw.circles])
            tpos_cache[w] = hit
        return hit

    by_source: dict[int, list] = {}
    for (v, w), blk in blocks.items():
        if v & 1 == 0 and w & 1 == 1:
            by_source.setdefault(v, []).append((w, blk))
    cols: dict[int, set] = {}
    for j, (bits, wedge) in enumerate(cs.generators):
        v = 0
        for b in bits:
            v = (v << 1) | b
        v <<= 1
        targets = by_source.get(v)
        if not targets:
            continue
        rv = cd.res[v]
        pos = rv.position
        m = 0
        for c in wedge:
            m |= 1 << pos[rv.edge_to_circle[c]]
        acc: set[int] = set()
        for w, blk in targets:
            img = blk[m]
            if not img:
                continue
            tbits, names = target_lookup(w)
            for tm in _iter_bits(img):
                wd = tuple(sorted(names[i] for i in range(len(names)) if tm >> i & 1))
                acc ^= {ct.index_of((tbits, wd))}
        if acc:
            cols[j] = acc
    name = "h1-" if reverse else "h1"
    return _map(cs, ct, cols, _degree(t, -1), name, check), tgt


def handle1_check(d: LinkDiagram, t, sites: int = 2) -> str | None:
    """Check the 1-handle axiom on a few band sites of d.

    The theory's saddle map must be a filtered chain map whose E_2 map equals
    the Khovanov saddle map in the shared cancellation bases.
    """
    t = _theory(t)
    kh = khovanov()
    cand = band_sites(d)
    if not cand:
        cand = [(e, e) for e in d.edges[:1]]
    for e1, e2 in cand[:sites]:
        try:
            f, d2 = handle1_map(d, e1, e2, t)
        except IntegrityError as exc:
            return f"band ({e1}, {e2}): {exc}"
        g, _ = handle1_map(d, e1, e2, kh)
        s1 = compute_pages(complex_of(d, t))
        s2 = compute_pages(complex_of(d2, t))
        k1 = compute_pages(complex_of(d, kh))
        k2 = compute_pages(complex_of(d2, kh))
        if s1.page(2).basis != k1.page(2).basis or s2.page(2).basis != k2.page(2).basis:
            return f"band ({e1}, {e2}): E_2 bases differ from the Khovanov cancellation bases"
        if induced_page_map(f, s1, s2, 2) != induced_page_map(g, k1, k2, 2):
            return f"band ({e1}, {e2}): E_2 map differs from the Khovanov saddle map"
    return None


# ---------------------------------------------------------------------------
# fiberwise collapse of an unlink factor


def _solve_inverse(cols: list[int], size: int) -> list[int]:
    """Inverse of a square F2 matrix given as column bitmasks; returns column bitmasks."""
    aug = []  # rows of [M | I] as (m_bits, inv_bits)
    for r in range(size):
        m = 0
        for c in range(size):
            if cols[c] >> r & 1:
                m |= 1 << c
        aug.append([m, 1 << r])
    for c in range(size):
        p = next((r for r in range(c, size) if aug[r][0] >> c & 1), None)
        if p is None:
            raise IntegrityError("canonical unlink basis is not a basis of the homology")
        aug[c], aug[p] = aug[p], aug[c]
        for r in range(size):
            if r != c and aug[r][0] >> c & 1:
                aug[r][0] ^= aug[c][0]
                aug[r][1] ^= aug[c][1]
    # aug[r][1] is row r of M^-1
    out = [0] * size
    for r in range(size):
        for c in _iter_bits(aug[r][1]):
            out[c] |= 1 << r
    return out


@dataclass
class UnlinkData:
    """Homology of an unlink diagram together with its exterior-algebra basis."""

    survivors: list  # generator labels
    unit: tuple  # label of the top quantum class
    bottom: dict  # survivor label -> coefficient of the wedge of all components (0/1)
    pivots: list  # (source label, target label) in the theory's cancellation order


_UNLINK_CACHE: dict = {}


def unlink_data(u: LinkDiagram, t) -> UnlinkData:
    t = _theory(t)
    key = (u, t.name)
    hit = _UNLINK_CACHE.get(key)
    if hit is not None:
        return hit
    ct = complex_of(u, t)
    st = compute_pages(ct, track_maps=False)
    kh = complex_of(u, khovanov())
    sk = compute_pages(kh)
    surv_t = [ct.generators[g] for g in st.e_infinity.basis]
    basis = sk.e_infinity.basis
    surv = [kh.generators[g] for g in basis]
    k = u.n_components
    if len(surv) != 1 << k or sorted(surv_t) != sorted(surv):
        raise IntegrityError(f"diagram {u.to_pd()} does not behave as an unlink for theory {t.name}")
    top_q = max(kh.gradings[g]["q"] for g in basis)
    tops = [g for g in basis if kh.gradings[g]["q"] == top_q]
    if len(tops) != 1:
        raise IntegrityError("unlink homology has no unique top class")
    pi, iota = sk.stage_maps(sk.stabilization_index)
    pos = {g: i for i, g in enumerate(basis)}
    reps = [comp[0] for comp in u.components]
    cube = u.cube()

    def wedge_with(vec: set, e: int) -> set:
        out = set()
        for x in vec:
            bits, w = kh.generators[x]
            c = cube.resolve(bits).edge_to_circle[e]
            if c in w:
                continue
            out ^= {kh.index_of((bits, tuple(sorted(w + (c,)))))}
        return out

    z = set(iota[tops[0]])
    cols = []
    for mask in range(1 << k):
        v = set(z)
        for i in range(k):
            if mask >> i & 1:
                v = wedge_with(v, reps[i])
        img = set()
        for x in v:
            img ^= pi[x]
        b = 0
        for g in img:
            b |= 1 << pos[g]
        cols.append(b)
    inv = _solve_inverse(cols, 1 << k)
    # coefficient functional of the full wedge: row (2^k - 1) of M^-1
    full = (1 << k) - 1
    bottom = {surv[i]: (inv[i] >> full) & 1 for i in range(len(surv))}
    pivots = [(ct.generators[a], ct.generators[b]) for a, b in st.pivots]
    hit = UnlinkData(surv, kh.generators[tops[0]], bottom, pivots)
    _UNLINK_CACHE[key] = hit
    return hit


class FiberCollapse:
    """C(D u U) with the unlink factor U cancelled inside every fiber over C(D).

    ``birth`` sends x to the inclusion of x (x) unit; ``death`` sends y to the
    coefficient of the full wedge of U's components in its projection.
    """

    def __init__(self, d: LinkDiagram, u: LinkDiagram, t, check: bool = True):
        t = _theory(t)
        if set(d.edges) & set(u.edges):
            raise PreconditionError("unlink factor must use fresh edge labels")
        self.d, self.u, self.t = d, u, t
        self.big = LinkDiagram(d.crossings + u.crossings, d.loops + u.loops, d.basepoint)
        self.cd = complex_of(d, t)
        self.c = complex_of(self.big, t)
        data = unlink_data(u, t)
        self.data = data
        red = _Reducer(self.c, True)
        c = self.c
        for bd, wd in self.cd.generators:
            for (bk, wk), (bl, wl) in data.pivots:
                k = c.index_of((bd + bk, tuple(sorted(wd + wk))))
                l = c.index_of((bd + bl, tuple(sorted(wd + wl))))
                if l not in red.out[k] or k not in red.alive or l not in red.alive:
                    raise IntegrityError("fiberwise cancellation hit a missing pivot")
                red.cancel(k, l, None, 0, 1)
        self.red = red
        self.check = check

    def _index(self, x: int, b) -> int:
        bd, wd = self.cd.generators[x]
        bu, wu = b
        return self.c.index_of((bd + bu, tuple(sorted(wd + wu))))

    def birth(self) -> FilteredMap:
        red = self.red
        cols = {x: red.iota[self._index(x, self.data.unit)] for x in range(len(self.cd))}
        k = self.u.n_components
        return _map(self.cd, self.c, cols, _degree(self.t, k), "birth", self.check)

    def death(self) -> FilteredMap:
        red = self.red
        owner = {}
        for b, coeff in self.data.bottom.items():
            if coeff:
                for x in range(len(self.cd)):
                    owner[self._index(x, b)] = x
        cols = {}
        for y in range(len(self.c)):
            acc = set()
            for s in red.pi[y]:
                x = owner.get(s)
                if x is not None:
                    acc ^= {x}
            if acc:
                cols[y] = acc
        k = self.u.n_components
        return _map(self.c, self.cd, cols, _degree(self.t, k), "death", self.check)


# ---------------------------------------------------------------------------
# Reidemeister moves via unknot factorizations


@dataclass(frozen=True)
class Factorization:
    """d u u --bands--> banded, with banded isomorphic to the move's result."""

    d: LinkDiagram
    u: LinkDiagram
    bands: tuple  # ((e, x), ...) applied in order
    steps: tuple  # diagrams after each band
    iso: Isomorphism  # banded -> target


def _fresh_unlink(d: LinkDiagram, k: int) -> tuple[LinkDiagram, list[int]]:
    base = d.max_edge() + 1
    loops = list(range(base, base + k))
    return LinkDiagram([], loops), loops


def _try_bands(d: LinkDiagram, u: LinkDiagram, pairs, target: LinkDiagram):
    big = LinkDiagram(d.crossings + u.crossings, d.loops + u.loops, d.basepoint)
    cur = big
    steps = []
    for e, x in pairs:
        try:
            cur, _ = band(cur, e, x)
        except PreconditionError:
            return None
        steps.append(cur)
    iso = find_isomorphism(cur, target)
    if iso is None:
        return None
    return Factorization(d, u, tuple(pairs), tuple(steps), iso)


def _factor_r1(d: LinkDiagram, e: int, sign: int, target: LinkDiagram) -> Factorization:
    u0, (lp,) = _fresh_unlink(d, 1)
    u, _ = r1(u0, lp, sign)
    for x in u.edges:
        for pair in ((e, x), (x, e)):
            f = _try_bands(d, u, [pair], target)
            if f is not None:
                return f
    raise SiteError(f"no unknot factorization found for RI on edge {e}")


def _factor_r2(d: LinkDiagram, e1: int, e2: int, target: LinkDiagram) -> Factorization:
    u0, (l1, l2) = _fresh_unlink(d, 2)
    for over in (True, False):
        for t1, t2 in ((1, -1), (1, 1), (-1, 1), (-1, -1)):
            try:
                u, info = r2(u0, l1, l2, over, t1, t2)
            except PreconditionError:
                continue
            comp1 = next(c for c in u.components if info["e1"][1] in c)
            comp2 = next(c for c in u.components if info["e2"][1] in c)
            for x in comp1:
                for y in comp2:
                    f = _try_bands(d, u, [(e1, x), (e2, y)], target)
                    if f is not None:
                        return f
    raise SiteError(f"no unknot factorization found for RII on edges {e1}, {e2}")


def _forward_map(fac: Factorization, target: LinkDiagram, t, check: bool) -> FilteredMap:
    fib = FiberCollapse(fac.d, fac.u, t, check=check)
    maps = [fib.birth()]
    cur = fib.big
    for (e, x), nxt in zip(fac.bands, fac.steps):
        f, cur = handle1_map(cur, e, x, t, check=check)
        maps.append(f)
    maps.append(isotopy_map(cur, target, t, fac.iso, check=check))
    return _chain(maps, "R", check)


def _inverse_map(fac: Factorization, source: LinkDiagram, t, check: bool) -> FilteredMap:
    """source (isomorphic to the banded diagram) -> d, undoing the bands and killing the unlink."""
    fib = FiberCollapse(fac.d, fac.u, t, check=check)
    banded = fac.steps[-1]
    inv = find_isomorphism(source, banded)
    maps = [isotopy_map(source, banded, t, inv, check=check)]
    befores = (fib.big,) + fac.steps[:-1]
    for (e, x), before in reversed(list(zip(fac.bands, befores))):
        f, _ = handle1_map(before, e, x, t, reverse=True, check=check)
        maps.append(f)
    maps.append(fib.death())
    return _chain(maps, "R^-1", check)


def _split_off(big: LinkDiagram, a: int, b: int, small: LinkDiagram):
    """Two bands on ``big`` next to the bigon (a, b) that split off a
    two-crossing unlink and leave a relabelling of ``small``."""
    corners = {big.tails[a][0], big.heads[a][0]}
    near_c = set(corners)
    for c in corners:
        for e in big.crossings[c]:
            near_c |= {big.tails[e][0], big.heads[e][0]}
    near = sorted({e for c in near_c for e in big.crossings[c]})
    k = big.n_components
    for p, q in itertools.combinations(near, 2):
        try:
            b1, _ = band(big, p, q)
        except PreconditionError:
            continue
        if b1.n_components != k + 1:
            continue
        for p2, q2 in itertools.combinations(near, 2):
            try:
                b2, _ = band(b1, p2, q2)
            except PreconditionError:
                continue
            if b2.n_components != k + 2:
                continue
            for piece in b2.pieces():
                if len(piece) != 2:
                    continue
                u = LinkDiagram([b2.crossings[i] for i in sorted(piece)])
                if u.n_components != 2 or (b2.basepoint is not None and b2.basepoint in u.edges):
                    continue
                rest_idx = [i for i in range(b2.n_crossings) if i not in piece]
                rest = LinkDiagram([b2.crossings[i] for i in rest_idx], b2.loops, b2.basepoint)
                iso = find_isomorphism(rest, small)
                if iso is not None:
                    order = rest_idx + sorted(piece)
                    perm = [0] * b2.n_crossings
                    for new, old in enumerate(order):
                        perm[old] = new
                    return [(p, q), (p2, q2)], [b1, b2], u, rest, Isomorphism({e: e for e in b2.edges}, tuple(perm)), iso
    raise SiteError(f"no band pair splits the bigon ({a}, {b}) off as an unlink")


def _split_inverse_map(big: LinkDiagram, a: int, b: int, small: LinkDiagram, t, check: bool) -> FilteredMap:
    """RII removal as two splitting saddles followed by the death of the split unlink."""
    bands, steps, u, rest, to_fib, to_small = _split_off(big, a, b, small)
    fib = FiberCollapse(rest, u, t, check=check)
    maps = []
    cur = big
    for p, q in bands:
        f, cur = handle1_map(cur, p, q, t, check=check)
        maps.append(f)
    maps.append(isotopy_map(cur, fib.big, t, to_fib, check=check))
    maps.append(fib.death())
    maps.append(isotopy_map(rest, small, t, to_small, check=check))
    return _chain(maps, "R^-1", check)


def _find_forward(source: LinkDiagram, smaller: LinkDiagram, kind: str, hint: Sequence[int] = ()):
    """A forward move on ``smaller`` whose result is isomorphic to ``source``.

    Edges in ``hint`` (labels that survive the removal next to the site) are
    tried first; the rest of the diagram is searched after them.
    """
    hint = [e for e in hint if e in smaller.edges]
    edges = hint + [e for e in smaller.edges if e not in hint]
    if kind == "r1":
        for e in edges:
            for sign in (1, -1):
                cand, _ = r1(smaller, e, sign)
                if find_isomorphism(cand, source) is not None:
                    return ("r1", e, sign), cand
    else:
        # the two strands through a bigon keep their entering labels
        pairs = list(itertools.permutations(hint, 2)) if len(hint) == 2 else itertools.permutations(edges, 2)
        for a, b in pairs:
            for over in (True, False):
                for t1, t2 in ((None, None), (1, -1), (1, 1), (-1, 1), (-1, -1)):
                    try:
                        cand, _ = r2(smaller, a, b, over, t1, t2)
                    except PreconditionError:
                        continue
                    if find_isomorphism(cand, source) is not None:
                        return ("r2", a, b, over, t1, t2), cand
    raise SiteError("could not locate the inverse move as a forward move")


_R3_PATTERNS: list = []


def _r3_patterns() -> list:
    """Pairs (U_a, U_b) of three-component unlink diagrams related by RIII,
    where U_a arises from three loops by three RII moves, one per pair."""
    if _R3_PATTERNS:
        return _R3_PATTERNS
    def key(d):
        # cheap isomorphism invariant; find_isomorphism only runs within a key class
        return (d.n_crossings, d.n_plus, tuple(sorted(len(f) for f in d.faces())))

    level = [LinkDiagram([], [1, 2, 3])]
    for _ in range(3):
        nxt = []
        seen: dict = {}
        for d in level:
            for a, b in itertools.permutations(d.edges, 2):
                if d.component_of(a) == d.component_of(b):
                    continue
                for over in (True, False):
                    for t1, t2 in ((None, None), (1, -1), (1, 1), (-1, 1), (-1, -1)):
                        try:
                            d2, _ = r2(d, a, b, over, t1, t2)
                        except PreconditionError:
                            continue
                        bucket = seen.setdefault(key(d2), [])
                        if all(find_isomorphism(d2, x) is None for x in bucket):
                            bucket.append(d2)
                            nxt.append(d2)
        level = nxt
    for d in level:
        for face in d.faces():
            if len(face) != 3:
                continue
            es = [d.crossings[c][s] for c, s, _ in face]
            try:
                _R3_PATTERNS.append((d, r3(d, *es)))
            except PreconditionError:
                pass
    return _R3_PATTERNS


def _ends(d: LinkDiagram, e: int) -> tuple[int, int]:
    tc, ts = d.tails[e]
    hc, hs = d.heads[e]
    return d.crossings[tc][(ts + 2) % 4], d.crossings[hc][(hs + 2) % 4]


def _bigon_sites(d: LinkDiagram):
    """Bigons removable by an RII move."""
    for face in d.faces():
        if len(face) == 2:
            a, b = (d.crossings[c][s] for c, s, _ in face)
            try:
                yield (a, b), r2_remove(d, a, b)
            except PreconditionError:
                continue


def _reduce_to(d: LinkDiagram, target: LinkDiagram, depth: int):
    """Sequence of bigon removals carrying d onto a relabelling of target."""
    if depth == 0:
        return [] if find_isomorphism(d, target) is not None else None
    for site, d2 in _bigon_sites(d):
        rest = _reduce_to(d2, target, depth - 1)
        if rest is not None:
            return [site] + rest
    return None


def _factor_r3(d: LinkDiagram, sides: tuple, target: LinkDiagram):
    shift = d.max_edge()
    for _, ub in _r3_patterns():
        ub = relabel(ub, {e: e + shift for e in ub.edges})
        comps = ub.components
        for perm in itertools.permutations(range(3)):
            for xs in itertools.product(*(comps[p] for p in perm)):
                pairs = list(zip(sides, xs))
                cur = LinkDiagram(d.crossings + ub.crossings, d.loops + ub.loops, d.basepoint)
                steps = []
                try:
                    for e, x in pairs:
                        cur, _ = band(cur, e, x)
                        steps.append(cur)
                except PreconditionError:
                    continue
                if not cur.is_planar():
                    continue
                bigons = _reduce_to(cur, target, 3)
                if bigons is not None:
                    return ub, pairs, steps, bigons
    raise SiteError(f"no unknot factorization found for RIII on edges {sides}")


def _r3_map(d: LinkDiagram, sides, target: LinkDiagram, t, check: bool) -> FilteredMap:
    """Birth of a three-component unlink in its unit class, three bands, then
    three RII removals: the unlink factorization of an RIII move."""
    ub, pairs, steps, bigons = _factor_r3(d, tuple(sides), target)
    # the pieces are only validated through the composite
    fib = FiberCollapse(d, ub, t, check=False)
    maps = [fib.birth()]
    cur = fib.big
    for e, x in pairs:
        f, cur = handle1_map(cur, e, x, t, check=False)
        maps.append(f)
    for a, b in bigons:
        mv = ElementaryMove("r2-", (a, b))
        maps.append(reidemeister_map(cur, mv, t, check=False))
        cur = mv.apply(cur)
    maps.append(isotopy_map(cur, target, t, check=False))
    return _chain(maps, "R3", check)


def reidemeister_map(d: LinkDiagram, move: "ElementaryMove", t, d2: LinkDiagram | None = None, check: bool = True) -> FilteredMap:
    """Filtered chain map for a Reidemeister move built from births, saddles and deaths."""
    t = _theory(t)
    target = move.apply(d)
    if d2 is not None and find_isomorphism(target, d2) is None:
        raise SiteError("second diagram is not the result of the move")
    kind, args = move.kind, move.args
    if kind == "r1":
        e, sign = args
        fac = _factor_r1(d, e, sign, target)
        return _forward_map(fac, target, t, check)
    if kind == "r2":
        e1, e2, over = args
        fac = _factor_r2(d, e1, e2, target)
        return _forward_map(fac, target, t, check)
    if kind in ("r1-", "r2-"):
        if kind == "r1-":
            c = _kink_crossing(d, args[0])
            hint = [e for e in d.crossings[c] if e != args[0]]
        else:
            hint = [_ends(d, args[0])[0], _ends(d, args[1])[0]]
        try:
            fwd, small = _find_forward(d, target, kind[:2], hint)
        except SiteError:
            if kind == "r1-":
                raise
            return _split_inverse_map(d, args[0], args[1], target, t, check)
        if fwd[0] == "r1":
            fac = _factor_r1(target, fwd[1], fwd[2], small)
        else:
            fac = _factor_r2(target, fwd[1], fwd[2], small)
        return _inverse_map(fac, d, t, check)
    if kind == "r3":
        return _r3_map(d, args, target, t, check)
    raise PreconditionError(f"{kind} is not a Reidemeister move")


# ---------------------------------------------------------------------------
# extending a map to a chain map


def extend_to_chain_map(src: FilteredComplex, tgt: FilteredComplex, f0: F2Matrix, degree: int = 0, max_unknowns: int = 60000):
    """Find f = f0 + g with g of filtration shift > degree such that f is a chain map.

    The correction g is homogeneous in the grading that the filtration does
    not record (q for homologically filtered complexes, h otherwise), with the
    same offset as f0.  Returns a FilteredMap or None when no solution exists.
    """
    key = _aux_key(src, tgt)
    fs, ft = src.filtration, tgt.filtration
    cols0 = f0.columns()
    offs = {tgt.gradings[r].get(key, 0) - src.gradings[c].get(key, 0) for c, rs in cols0.items() for r in rs}
    off = offs.pop() if len(offs) == 1 else 0
    by_aux: dict[int, list[int]] = {}
    for r in range(len(tgt)):
        by_aux.setdefault(tgt.gradings[r].get(key, 0), []).append(r)
    unknowns = []
    for c in range(len(src)):
        a = src.gradings[c].get(key, 0) + off
        for r in by_aux.get(a, ()):
            if ft[r] - fs[c] > degree:
                unknowns.append((r, c))
    if len(unknowns) > max_unknowns:
        raise PreconditionError(f"linear system too large ({len(unknowns)} unknowns)")
    # condition: d' f + f d = 0, entries indexed by (row in tgt, col in src)
    dsrc, dtgt = src.out, tgt.out
    insrc: list[list[int]] = [[] for _ in range(len(src))]
    for j, o in enumerate(dsrc):
        for r in o:
            insrc[r].append(j)
    eq_index: dict[tuple[int, int], int] = {}

    def eq(r, c):
        k = eq_index.get((r, c))
        if k is None:
            k = eq_index[(r, c)] = len(eq_index)
        return k

    # constant term from f0
    const: dict[int, int] = {}
    for c, rs in cols0.items():
        for r in rs:
            for r2 in dtgt[r]:
                k = eq(r2, c)
                const[k] = const.get(k, 0) ^ 1
            for c2 in insrc[c]:
                k = eq(r, c2)
                const[k] = const.get(k, 0) ^ 1
    columns = []
    for r, c in unknowns:
        v = 0
        for r2 in dtgt[r]:
            v ^= 1 << eq(r2, c)
        for c2 in insrc[c]:
            v ^= 1 << eq(r, c2)
        columns.append(v)
    b = 0
    for k, bit in const.items():
        if bit:
            b |= 1 << k
    sol = _solve_f2(columns, b)
    if sol is None:
        return None
    cols = {c: set(rs) for c, rs in cols0.items()}
    for i in sol:
        r, c = unknowns[i]
        cols.setdefault(c, set()).symmetric_difference_update({r})
    return _map(src, tgt, cols, degree, "extended", True)


def _aux_key(src: FilteredComplex, tgt: FilteredComplex) -> str:
    for i in range(len(src)):
        g = src.gradings[i]
        if "h" in g and "q" in g:
            return "q" if src.filtration[i] == g["h"] else "h"
    return "h"


def _solve_f2(columns: list[int], b: int):
    """Indices of a subset of columns summing to b, or None."""
    pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination)
    for i, v in enumerate(columns):
        comb = 1 << i
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                pv, pc = pivots[top]
                v ^= pv
                comb ^= pc
            else:
                pivots[top] = (v, comb)
                break
    comb = 0
    while b:
        top = b.bit_length() - 1
        if top not in pivots:
            return None
        pv, pc = pivots[top]
        b ^= pv
        comb ^= pc
    return list(_iter_bits(comb))


# ---------------------------------------------------------------------------
# movies


_KINDS = ("iso", "h0", "h1", "h2", "r1", "r1-", "r2", "r2-", "r3")


@dataclass(frozen=True)
class ElementaryMove:
    """One step of a movie.

    kinds and args: ``iso`` ((old, new), ...); ``h0`` (); ``h1`` (e1, e2);
    ``h2`` (loop,); ``r1`` (edge, sign); ``r1-`` (kink loop edge,);
    ``r2`` (e1, e2, over); ``r2-`` (a, b); ``r3`` (a, b, c).
    """

    kind: str
    args: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParseError(f"unknown move kind {self.kind!r}")

    def apply(self, d: LinkDiagram) -> LinkDiagram:
        k, a = self.kind, self.args
        if k == "iso":
            return relabel(d, dict(a))
        if k == "h0":
            return add_loop(d)[0]
        if k == "h1":
            return band(d, a[0], a[1])[0]
        if k == "h2":
            return remove_loop(d, a[0])
        if k == "r1":
            return r1(d, a[0], a[1])[0]
        if k == "r1-":
            return r1_remove(d, _kink_crossing(d, a[0]))
        if k == "r2":
            return r2(d, a[0], a[1], a[2])[0]
        if k == "r2-":
            return r2_remove(d, a[0], a[1])
        return r3(d, *a)

    def __str__(self):
        k, a = self.kind, self.args
        if k == "iso":
            return "iso " + ",".join(f"{x}:{y}" for x, y in a)
        if k == "h0":
            return "h0"
        if k == "h1":
            return f"h1 {a[0]} {a[1]}"
        if k == "h2":
            return f"h2 {a[0]}"
        if k == "r1":
            return f"r1 {a[0]} {'+' if a[1] > 0 else '-'}"
        if k == "r1-":
            return f"r1 {a[0]} remove"
        if k == "r2":
            return f"r2 {a[0]},{a[1]} {'o' if a[2] else 'u'}"
        if k == "r2-":
            return f"r2 {a[0]},{a[1]} -"
        return "r3 " + ",".join(str(x) for x in a)


def _kink_crossing(d: LinkDiagram, m: int) -> int:
    for i, x in enumerate(d.crossings):
        if x.count(m) == 2:
            return i
    raise SiteError(f"edge {m} is not the small loop of a kink")


@dataclass
class Movie:
    start: LinkDiagram
    moves: list = field(default_factory=list)

    def __post_init__(self):
        self.diagrams = [self.start]
        for i, mv in enumerate(self.moves):
            try:
                self.diagrams.append(mv.apply(self.diagrams[-1]))
            except PreconditionError as exc:
                raise type(exc)(f"move {i + 1} ({mv}): {exc}") from exc

    @property
    def end(self) -> LinkDiagram:
        return self.diagrams[-1]

    def __str__(self):
        return "\n".join([f"start {self.start.to_pd()}"] + [str(m) for m in self.moves]) + "\n"


def _ints(text: str, lineno: int) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"line {lineno}: expected comma-separated edge ids, got {text!r}") from None


def parse_movie(text: str) -> Movie:
    start = None
    moves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if start is None:
            if head != "start":
                raise ParseError(f"line {lineno}: a movie must begin with 'start <diagram>'")
            start = parse_diagram(rest)
            continue
        parts = rest.split()
        try:
            if head == "iso":
                pairs = []
                for tok in rest.replace(" ", "").split(","):
                    if tok:
                        x, y = tok.split(":")
                        pairs.append((int(x), int(y)))
                moves.append(ElementaryMove("iso", tuple(pairs)))
            elif head == "h0":
                moves.append(ElementaryMove("h0"))
            elif head == "h1":
                moves.append(ElementaryMove("h1", (int(parts[0]), int(parts[1]))))
            elif head == "h2":
                moves.append(ElementaryMove("h2", (int(parts[0]),)))
            elif head == "r1":
                e, s = int(parts[0]), parts[1]
                if s == "remove":
                    moves.append(ElementaryMove("r1-", (e,)))
                elif s in ("+", "+1", "1"):
                    moves.append(ElementaryMove("r1", (e, 1)))
                elif s in ("-", "-1"):
                    moves.append(ElementaryMove("r1", (e, -1)))
                else:
                    raise ParseError(f"line {lineno}: RI sign must be + or - (or 'remove')")
            elif head == "r2":
                a, b = _ints(parts[0], lineno)
                mode = parts[1] if len(parts) > 1 else "o"
                if mode == "-":
                    moves.append(ElementaryMove("r2-", (a, b)))
                elif mode in ("o", "u"):
                    moves.append(ElementaryMove("r2", (a, b, mode == "o")))
                else:
                    raise ParseError(f"line {lineno}: RII mode must be o, u or -")
            elif head == "r3":
                moves.append(ElementaryMove("r3", tuple(_ints(parts[0], lineno))))
            else:
                raise ParseError(f"line {lineno}: unknown move {head!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"line {lineno}: malformed move {line!r}") from None
    if start is None:
        raise ParseError("empty movie")
    return Movie(start, moves)


def elementary_map(d: LinkDiagram, move: ElementaryMove, t, check: bool = True) -> tuple[FilteredMap, LinkDiagram]:
    t = _theory(t)
    k, a = move.kind, move.args
    if k == "iso":
        d2 = move.apply(d)
        iso = Isomorphism({e: dict(a).get(e, e) for e in d.edges}, tuple(range(d.n_crossings)))
        return isotopy_map(d, d2, t, iso, check), d2
    if k == "h0":
        return handle0_map(d, t, check)
    if k == "h1":
        return handle1_map(d, a[0], a[1], t, check=check)
    if k == "h2":
        return handle2_map(d, a[0], t, check)
    d2 = move.apply(d)
    return reidemeister_map(d, move, t, check=check), d2


def movie_map(m: Movie, t, check: bool = True) -> FilteredMap:
    """Composite filtered chain map of a movie (identity for an empty movie)."""
    t = _theory(t)
    if not m.moves:
        return identity_map(complex_of(m.start, t))
    maps = []
    d = m.start
    for mv in m.moves:
        f, d = elementary_map(d, mv, t, check)
        maps.append(f)
    return _chain(maps, "movie", check)


def movie_page_maps(m: Movie, t, pages: Sequence[int] | None = None, end: LinkDiagram | None = None) -> dict[int, F2Matrix]:
    """E_i maps of a movie for the requested pages (default: 2 up to stabilization).

    ``end``: a relabelling of the final diagram to land in, so that movies
    whose last frames differ only by labels can be compared.
    """
    t = _theory(t)
    f = movie_map(m, t)
    if end is not None and end != m.end:
        f = _chain([f, isotopy_map(m.end, end, t)], "movie")
    s1 = compute_pages(f.source)
    s2 = compute_pages(f.target)
    if pages is None:
        top = max(2, s1.stabilization_index, s2.stabilization_index)
        pages = range(2, top + 1)
    return {i: induced_page_map(f, s1, s2, i) for i in pages}
