"""Filtered complexes, cancellation and the spectral sequence engine.

A filtered complex here is a based F2 complex whose generators carry an
integer filtration grading, with a differential that never lowers it.  The
differential splits as d = d^0 + d^1 + ... where d^k raises the grading by
exactly k.  Pages are computed by staged cancellation: stage i cancels every
component of shift exactly i-1 that is still present, always choosing the
smallest (row, col) pivot first (or the largest, when asked for the reversed
order).  The surviving generators form a basis of E_i; the shift-i part of
the reduced differential is d_i.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import IntegrityError, InvalidPivotError, PreconditionError, ShapeError
from .f2core import F2Matrix, mat_mul

__all__ = [
    "FilteredComplex",
    "FilteredMap",
    "CancellationStep",
    "Page",
    "SpectralSequence",
    "Collapse",
    "cancel",
    "compute_pages",
    "induced_page_map",
    "collapse_projection",
    "compose",
    "identity_map",
]


class FilteredComplex:
    """Generators with a filtration grading plus auxiliary gradings, and a differential.

    The differential is stored as ``out[j]``: the set of generator indices in
    d(x_j).  ``components`` recovers the matrices d^k.
    """

    def __init__(
        self,
        generators: Sequence,
        filtration: Sequence[int],
        out: Sequence[Iterable[int]],
        gradings: Sequence[Mapping[str, int]] | None = None,
        check: bool = True,
        name: str = "",
    ):
        n = len(generators)
        if len(filtration) != n or len(out) != n:
            raise ShapeError("generators, filtration and differential lengths differ")
        self.generators = list(generators)
        self.filtration = [int(f) for f in filtration]
        self.out = [frozenset(o) for o in out]
        self.gradings = [dict(g) for g in gradings] if gradings is not None else [{} for _ in range(n)]
        self.name = name
        self._index = None
        if check:
            self.validate()

    @classmethod
    def from_components(
        cls,
        generators: Sequence,
        filtration: Sequence[int],
        components: Mapping[int, F2Matrix],
        gradings: Sequence[Mapping[str, int]] | None = None,
        check: bool = True,
    ) -> "FilteredComplex":
        n = len(generators)
        out: list[set[int]] = [set() for _ in range(n)]
        for k, m in components.items():
            if m.shape != (n, n):
                raise ShapeError(f"component {k} has shape {m.shape}, expected {(n, n)}")
            for c, rs in m.columns().items():
                for r in rs:
                    if filtration[r] - filtration[c] != k:
                        raise IntegrityError(f"component {k} is not homogeneous of shift {k}")
                    out[c] ^= {r}
        return cls(generators, filtration, out, gradings, check)

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        return f"FilteredComplex({self.name or '?'}, {len(self)} generators)"

    def index_of(self, label) -> int:
        if self._index is None:
            self._index = {g: i for i, g in enumerate(self.generators)}
        return self._index[label]

    def shift(self, src: int, tgt: int) -> int:
        return self.filtration[tgt] - self.filtration[src]

    def validate(self) -> None:
        n = len(self)
        for j, o in enumerate(self.out):
            for r in o:
                if not 0 <= r < n:
                    raise ShapeError(f"differential entry {r} out of range")
                if self.filtration[r] < self.filtration[j]:
                    raise IntegrityError("differential lowers the filtration grading")
        if not self.d_squared_zero():
            raise IntegrityError("differential does not square to zero")

    def d_squared_zero(self) -> bool:
        out = self.out
        for o in out:
            acc: set[int] = set()
            for t in o:
                acc ^= out[t]
            if acc:
                return False
        return True

    @property
    def differential(self) -> F2Matrix:
        n = len(self)
        return F2Matrix.from_columns(n, n, {j: o for j, o in enumerate(self.out) if o})

    @property
    def components(self) -> dict[int, F2Matrix]:
        n = len(self)
        cols: dict[int, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
        for j, o in enumerate(self.out):
            for r in o:
                cols[self.filtration[r] - self.filtration[j]][j].append(r)
        return {k: F2Matrix.from_columns(n, n, c) for k, c in sorted(cols.items())}

    def grading_values(self, i: int, keys: Sequence[str]) -> tuple:
        g = self.gradings[i]
        return tuple(self.filtration[i] if k == "filtration" else g[k] for k in keys)

    def dims(self, keys: Sequence[str] = ("filtration",)) -> dict[tuple, int]:
        return dict(Counter(self.grading_values(i, keys) for i in range(len(self))))


@dataclass
class CancellationStep:
    """Result of cancelling one coefficient d(x_k, x_l) = 1."""

    pair: tuple[int, int]
    complex: FilteredComplex
    kept: list[int]
    pi: F2Matrix
    iota: F2Matrix
    h: F2Matrix


def cancel(c: FilteredComplex, pair: tuple[int, int]) -> CancellationStep:
    """Cancel the component from x_k to x_l.

    The reduced differential is d'(x_i) = d(x_i) + d(x_i, x_l) d(x_k) restricted
    to the remaining generators; pi = P(id + d h), iota = (id + h d) I and
    h(x_l) = x_k.
    """
    k, l = pair
    n = len(c)
    if not (0 <= k < n and 0 <= l < n) or l not in c.out[k]:
        raise InvalidPivotError(f"coefficient d(x_{k}, x_{l}) is zero")
    if k == l:
        raise InvalidPivotError("cannot cancel a generator against itself")
    kept = [i for i in range(n) if i not in (k, l)]
    pos = {g: i for i, g in enumerate(kept)}
    dk = c.out[k]
    new_out = []
    for i in kept:
        o = c.out[i]
        if l in o:
            o = o ^ dk
        new_out.append({pos[t] for t in o if t in pos})
    reduced = FilteredComplex(
        [c.generators[i] for i in kept],
        [c.filtration[i] for i in kept],
        new_out,
        [c.gradings[i] for i in kept],
        check=False,
    )
    # pi(y) = P(y + y_l d(x_k)), column by column on the old basis
    pi_cols = {}
    for j in range(n):
        if j == k:
            continue
        if j == l:
            v = dk - {l}
        else:
            v = {j}
        pi_cols[j] = [pos[t] for t in v if t in pos]
    pi = F2Matrix.from_columns(len(kept), n, pi_cols)
    # iota(x_i) = x_i + d(x_i, x_l) x_k
    iota_cols = {}
    for i in kept:
        iota_cols[pos[i]] = [i, k] if l in c.out[i] else [i]
    iota = F2Matrix.from_columns(n, len(kept), iota_cols)
    h = F2Matrix.from_columns(n, n, {l: [k]})
    return CancellationStep((k, l), reduced, kept, pi, iota, h)


@dataclass
class Page:
    """Page E_i: a basis (indices of surviving original generators) and d_i."""

    index: int
    basis: list[int]
    differential: F2Matrix
    source: FilteredComplex = field(repr=False)

    def __len__(self):
        return len(self.basis)

    def dims(self, keys: Sequence[str] = ("filtration",)) -> dict[tuple, int]:
        return dict(Counter(self.source.grading_values(b, keys) for b in self.basis))

    def as_complex(self) -> FilteredComplex:
        """The page with its own differential d_i, as a filtered complex."""
        cols = self.differential.columns()
        src = self.source
        return FilteredComplex(
            [src.generators[b] for b in self.basis],
            [src.filtration[b] for b in self.basis],
            [cols.get(j, ()) for j in range(len(self.basis))],
            [src.gradings[b] for b in self.basis],
            check=False,
        )


class SpectralSequence:
    """Pages E_0, ..., E_s of a filtered complex, where s is the stabilization index.

    ``pi[i]`` maps each original generator to its image (a frozenset of
    surviving generators) under pi_(i); ``iota[i]`` maps each surviving
    generator to its image in the original complex under iota_(i).  Both are
    present only when the maps were tracked.
    """

    def __init__(self, complex: FilteredComplex, pages: list[Page], pi, iota, reverse: bool):
        self.complex = complex
        self.pages = pages
        self.pi = pi
        self.iota = iota
        self.reverse = reverse
        self.stabilization_index = len(pages) - 1
        self.pivots: list[tuple[int, int]] = []  # (source, target) in cancellation order

    def page(self, i: int) -> Page:
        if i < 0:
            raise PreconditionError("page index must be non-negative")
        return self.pages[min(i, self.stabilization_index)]

    @property
    def e_infinity(self) -> Page:
        return self.pages[-1]

    def dims(self, i: int, keys: Sequence[str] = ("filtration",)) -> dict[tuple, int]:
        return self.page(i).dims(keys)

    def total_dims(self) -> list[int]:
        return [len(p) for p in self.pages]

    def stage_maps(self, i: int):
        if self.pi is None:
            raise PreconditionError("spectral sequence was computed without map tracking")
        j = min(i, self.stabilization_index)
        return self.pi[j], self.iota[j]


class _Reducer:
    """Mutable cancellation state over the original generator indices."""

    def __init__(self, c: FilteredComplex, track: bool):
        self.c = c
        self.f = c.filtration
        n = len(c)
        self.out = [set(o) for o in c.out]
        self.inn: list[set[int]] = [set() for _ in range(n)]
        for j, o in enumerate(c.out):
            for r in o:
                self.inn[r].add(j)
        self.alive = set(range(n))
        self.track = track
        self.log: list[tuple[int, int]] = []
        if track:
            self.pi = {g: {g} for g in range(n)}
            self.piinv = {g: {g} for g in range(n)}
            self.iota = {g: {g} for g in range(n)}

    def entries_of_shift(self, s: int):
        f = self.f
        for j in self.alive:
            fj = f[j]
            for r in self.out[j]:
                if f[r] - fj == s:
                    yield (r, j)

    def cancel(self, k: int, l: int, heap, s: int, sign: int) -> None:
        out, inn, f = self.out, self.inn, self.f
        self.log.append((k, l))
        dk = out[k]
        sources = [i for i in inn[l] if i != k]
        if self.track:
            ik = self.iota[k]
            for i in sources:
                self.iota[i] ^= ik
            for g in list(self.piinv[l]):
                pg = self.pi[g]
                for t in dk:
                    if t in pg:
                        pg.discard(t)
                        self.piinv[t].discard(g)
                    else:
                        pg.add(t)
                        self.piinv[t].add(g)
            for g in list(self.piinv.get(k, ())):
                self.pi[g].discard(k)
            self.piinv.pop(k, None)
            self.piinv.pop(l, None)
            del self.iota[k]
            del self.iota[l]
        for i in sources:
            oi = out[i]
            fi = f[i]
            for t in dk:
                if t in oi:
                    oi.discard(t)
                    inn[t].discard(i)
                else:
                    oi.add(t)
                    inn[t].add(i)
                    if heap is not None and f[t] - fi == s and t != k and t != l:
                        heapq.heappush(heap, (sign * t, sign * i))
        for t in out[k]:
            inn[t].discard(k)
        for t in out[l]:
            inn[t].discard(l)
        for i in inn[k]:
            out[i].discard(k)
        for i in inn[l]:
            out[i].discard(l)
        out[k] = set()
        out[l] = set()
        inn[k] = set()
        inn[l] = set()
        self.alive.discard(k)
        self.alive.discard(l)

    def run_stage(self, s: int, reverse: bool) -> None:
        sign = -1 if reverse else 1
        heap = [(sign * r, sign * j) for r, j in self.entries_of_shift(s)]
        heapq.heapify(heap)
        f = self.f
        while heap:
            r, j = heapq.heappop(heap)
            l, k = sign * r, sign * j
            if k in self.alive and l in self.alive and l in self.out[k] and k != l:
                if f[l] - f[k] == s:
                    self.cancel(k, l, heap, s, sign)

    def page(self, index: int) -> Page:
        basis = sorted(self.alive)
        pos = {g: i for i, g in enumerate(basis)}
        f = self.f
        cols = {}
        for g in basis:
            tg = [pos[r] for r in self.out[g] if f[r] - f[g] == index]
            if tg:
                cols[pos[g]] = tg
        n = len(basis)
        return Page(index, basis, F2Matrix.from_columns(n, n, cols), self.c)

    def has_differential(self) -> bool:
        return any(self.out[g] for g in self.alive)

    def snapshot(self):
        return (
            {g: frozenset(v) for g, v in self.pi.items()},
            {g: frozenset(v) for g, v in self.iota.items()},
        )


def compute_pages(c: FilteredComplex, track_maps: bool = True, reverse: bool = False) -> SpectralSequence:
    """All pages E_0 .. E_s of ``c`` where s is the first index with d_(s) = 0."""
    red = _Reducer(c, track_maps)
    pages = [red.page(0)]
    pis, iotas = ([], []) if track_maps else (None, None)
    if track_maps:
        p, io = red.snapshot()
        pis.append(p)
        iotas.append(io)
    i = 0
    span = (max(c.filtration) - min(c.filtration)) if len(c) else 0
    while red.has_differential():
        i += 1
        if i - 1 > span:
            raise IntegrityError("differential has components that can never be cancelled")
        red.run_stage(i - 1, reverse)
        pages.append(red.page(i))
        if track_maps:
            p, io = red.snapshot()
            pis.append(p)
            iotas.append(io)
    ss = SpectralSequence(c, pages, pis, iotas, reverse)
    ss.pivots = red.log
    return ss


class FilteredMap:
    """A chain map between filtered complexes with a declared degree.

    ``matrix`` has shape (len(target), len(source)).  Every entry must shift
    the filtration by at least ``degree``; the component of shift exactly j is
    f^j.
    """

    def __init__(
        self,
        source: FilteredComplex,
        target: FilteredComplex,
        matrix: F2Matrix,
        degree: int,
        check: bool = True,
        name: str = "",
    ):
        if matrix.shape != (len(target), len(source)):
            raise ShapeError(f"map matrix {matrix.shape} does not match {len(target)}x{len(source)}")
        self.source = source
        self.target = target
        self.matrix = matrix
        self.degree = int(degree)
        self.name = name
        if check:
            self.validate()

    def validate(self) -> None:
        fs, ft = self.source.filtration, self.target.filtration
        for c, rs in self.matrix.columns().items():
            for r in rs:
                if ft[r] - fs[c] < self.degree:
                    raise IntegrityError(
                        f"map component shifts filtration by {ft[r] - fs[c]} < degree {self.degree}"
                    )
        if not self.is_chain_map():
            raise IntegrityError(f"map {self.name or ''} is not a chain map")

    def is_chain_map(self) -> bool:
        lhs = mat_mul(self.target.differential, self.matrix)
        rhs = mat_mul(self.matrix, self.source.differential)
        return lhs == rhs

    @property
    def components(self) -> dict[int, F2Matrix]:
        fs, ft = self.source.filtration, self.target.filtration
        cols: dict[int, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
        for c, rs in self.matrix.columns().items():
            for r in rs:
                cols[ft[r] - fs[c]][c].append(r)
        shape = self.matrix.shape
        return {k: F2Matrix.from_columns(shape[0], shape[1], v) for k, v in sorted(cols.items())}

    def __matmul__(self, other: "FilteredMap") -> "FilteredMap":
        return compose(self, other)

    def __repr__(self):
        return f"FilteredMap({self.name or '?'}: {len(self.source)} -> {len(self.target)}, degree {self.degree})"


def _same_complex(a: FilteredComplex, b: FilteredComplex) -> bool:
    return a is b or (a.generators == b.generators and a.filtration == b.filtration and a.out == b.out)


def compose(g: FilteredMap, f: FilteredMap, check: bool = False) -> FilteredMap:
    """g o f, of degree deg(g) + deg(f)."""
    if not _same_complex(f.target, g.source):
        raise ShapeError("maps are not composable: target and source complexes differ")
    return FilteredMap(f.source, g.target, mat_mul(g.matrix, f.matrix), f.degree + g.degree, check=check)


def identity_map(c: FilteredComplex, degree: int = 0) -> FilteredMap:
    return FilteredMap(c, c, F2Matrix.identity(len(c)), degree, check=False, name="id")


def induced_page_map(f: FilteredMap, s: SpectralSequence, s2: SpectralSequence, i: int) -> F2Matrix:
    """E_i(f): the shift-exactly-degree part of pi'_(i) o f o iota_(i), on page bases."""
    if not _same_complex(s.complex, f.source) or not _same_complex(s2.complex, f.target):
        raise ShapeError("spectral sequences do not belong to the map's source and target")
    if i < 0:
        raise PreconditionError("page index must be non-negative")
    _, iota = s.stage_maps(i)
    pi2, _ = s2.stage_maps(i)
    src_basis = s.page(i).basis
    tgt_basis = s2.page(i).basis
    tpos = {g: r for r, g in enumerate(tgt_basis)}
    fs, ft = f.source.filtration, f.target.filtration
    cols = {}
    for j, b in enumerate(src_basis):
        image: set[int] = set()
        for x in iota[b]:
            image ^= f.matrix.column(x)
        acc: set[int] = set()
        for y in image:
            acc ^= pi2[y]
        rows = [tpos[t] for t in acc if ft[t] - fs[b] == f.degree]
        if rows:
            cols[j] = rows
    return F2Matrix.from_columns(len(tgt_basis), len(src_basis), cols)


class Collapse(NamedTuple):
    projection: FilteredMap
    inclusion: FilteredMap
    trivial: FilteredComplex
    spectral_sequence: SpectralSequence


def collapse_projection(c: FilteredComplex, i: int, ss: SpectralSequence | None = None) -> Collapse:
    """pi_(i) onto E_i with zero differential, and iota_(i) back, once E_i = E_infinity."""
    if ss is None:
        ss = compute_pages(c, track_maps=True)
    if ss.stabilization_index > i:
        raise PreconditionError(
            f"spectral sequence has not collapsed at page {i} (stabilizes at {ss.stabilization_index})"
        )
    page = ss.page(i)
    basis = page.basis
    trivial = FilteredComplex(
        [c.generators[b] for b in basis],
        [c.filtration[b] for b in basis],
        [() for _ in basis],
        [c.gradings[b] for b in basis],
        check=False,
        name=(c.name + " E" + str(i)) if c.name else "",
    )
    pi, iota = ss.stage_maps(i)
    pos = {g: r for r, g in enumerate(basis)}
    pcols = {x: [pos[t] for t in pi[x]] for x in range(len(c)) if pi[x]}
    proj = FilteredMap(c, trivial, F2Matrix.from_columns(len(basis), len(c), pcols), 0, name="pi")
    icols = {pos[b]: list(iota[b]) for b in basis}
    incl = FilteredMap(trivial, c, F2Matrix.from_columns(len(c), len(basis), icols), 0, name="iota")
    return Collapse(proj, incl, trivial, ss)
