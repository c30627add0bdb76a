"""Sparse linear algebra over F2 and homology of plain based complexes.

Matrices are stored column-wise: column ``c`` is the frozenset of row indices
holding a 1.  This is the natural layout for differentials, where column ``c``
is the image of generator ``c``.  Dense work (rank, kernels) uses Python ints
as bitsets.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from .errors import IntegrityError, ShapeError

__all__ = [
    "F2Vector",
    "F2Matrix",
    "F2SparseMatrix",
    "BasedComplex",
    "mat_mul",
    "rank",
    "transpose",
    "kernel_basis",
    "homology_dims",
    "filtered_homology_dims",
    "cancellation_survivors",
]


class F2Vector:
    """A vector over F2 given by its support (indices with coefficient 1)."""

    __slots__ = ("support",)

    def __init__(self, support: Iterable[int] = ()):
        acc: set[int] = set()
        for i in support:
            acc ^= {i}
        self.support = frozenset(acc)

    def __add__(self, other: "F2Vector") -> "F2Vector":
        out = F2Vector()
        out.support = self.support ^ other.support
        return out

    __sub__ = __add__

    def __iter__(self):
        return iter(sorted(self.support))

    def __len__(self):
        return len(self.support)

    def __contains__(self, i):
        return i in self.support

    def __bool__(self):
        return bool(self.support)

    def __eq__(self, other):
        return isinstance(other, F2Vector) and self.support == other.support

    def __hash__(self):
        return hash(self.support)

    def __repr__(self):
        return f"F2Vector({sorted(self.support)})"


class F2Matrix:
    """Immutable sparse matrix over F2 of shape ``rows x cols``."""

    __slots__ = ("rows", "cols", "_cols", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable[tuple[int, int]] = ()):
        if rows < 0 or cols < 0:
            raise ShapeError("negative matrix dimension")
        acc: dict[int, set[int]] = defaultdict(set)
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeError(f"entry ({r},{c}) outside {rows}x{cols}")
            acc[c] ^= {r}
        self.rows = rows
        self.cols = cols
        self._cols = {c: frozenset(s) for c, s in acc.items() if s}
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_columns(
        cls, rows: int, cols: int, columns: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]
    ) -> "F2Matrix":
        """Build from ``{col: rows}`` (or a list of row sets); rows listed twice cancel."""
        m = cls.__new__(cls)
        m.rows, m.cols, m._hash = rows, cols, None
        store = {}
        items = columns.items() if isinstance(columns, Mapping) else enumerate(columns)
        for c, rs in items:
            if not 0 <= c < cols:
                raise ShapeError(f"column {c} outside {cols}")
            s: set[int] = set()
            for r in rs:
                s ^= {r}
            if s:
                if min(s) < 0 or max(s) >= rows:
                    raise ShapeError(f"row outside {rows} in column {c}")
                store[c] = frozenset(s)
        m._cols = store
        return m

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls.from_columns(n, n, {i: (i,) for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "F2Matrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, ((i, j) for i, row in enumerate(rows) for j, v in enumerate(row) if v % 2))

    # access --------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> frozenset[tuple[int, int]]:
        return frozenset((r, c) for c, rs in self._cols.items() for r in rs)

    def column(self, c: int) -> frozenset[int]:
        return self._cols.get(c, frozenset())

    def columns(self) -> dict[int, frozenset[int]]:
        return dict(self._cols)

    def nnz(self) -> int:
        return sum(len(s) for s in self._cols.values())

    def is_zero(self) -> bool:
        return not self._cols

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return int(r in self._cols.get(c, ()))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for c, rs in self._cols.items():
            for r in rs:
                out[r][c] = 1
        return out

    def apply(self, v: F2Vector | Iterable[int]) -> F2Vector:
        support = v.support if isinstance(v, F2Vector) else v
        acc: set[int] = set()
        for c in support:
            if not 0 <= c < self.cols:
                raise ShapeError(f"vector index {c} outside {self.cols}")
            acc ^= self._cols.get(c, frozenset())
        out = F2Vector()
        out.support = frozenset(acc)
        return out

    # algebra -------------------------------------------------------------
    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        return mat_mul(self, other)

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        cols = dict(self._cols)
        for c, rs in other._cols.items():
            cols[c] = cols.get(c, frozenset()) ^ rs
        return F2Matrix.from_columns(self.rows, self.cols, cols)

    def transpose(self) -> "F2Matrix":
        return transpose(self)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "F2Matrix":
        """Restrict to the given row and column index lists (re-indexed in order)."""
        rpos = {r: i for i, r in enumerate(rows)}
        out = {}
        for j, c in enumerate(cols):
            rs = [rpos[r] for r in self._cols.get(c, ()) if r in rpos]
            if rs:
                out[j] = rs
        return F2Matrix.from_columns(len(rows), len(cols), out)

    def __eq__(self, other):
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and self._cols == other._cols

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, frozenset(self._cols.items())))
        return self._hash

    def __repr__(self):
        return f"F2Matrix({self.rows}x{self.cols}, nnz={self.nnz()})"


F2SparseMatrix = F2Matrix


def mat_mul(a: F2Matrix, b: F2Matrix) -> F2Matrix:
    """Product ``a @ b``; entry (i,k) is the parity of sum_j a(i,j) b(j,k)."""
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = {}
    acols = a._cols
    for k, js in b._cols.items():
        acc: set[int] = set()
        for j in js:
            col = acols.get(j)
            if col:
                acc ^= col
        if acc:
            out[k] = frozenset(acc)
    m = F2Matrix.__new__(F2Matrix)
    m.rows, m.cols, m._cols, m._hash = a.rows, b.cols, out, None
    return m


def transpose(m: F2Matrix) -> F2Matrix:
    cols: dict[int, list[int]] = defaultdict(list)
    for c, rs in m._cols.items():
        for r in rs:
            cols[r].append(c)
    return F2Matrix.from_columns(m.cols, m.rows, cols)


def _column_bits(m: F2Matrix) -> list[int]:
    bits = []
    for c in sorted(m._cols):
        x = 0
        for r in m._cols[c]:
            x |= 1 << r
        bits.append(x)
    return bits


def rank(m: F2Matrix) -> int:
    """Rank over F2 by elimination on column bitsets."""
    basis: dict[int, int] = {}
    for v in _column_bits(m):
        while v:
            top = v.bit_length() - 1
            piv = basis.get(top)
            if piv is None:
                basis[top] = v
                break
            v ^= piv
    return len(basis)


def kernel_basis(m: F2Matrix) -> list[frozenset[int]]:
    """Basis of {x : m x = 0}, each vector given as a set of column indices."""
    basis: dict[int, tuple[int, int]] = {}
    kernel = []
    for c in range(m.cols):
        v = 0
        for r in m._cols.get(c, ()):
            v |= 1 << r
        combo = 1 << c
        while v:
            top = v.bit_length() - 1
            piv = basis.get(top)
            if piv is None:
                basis[top] = (v, combo)
                break
            v ^= piv[0]
            combo ^= piv[1]
        if not v:
            kernel.append(frozenset(i for i in range(combo.bit_length()) if combo >> i & 1))
    return kernel


class BasedComplex:
    """A chain complex with a distinguished basis.

    ``differential`` is square; column ``j`` is the boundary of generator ``j``.
    ``gradings`` holds one ``{name: value}`` dict per generator.
    """

    def __init__(self, generators: Sequence, differential: F2Matrix, gradings: Sequence[Mapping[str, int]]):
        n = len(generators)
        if differential.shape != (n, n):
            raise ShapeError(f"differential {differential.shape} does not match {n} generators")
        if len(gradings) != n:
            raise ShapeError("one grading dict per generator required")
        if not mat_mul(differential, differential).is_zero():
            raise IntegrityError("differential does not square to zero")
        self.generators = list(generators)
        self.differential = differential
        self.gradings = [dict(g) for g in gradings]

    def __len__(self):
        return len(self.generators)

    def degree(self, i: int, grading: str) -> int:
        return self.gradings[i][grading]


def homology_dims(c: BasedComplex, grading: str) -> dict[int, int]:
    """Dimension of homology in every degree of ``grading`` that carries generators.

    The differential must raise ``grading`` by exactly one.
    """
    deg = [g[grading] for g in c.gradings]
    by_deg: dict[int, list[int]] = defaultdict(list)
    for i, d in enumerate(deg):
        by_deg[d].append(i)
    for j, rs in c.differential._cols.items():
        for r in rs:
            if deg[r] != deg[j] + 1:
                raise IntegrityError(f"differential is not homogeneous of degree +1 in {grading!r}")
    ranks = {}
    for d, idx in by_deg.items():
        tgt = by_deg.get(d + 1, [])
        ranks[d] = rank(c.differential.submatrix(tgt, idx)) if tgt else 0
    return {d: len(idx) - ranks[d] - ranks.get(d - 1, 0) for d, idx in sorted(by_deg.items())}


def filtered_homology_dims(
    differential: F2Matrix, filtration: Sequence[int], grading: Sequence[int]
) -> dict[tuple[int, int], int]:
    """Associated graded dimensions of homology, computed from ranks alone.

    With ``F_p`` spanned by generators of filtration >= p (a subcomplex when
    the differential never lowers the filtration), the result at (p, g) is
    ``dim im(H_g(F_p) -> H_g(C)) - dim im(H_g(F_{p+1}) -> H_g(C))``.  This is
    the E-infinity page, obtained without any cancellation.
    """
    n = differential.rows
    by_deg: dict[int, list[int]] = defaultdict(list)
    for i in range(n):
        by_deg[grading[i]].append(i)
    out: dict[tuple[int, int], int] = {}
    for g, idx in sorted(by_deg.items()):
        src_prev = by_deg.get(g - 1, [])
        boundaries = []
        for j in src_prev:
            v = 0
            for r in differential.column(j):
                v |= 1 << r
            if v:
                boundaries.append(v)
        rank_b = _bits_rank(boundaries)
        levels = sorted({filtration[i] for i in idx})
        prev_im = 0
        dims = {}
        for p in reversed(levels):
            sub = [i for i in idx if filtration[i] >= p]
            tgt = by_deg.get(g + 1, [])
            block = differential.submatrix(tgt, sub)
            ker = kernel_basis(block)
            cycles = []
            for vec in ker:
                v = 0
                for k in vec:
                    v |= 1 << sub[k]
                cycles.append(v)
            im = _bits_rank(boundaries + cycles) - rank_b
            dims[p] = im - prev_im
            prev_im = im
        for p, v in dims.items():
            if v:
                out[(p, g)] = v
    return out


def _bits_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            piv = basis.get(top)
            if piv is None:
                basis[top] = v
                break
            v ^= piv
    return len(basis)


def cancellation_survivors(
    differential: F2Matrix, filtration: Sequence[int], reverse: bool = True
) -> list[int]:
    """Brute-force full cancellation of a filtered complex.

    Repeatedly picks, among all nonzero coefficients of minimal filtration
    shift, the pivot with the largest (row, col) pair (or smallest when
    ``reverse`` is False), and cancels it.  Returns the surviving generator
    indices, whose filtration values give the E-infinity page.  Written
    independently of the staged engine so it can serve as an oracle.
    """
    n = differential.cols
    out = {j: set(differential.column(j)) for j in range(n)}
    alive = set(range(n))
    while True:
        best_shift = None
        cands = []
        for j in alive:
            for r in out[j]:
                s = filtration[r] - filtration[j]
                if best_shift is None or s < best_shift:
                    best_shift, cands = s, [(r, j)]
                elif s == best_shift:
                    cands.append((r, j))
        if not cands:
            break
        l, k = max(cands) if reverse else min(cands)
        dk = out[k]
        for i in alive:
            if i != k and l in out[i]:
                out[i] ^= dk
        alive.discard(k)
        alive.discard(l)
        for i in alive:
            out[i].discard(k)
            out[i].discard(l)
    return sorted(alive)
