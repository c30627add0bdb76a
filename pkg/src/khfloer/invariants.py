"""Numerical invariants read off the spectral sequences: Kh dimensions, page
dimensions per theory, and the s-invariant from the Bar-Natan deformation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import LinkDiagram
from .errors import IntegrityError, PreconditionError
from .f2core import BasedComplex, F2Matrix, cancellation_survivors, homology_dims
from .specseq import compute_pages
from .theories import TheorySpec, bar_natan_components, build_complex, khovanov, parse_theory, reduced_complex

__all__ = [
    "PageReport",
    "SInvariant",
    "kh_dims",
    "kh_dims_oracle",
    "page_report",
    "s_invariant",
    "s_invariant_oracle",
    "poincare_polynomial",
]


def _based(d: LinkDiagram) -> LinkDiagram:
    # reduced homology over F2 does not depend on the basepoint; default to the smallest edge
    return d if d.basepoint is not None else d.with_basepoint(min(d.edges))


def kh_dims(d: LinkDiagram, reduced: bool = False) -> dict[tuple[int, int], int]:
    """Bigraded dimensions {(h, q): dim} of (reduced) Khovanov homology over F2."""
    c = reduced_complex(_based(d)) if reduced else build_complex(d, khovanov())
    ss = compute_pages(c, track_maps=False)
    return dict(sorted(ss.dims(ss.stabilization_index, ("h", "q")).items()))


def kh_dims_oracle(d: LinkDiagram, reduced: bool = False) -> dict[tuple[int, int], int]:
    """The same dimensions by rank computations, independent of cancellation."""
    c = reduced_complex(_based(d)) if reduced else build_complex(d, khovanov())
    out = {}
    qs = sorted({g["q"] for g in c.gradings})
    for q in qs:
        keep = [i for i, g in enumerate(c.gradings) if g["q"] == q]
        pos = {g: i for i, g in enumerate(keep)}
        cols = {pos[j]: [pos[r] for r in c.out[j]] for j in keep if c.out[j]}
        n = len(keep)
        bc = BasedComplex(keep, F2Matrix.from_columns(n, n, cols), [c.gradings[j] for j in keep])
        for h, dim in homology_dims(bc, "h").items():
            if dim:
                out[(h, q)] = dim
    return dict(sorted(out.items()))


def poincare_polynomial(dims: dict[tuple[int, int], int]) -> str:
    """Terms c*t^h*q^j sorted by (h, q)."""
    terms = []
    for (h, q), n in sorted(dims.items()):
        if not n:
            continue
        parts = [] if n == 1 else [str(n)]
        if h:
            parts.append(f"t^{h}" if h != 1 else "t")
        if q:
            parts.append(f"q^{q}" if q != 1 else "q")
        terms.append("*".join(parts) or "1")
    return " + ".join(terms) if terms else "0"


@dataclass
class PageReport:
    """Dimensions of every page, binned by (filtration, h, q)."""

    theory: str
    pages: list = field(default_factory=list)  # list of {(f, h, q): dim}
    stabilization_index: int = 0

    def total(self, i: int) -> int:
        return sum(self.page(i).values())

    def page(self, i: int) -> dict:
        return self.pages[min(i, self.stabilization_index)]

    def bigraded(self, i: int) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (_, h, q), n in self.page(i).items():
            out[(h, q)] = out.get((h, q), 0) + n
        return dict(sorted(out.items()))

    def from_page(self, i: int) -> list:
        """Pages i, i+1, ..., stabilization (as a comparable list)."""
        return [self.page(j) for j in range(i, max(i, self.stabilization_index) + 1)]

    def to_json(self) -> dict:
        return {
            "theory": self.theory,
            "stabilization_index": self.stabilization_index,
            "pages": [
                {"page": i, "dims": [[f, h, q, n] for (f, h, q), n in sorted(p.items())]}
                for i, p in enumerate(self.pages)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PageReport":
        pages = [{(f, h, q): n for f, h, q, n in p["dims"]} for p in data["pages"]]
        return cls(data["theory"], pages, data["stabilization_index"])


def page_report(d: LinkDiagram, t: TheorySpec | str) -> PageReport:
    if isinstance(t, str):
        t = parse_theory(t)
    c = build_complex(d, t)
    ss = compute_pages(c, track_maps=False)
    pages = [dict(sorted(p.dims(("filtration", "h", "q")).items())) for p in ss.pages]
    return PageReport(t.name, pages, ss.stabilization_index)


@dataclass(frozen=True)
class SInvariant:
    value: int
    witness: tuple[int, int]  # (q_min, q_max) of the two surviving classes

    def to_json(self) -> dict:
        return {"s": self.value, "witness": list(self.witness)}

    @classmethod
    def from_json(cls, data: dict) -> "SInvariant":
        return cls(data["s"], tuple(data["witness"]))


def _s_from(qs: list[int]) -> SInvariant:
    if len(qs) != 2:
        raise IntegrityError(f"Bar-Natan E_infinity has dimension {len(qs)}, expected 2 for a knot")
    lo, hi = sorted(qs)
    if hi - lo != 2:
        raise IntegrityError(f"surviving quantum gradings {lo}, {hi} do not differ by 2")
    return SInvariant((lo + hi) // 2, (lo, hi))


def _bn_complex(d: LinkDiagram):
    if d.n_components != 1:
        raise PreconditionError(f"s is defined here for knots only; diagram has {d.n_components} components")
    return build_complex(d, bar_natan_components())


def s_invariant(d: LinkDiagram) -> SInvariant:
    """Average quantum grading of the two classes surviving the Bar-Natan spectral sequence."""
    c = _bn_complex(d)
    ss = compute_pages(c, track_maps=False)
    return _s_from([c.gradings[g]["q"] for g in ss.e_infinity.basis])


def s_invariant_oracle(d: LinkDiagram) -> SInvariant:
    """Same invariant by brute-force cancellation with order-reversed pivots."""
    c = _bn_complex(d)
    alive = cancellation_survivors(c.differential, c.filtration, reverse=True)
    return _s_from([c.gradings[g]["q"] for g in alive])
