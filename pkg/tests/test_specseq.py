import random

import pytest
from hypothesis import given, settings, strategies as st

from khfloer.errors import IntegrityError, InvalidPivotError, PreconditionError
from khfloer.f2core import F2Matrix, cancellation_survivors, filtered_homology_dims
from khfloer.specseq import (
    FilteredComplex,
    FilteredMap,
    cancel,
    collapse_projection,
    compute_pages,
    identity_map,
    induced_page_map,
)
from randcx import page_homology, random_filtered_complex

seeds = st.integers(0, 10**9)


def e_inf_oracle(c):
    dims = filtered_homology_dims(c.differential, c.filtration, [g["h"] for g in c.gradings])
    return {(f, h): n for (f, h), n in dims.items() if n}


def test_two_step_example():
    # a -> b (shift 1), b unused, c -> d (shift 0)
    c = FilteredComplex(["a", "b", "c", "d"], [0, 1, 0, 0], [{1}, set(), {3}, set()],
                        [{"h": 0}, {"h": 1}, {"h": 0}, {"h": 1}])
    ss = compute_pages(c)
    assert ss.total_dims() == [4, 2, 0]
    assert ss.stabilization_index == 2
    assert len(ss.page(7)) == 0


def test_invalid_pivot():
    c = FilteredComplex(["a", "b"], [0, 0], [set(), set()])
    with pytest.raises(InvalidPivotError):
        cancel(c, (0, 1))


def test_filtration_lowering_rejected():
    with pytest.raises(IntegrityError):
        FilteredComplex(["a", "b"], [1, 0], [{1}, set()])


def test_cancel_gives_homotopy_equivalence():
    rng = random.Random(3)
    for _ in range(30):
        c = random_filtered_complex(rng, max_gens=12)
        pairs = [(k, l) for k in range(len(c)) for l in c.out[k]]
        if not pairs:
            continue
        step = cancel(c, rng.choice(pairs))
        n = len(c)
        d, d2 = c.differential, step.complex.differential
        assert step.pi @ d == d2 @ step.pi
        assert d @ step.iota == step.iota @ d2
        assert step.pi @ step.iota == F2Matrix.identity(len(step.kept))
        # iota pi = id + d h + h d
        assert step.iota @ step.pi == F2Matrix.identity(n) + d @ step.h + step.h @ d


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_each_page_is_homology_of_the_previous(seed):
    c = random_filtered_complex(random.Random(seed), max_gens=24)
    ss = compute_pages(c, track_maps=False)
    for i in range(ss.stabilization_index + 1):
        nxt = {k: v for k, v in ss.page(i + 1).dims(("filtration", "h")).items() if v}
        assert page_homology(ss.page(i), i) == nxt


@settings(max_examples=80, deadline=None)
@given(seeds, st.booleans())
def test_e_infinity_matches_rank_oracle(seed, reverse):
    c = random_filtered_complex(random.Random(seed), max_gens=24)
    ss = compute_pages(c, track_maps=False, reverse=reverse)
    assert ss.e_infinity.dims(("filtration", "h")) == e_inf_oracle(c)
    alive = cancellation_survivors(c.differential, c.filtration, reverse=reverse)
    assert sorted(c.filtration[a] for a in alive) == sorted(c.filtration[b] for b in ss.e_infinity.basis)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_stage_maps(seed):
    c = random_filtered_complex(random.Random(seed), max_gens=20)
    ss = compute_pages(c)
    for i in range(ss.stabilization_index + 1):
        # E_i of the identity is the identity
        m = induced_page_map(identity_map(c), ss, ss, i)
        assert m == F2Matrix.identity(len(ss.page(i)))


def test_collapse_projection():
    c = random_filtered_complex(random.Random(11), max_gens=16)
    ss = compute_pages(c)
    col = collapse_projection(c, ss.stabilization_index, ss)
    assert (col.projection.matrix @ col.inclusion.matrix) == F2Matrix.identity(len(col.trivial))
    if ss.stabilization_index > 0:
        with pytest.raises(PreconditionError):
            collapse_projection(c, ss.stabilization_index - 1, ss)


def test_map_degree_enforced():
    c = FilteredComplex(["a"], [0], [set()])
    c2 = FilteredComplex(["b"], [-1], [set()])
    with pytest.raises(IntegrityError):
        FilteredMap(c, c2, F2Matrix.identity(1), 0)
    assert FilteredMap(c, c2, F2Matrix.identity(1), -1).components.keys() == {-1}
