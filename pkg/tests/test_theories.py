import itertools

import pytest
from hypothesis import given, settings, strategies as st

from khfloer.diagram import LinkDiagram, parse_braid, parse_diagram
from khfloer.errors import ParseError, PreconditionError
from khfloer.invariants import kh_dims
from khfloer.specseq import compute_pages
from khfloer.theories import (
    basepoint_map,
    build_complex,
    cube_data,
    d_a_components,
    khovanov,
    ladybug_configurations,
    parse_theory,
    path_mismatches,
    reduced_complex,
    registered_theories,
    verify_kf_axioms,
)

braids = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.integers(1, n - 1).flatmap(lambda i: st.sampled_from([i, -i])), min_size=0, max_size=5).map(
        lambda w: parse_braid(w, strands=n)
    )
)

THEORIES = ["kh", "bar-natan", "dotted", "ladybug", "d_a:111", "d_a:1011"]


def shift_set(c):
    out = set()
    for j, o in enumerate(c.out):
        for r in o:
            out.add((c.gradings[r]["h"] - c.gradings[j]["h"], c.gradings[r]["q"] - c.gradings[j]["q"]))
    return out


@settings(max_examples=25, deadline=None)
@given(braids)
def test_d_squared_and_component_degrees(d):
    allowed = {
        "kh": {(1, 0)},
        "bar-natan": {(1, 0), (1, 2)},
        "dotted": {(1, 0), (1, -2)},
        "ladybug": {(1, 0), (2, 0)},
        "d_a:111": {(1, 0), (2, 0), (3, 0)},
        "d_a:1011": {(1, 0), (3, 0), (4, 0)},
    }
    for t in THEORIES:
        c = build_complex(d, t)  # verifies d^2 = 0 and declared shifts
        assert c.d_squared_zero()
        assert shift_set(c) <= allowed[t]


@settings(max_examples=25, deadline=None)
@given(braids)
def test_e2_is_khovanov_homology(d):
    kh = kh_dims(d)
    for t in THEORIES[1:]:
        ss = compute_pages(build_complex(d, t), track_maps=False)
        assert {k: v for k, v in ss.dims(2, ("h", "q")).items() if v} == kh


@settings(max_examples=25, deadline=None)
@given(braids)
def test_bar_natan_e_infinity_dimension(d):
    ss = compute_pages(build_complex(d, "bar-natan"), track_maps=False)
    assert len(ss.e_infinity) == 2 ** d.n_components


@settings(max_examples=25, deadline=None)
@given(braids)
def test_square_faces_commute(d):
    assert path_mismatches(d) == []


@settings(max_examples=20, deadline=None)
@given(braids)
def test_ladybugs_are_vanishing_faces(d):
    # oracle: a two-step face whose Khovanov composite vanishes over F2 with
    # equal circle counts at its ends is exactly a torus-shaped cobordism
    cd = cube_data(d)
    expect = set()
    for v in range(1 << cd.n):
        free = [j for j in range(cd.n) if not v & cd.bit(j)]
        for j1, j2 in itertools.combinations(free, 2):
            w = v | cd.bit(j1) | cd.bit(j2)
            if cd.nc[v] == cd.nc[w] and not any(cd.composite(v, w)):
                expect.add((cd.bits(v), cd.bits(w)))
    assert set(ladybug_configurations(d)) == expect


def test_one_crossing_has_no_ladybugs():
    assert ladybug_configurations(parse_diagram("PD[X[1,1,2,2]]")) == []
    kh = build_complex(parse_diagram("PD[X[1,1,2,2]]"), "kh")
    lb = build_complex(parse_diagram("PD[X[1,1,2,2]]"), "ladybug")
    assert kh.out == lb.out


def test_two_crossing_ladybug():
    d = parse_diagram("braid(2): s1 -s1")
    assert ladybug_configurations(d) == [((0, 0), (1, 1))]


def test_d_a_with_a1_only_is_khovanov():
    d = parse_diagram("braid(3): s1 -s2 s1 -s2")
    assert build_complex(d, d_a_components((1, 0, 0))).out == build_complex(d, khovanov()).out


def test_theory_parsing():
    assert parse_theory("bn").name == "bar-natan"
    assert parse_theory("d_a:111").params == (1, 1, 1)
    assert "ladybug" in registered_theories()
    for bad in ("nope", "d_a:011", "d_a:", "d_a:12"):
        with pytest.raises(ParseError):
            parse_theory(bad)
    with pytest.raises(PreconditionError):
        d_a_components((0, 1))


def test_reduced():
    d = parse_diagram("braid(2): s1 s1 s1").with_basepoint(1)
    c = reduced_complex(d)
    assert len(compute_pages(c, track_maps=False).e_infinity) == 3
    full = build_complex(d, "kh")
    phi = basepoint_map(d, full)
    assert phi @ full.differential == full.differential @ phi
    with pytest.raises(PreconditionError):
        reduced_complex(d.with_basepoint(None))
    with pytest.raises(PreconditionError):
        reduced_complex(d, "bar-natan")


def test_axioms_on_small_diagrams():
    diagrams = [LinkDiagram([], [1, 2]), parse_diagram("braid(2): s1 -s1"), parse_diagram("PD[X[1,1,2,2]]")]

    class Item:
        def __init__(self, d, unlink):
            self.diagram, self.unlink, self.name = d, unlink, d.to_pd()

    items = [Item(d, True) for d in diagrams] + [Item(parse_diagram("braid(2): s1 s1 s1"), False)]
    for t in ("bar-natan", "ladybug", "d_a:111"):
        report = verify_kf_axioms(t, items)
        assert all(a["passed"] for a in report["axioms"].values()), report
