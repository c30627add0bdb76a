import pytest

from khfloer.cobordism import (
    ElementaryMove,
    Movie,
    elementary_map,
    extend_to_chain_map,
    handle0_map,
    handle1_check,
    handle1_map,
    handle2_map,
    movie_map,
    movie_page_maps,
    parse_movie,
)
from khfloer.corpus import CORPUS_DIR
from khfloer.diagram import LinkDiagram, parse_diagram
from khfloer.errors import ParseError, SiteError
from khfloer.f2core import F2Matrix, rank
from khfloer.moves import r3
from khfloer.specseq import FilteredComplex

THEORIES = ["kh", "bar-natan", "dotted", "ladybug", "d_a:111"]
TREFOIL = parse_diagram("braid(2): s1 s1 s1")


def ident(m):
    return m.shape[0] == m.shape[1] and m == F2Matrix.identity(m.shape[0])


def test_movie_text_round_trip():
    text = (CORPUS_DIR / "movies" / "r2-cancel.mov").read_text()
    m = parse_movie(text)
    assert parse_movie(str(m)).moves == m.moves
    assert m.end == m.start


@pytest.mark.parametrize(
    "text",
    ["h0", "start U[1]\nwiggle", "start U[1]\nr1 1 x", "start U[1]\nr2 1 o", "start U[1]\nh1 1"],
)
def test_movie_parse_errors(text):
    with pytest.raises(ParseError):
        parse_movie(text)


def test_movie_with_bad_site():
    with pytest.raises(SiteError):
        parse_movie("start U[1]\nh2 5")


@pytest.mark.parametrize("t", THEORIES)
def test_one_handle_axiom(t):
    assert handle1_check(TREFOIL, t) is None


@pytest.mark.parametrize("t", THEORIES)
def test_birth_then_merge_is_identity(t):
    m = parse_movie((CORPUS_DIR / "movies" / "birth-merge.mov").read_text())
    maps = movie_page_maps(m, t, [2])
    assert ident(maps[2])


@pytest.mark.parametrize("t", ["kh", "bar-natan"])
def test_sphere_is_zero(t):
    f0, d1 = handle0_map(TREFOIL, t)
    f2, d2 = handle2_map(d1, d1.loops[0], t)
    assert d2 == TREFOIL
    assert (f2.matrix @ f0.matrix).is_zero()


def test_saddle_maps_change_euler_characteristic():
    f, d2 = handle1_map(LinkDiagram([], [1, 2]), 1, 2, "kh")
    # merge of two unknots: 1(x)1 -> 1, so rank 3 of 4 is impossible; rank is 2
    assert d2.n_components == 1
    assert rank(f.matrix) == 2
    assert f.degree == 0


@pytest.mark.parametrize("t", THEORIES)
def test_r1_gives_isomorphisms(t):
    for sign in (1, -1):
        maps = movie_page_maps(Movie(TREFOIL, [ElementaryMove("r1", (2, sign))]), t)
        for m in maps.values():
            assert m.shape[0] == m.shape[1] == rank(m)


@pytest.mark.parametrize("t", THEORIES)
def test_r2_and_inverse_is_identity(t):
    m = parse_movie((CORPUS_DIR / "movies" / "r2-cancel.mov").read_text())
    maps = movie_page_maps(m, t, [2])
    assert ident(maps[2])


def test_interchanging_distant_moves():
    a = [ElementaryMove("r1", (1, 1)), ElementaryMove("r1", (4, -1))]
    m1, m2 = Movie(TREFOIL, a), Movie(TREFOIL, a[::-1])
    assert m1.end != m2.end
    for t in ("kh", "bar-natan"):
        p1 = movie_page_maps(m1, t)
        p2 = movie_page_maps(m2, t, end=m1.end)
        assert p1.keys() == p2.keys() and all(p1[i] == p2[i] for i in p1)


def test_empty_movie_is_identity():
    f = movie_map(Movie(TREFOIL, []), "kh")
    assert ident(f.matrix)


def test_elementary_iso():
    f, d2 = elementary_map(TREFOIL, ElementaryMove("iso", ((1, 100),)), "kh")
    assert 100 in d2.edges
    cols = f.matrix.columns()
    assert rank(f.matrix) == len(f.source) == len(f.target)
    assert all(len(v) == 1 for v in cols.values())


def test_extend_to_chain_map():
    # f0(x) = y is not a chain map since d(y) = z; adding the deeper term u fixes it
    # q-filtered (filtration = q), so the correction must preserve h
    src = FilteredComplex(["x"], [0], [set()], [{"h": 5, "q": 0}])
    tgt = FilteredComplex(
        ["y", "u", "z"], [0, 1, 2], [{2}, {2}, set()], [{"h": 5, "q": 0}, {"h": 5, "q": 1}, {"h": 6, "q": 2}]
    )
    f = extend_to_chain_map(src, tgt, F2Matrix.from_columns(3, 1, {0: [0]}))
    assert f is not None and f.is_chain_map()
    assert f.matrix.column(0) == frozenset({0, 1})
    # no correction of positive shift can fix a map that misses d on the nose
    c = FilteredComplex(["a", "b"], [0, 1], [{1}, set()], [{"h": 0, "q": 0}, {"h": 1, "q": 0}])
    assert extend_to_chain_map(c, c, F2Matrix.from_columns(2, 2, {0: [0]})) is None


def test_r3_map_is_invertible_on_e2():
    d = parse_diagram("braid(3): s1 s2 s1")
    face = next(f for f in d.faces() if len(f) == 3)
    site = tuple(d.crossings[c][s] for c, s, _ in face)
    m = Movie(d, [ElementaryMove("r3", site), ElementaryMove("r3", site)])
    assert m.end == d
    maps = movie_page_maps(m, "kh", [2])
    assert ident(maps[2])
