import pytest
from hypothesis import given, settings, strategies as st

from khfloer.diagram import mirror, parse_braid, parse_diagram
from khfloer.errors import PreconditionError
from khfloer.invariants import (
    PageReport,
    SInvariant,
    kh_dims,
    kh_dims_oracle,
    page_report,
    poincare_polynomial,
    s_invariant,
    s_invariant_oracle,
)

braids = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.integers(1, n - 1).flatmap(lambda i: st.sampled_from([i, -i])), min_size=0, max_size=5).map(
        lambda w: parse_braid(w, strands=n)
    )
)

# frozen from the rank oracle (kh_dims_oracle), which shares no code with cancellation
FROZEN = {
    "braid(2): s1 s1 s1": "q + q^3 + t^2*q^5 + t^2*q^7 + t^3*q^7 + t^3*q^9",
    "braid(2): -s1 -s1 -s1": "t^-3*q^-9 + t^-3*q^-7 + t^-2*q^-7 + t^-2*q^-5 + q^-3 + q^-1",
    "braid(3): s1 -s2 s1 -s2": (
        "t^-2*q^-5 + t^-2*q^-3 + t^-1*q^-3 + t^-1*q^-1 + q^-1 + q + t*q + t*q^3 + t^2*q^3 + t^2*q^5"
    ),
    "braid(2): s1 s1 s1 s1 s1": (
        "q^3 + q^5 + t^2*q^7 + t^2*q^9 + t^3*q^9 + t^3*q^11 + t^4*q^11 + t^4*q^13 + t^5*q^13 + t^5*q^15"
    ),
    "U[1]": "q^-1 + q",
}


@pytest.mark.parametrize("text", sorted(FROZEN))
def test_frozen_khovanov_polynomials(text):
    d = parse_diagram(text)
    assert poincare_polynomial(kh_dims_oracle(d)) == FROZEN[text]
    assert poincare_polynomial(kh_dims(d)) == FROZEN[text]


@settings(max_examples=30, deadline=None)
@given(braids, st.booleans())
def test_kh_matches_rank_oracle(d, reduced):
    assert kh_dims(d, reduced) == kh_dims_oracle(d, reduced)


@settings(max_examples=30, deadline=None)
@given(braids)
def test_mirror_duality(d):
    kh, km = kh_dims(d), kh_dims(mirror(d))
    assert km == {(-h, -q): n for (h, q), n in kh.items()}


def test_reduced_values():
    assert kh_dims(parse_diagram("U[1] base=1"), reduced=True) == {(0, 0): 1}
    assert kh_dims(parse_diagram("braid(2): s1 s1 s1"), reduced=True) == {(0, 2): 1, (2, 6): 1, (3, 8): 1}


@pytest.mark.parametrize(
    "text,value",
    [
        ("U[1]", 0),
        ("braid(2): s1 s1 s1", 2),
        ("braid(2): -s1 -s1 -s1", -2),
        ("braid(2): s1 s1 s1 s1 s1", 4),
        ("braid(3): s1 -s2 s1 -s2", 0),
    ],
)
def test_s_invariant(text, value):
    d = parse_diagram(text)
    oracle = s_invariant_oracle(d)
    assert oracle.value == value
    assert s_invariant(d) == oracle


def test_s_requires_a_knot():
    with pytest.raises(PreconditionError):
        s_invariant(parse_diagram("braid(2): s1 s1"))


def test_s_invariant_is_constant_on_link_types(corpus):
    seen = {}
    for e in corpus:
        if e.components == 1:
            seen.setdefault(e.type, set()).add(s_invariant(e.diagram).value)
    assert all(len(v) == 1 for v in seen.values()), seen


def test_json_round_trips():
    d = parse_diagram("braid(2): s1 s1 s1")
    for t in ("kh", "bar-natan", "ladybug", "d_a:111"):
        r = page_report(d, t)
        assert PageReport.from_json(r.to_json()) == r
    s = s_invariant(d)
    assert SInvariant.from_json(s.to_json()) == s


def test_poincare_format():
    assert poincare_polynomial({}) == "0"
    assert poincare_polynomial({(0, 0): 1, (1, 1): 2, (-1, 3): 1}) == "t^-1*q^3 + 1 + 2*t*q"
