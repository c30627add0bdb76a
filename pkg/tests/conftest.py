import random

import pytest

from khfloer.corpus import load_corpus


def random_d_a_theories(n=8, seed=20240):
    """n coefficient strings a1 a2 ... a8 with a1 = 1."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        s = "1" + "".join(rng.choice("01") for _ in range(7))
        if s not in out:
            out.append(s)
    return [f"d_a:{s}" for s in out]


DEFORMATIONS = ["bar-natan", "dotted", "ladybug", "d_a:111"] + random_d_a_theories(2, seed=7)
ALL_THEORIES = ["kh", "bar-natan", "ladybug"] + random_d_a_theories()


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(max_crossings=8)


@pytest.fixture(scope="session")
def by_name(corpus):
    return {e.name: e for e in corpus}


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
