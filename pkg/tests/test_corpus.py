import pytest

from khfloer.corpus import CORPUS_DIR, load_corpus, read_entry
from khfloer.errors import IntegrityError, ParseError


def test_shipped_corpus(corpus):
    names = {e.name for e in corpus}
    for required in ("unknot-0", "unlink2-0", "trefoil+", "trefoil-", "figure8", "hopf+", "hopf-", "t25"):
        assert required in names
    assert max(e.n_crossings for e in corpus) == 8
    assert {1, 2, 3} <= {e.n_crossings for e in corpus if e.type == "unknot"}
    assert any(e.unlink and e.components > 1 and e.n_crossings == 3 for e in corpus)
    for e in corpus:
        assert e.components == e.diagram.n_components
        if e.unlink:
            assert e.type.startswith("unknot") or e.type.startswith("unlink")


def test_every_type_has_a_stabilized_variant(corpus):
    counts = {}
    for e in corpus:
        counts[e.type] = counts.get(e.type, 0) + 1
    assert all(n >= 2 for n in counts.values()), counts


def test_bad_entries(tmp_path):
    p = tmp_path / "x.pd"
    p.write_text("# name: x\n# components: 2\nPD[X[1,1,2,2]]\n")
    with pytest.raises(IntegrityError):
        read_entry(p)
    p.write_text("# name: empty\n")
    with pytest.raises(ParseError):
        read_entry(p)
    with pytest.raises(ParseError):
        load_corpus(tmp_path / "missing")


def test_movie_files_exist():
    assert (CORPUS_DIR / "movies" / "birth-merge.mov").is_file()
