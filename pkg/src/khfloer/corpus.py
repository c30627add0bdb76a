"""The shipped diagram corpus.

Each ``*.pd`` file holds one diagram (any syntax accepted by
:func:`parse_diagram`) after a block of ``# key: value`` header lines.
Recognized keys: name, type (the link type, shared by Reidemeister
equivalent diagrams), components, unlink (yes/no).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .diagram import LinkDiagram, parse_diagram
from .errors import IntegrityError, ParseError

CORPUS_DIR = Path(__file__).with_name("corpus")

__all__ = ["CORPUS_DIR", "CorpusEntry", "load_corpus", "read_entry"]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    type: str
    diagram: LinkDiagram
    components: int
    unlink: bool
    path: str = ""

    @property
    def n_crossings(self) -> int:
        return self.diagram.n_crossings


def read_entry(path: str | Path) -> CorpusEntry:
    path = Path(path)
    meta: dict[str, str] = {}
    body = []
    for line in path.read_text().splitlines():
        s = line.strip()
        if s.startswith("#"):
            key, sep, val = s[1:].partition(":")
            if sep and key.strip() in ("name", "type", "components", "unlink"):
                meta[key.strip()] = val.strip()
        elif s:
            body.append(s)
    if not body:
        raise ParseError(f"{path}: no diagram")
    d = parse_diagram(" ".join(body))
    comps = int(meta.get("components", d.n_components))
    if comps != d.n_components:
        raise IntegrityError(f"{path}: header says {comps} components, diagram has {d.n_components}")
    return CorpusEntry(
        name=meta.get("name", path.stem),
        type=meta.get("type", path.stem),
        diagram=d,
        components=comps,
        unlink=meta.get("unlink", "no").lower() in ("yes", "true", "1"),
        path=str(path),
    )


def load_corpus(directory: str | Path | None = None, max_crossings: int | None = None) -> list[CorpusEntry]:
    """All entries of a corpus directory (the shipped one by default), sorted by crossing count then name."""
    directory = CORPUS_DIR if directory is None else Path(directory)
    if not directory.is_dir():
        raise ParseError(f"corpus directory {directory} does not exist")
    out = [read_entry(p) for p in sorted(directory.glob("*.pd"))]
    if max_crossings is not None:
        out = [e for e in out if e.n_crossings <= max_crossings]
    return sorted(out, key=lambda e: (e.n_crossings, e.name))
