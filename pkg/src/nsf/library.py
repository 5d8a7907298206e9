"""Access to the formula corpus shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .formula import Formula
from .syntax import parse_corpus

CORPUS_FILES = (
    "uwkl.nsf",
    "uwkl_plus.nsf",
    "mu.nsf",
    "pi01_trans.nsf",
    "ufan.nsf",
    "udro.nsf",
    "kral.nsf",
    "kral2.nsf",
    "her_uwkl.nsf",
)


def corpus_dir() -> Path:
    return Path(str(resources.files("nsf") / "corpus"))


def resolve(name_or_path: str) -> Path:
    """A real path as-is; otherwise a shipped corpus file by (stem) name."""
    p = Path(name_or_path)
    if p.exists():
        return p
    for candidate in (name_or_path, f"{name_or_path}.nsf"):
        q = corpus_dir() / candidate
        if q.exists():
            return q
    raise FileNotFoundError(name_or_path)


def load_file(name_or_path: str) -> dict[str, Formula]:
    p = resolve(name_or_path)
    return parse_corpus(p.read_text(), str(p))


def load_all() -> dict[str, Formula]:
    out: dict[str, Formula] = {}
    for fname in CORPUS_FILES:
        out.update(load_file(fname))
    return out
