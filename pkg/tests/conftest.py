import pytest

from nsf import library
from nsf.sst import simplify, translate


@pytest.fixture(scope="session")
def corpus():
    return library.load_all()


def interpret(formula):
    """translate + simplify, returning the final normal form."""
    nf, _ = translate(formula)
    nf, _ = simplify(nf)
    return nf
