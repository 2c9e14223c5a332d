import pytest

from liebialg import corpus as corpus_mod
from liebialg.harness import Workbench


@pytest.fixture(scope="session")
def reg():
    return corpus_mod.load()


@pytest.fixture(scope="session")
def bench(reg):
    return Workbench(reg)
