import functools

import pytest

from ergosess import corpus
from ergosess import syntax as sx
from ergosess.recon import reconstruct

PROGRAMS = [n for n, e in corpus.ENTRIES.items() if n not in ("equality", "indexed")]
ALL_FILES = list(corpus.ENTRIES)


@functools.lru_cache(maxsize=None)
def signature(name: str) -> sx.Signature:
    return corpus.entry(name).signature()


@functools.lru_cache(maxsize=None)
def explicit(name: str) -> sx.Signature:
    return reconstruct(signature(name), corpus.entry(name).cost)


@functools.lru_cache(maxsize=None)
def elaborated(name: str) -> sx.Signature:
    return sx.elaborate_internal_names(signature(name))


@pytest.fixture(params=PROGRAMS)
def program(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
