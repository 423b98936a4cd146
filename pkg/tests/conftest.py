import pytest

from lfpl.deep import run_deep
from lfpl.syntax import parse_program
from lfpl.corpus import CORPUS_DIR


@pytest.hookimpl(tryfirst=True)
def pytest_pyfunc_call(pyfuncitem):
    # deep recursion in the checker and both evaluators needs a big stack
    fn = pyfuncitem.obj
    names = pyfuncitem._fixtureinfo.argnames
    kwargs = {n: pyfuncitem.funcargs[n] for n in names}
    run_deep(fn, **kwargs)
    return True


def load(name):
    return parse_program((CORPUS_DIR / name).read_text())


@pytest.fixture(scope="session")
def reverse_prog():
    return load("reverse.lfpl")
