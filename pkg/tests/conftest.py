import os

import pytest

from hornfly.checker import CheckerConfig
from hornfly.engine import Workspace
from hornfly.frontend import normalize, parse_module
from hornfly.server.session import load_libdb

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")

# modules that other corpus programs import rather than stand alone
LIB_FILES = {"someprops.pl", "multimod_util.pl"}


def corpus_files() -> list[str]:
    return sorted(f for f in os.listdir(CORPUS) if f.endswith(".pl"))


def corpus_roots() -> list[str]:
    return [f for f in corpus_files() if f not in LIB_FILES]


def read_corpus(name: str) -> str:
    with open(os.path.join(CORPUS, name), encoding="utf-8") as f:
        return f.read()


def load_module(name: str):
    src = parse_module(read_corpus(name), os.path.join(CORPUS, name))
    hard = [d for d in src.parse_errors if d.severity == "error"]
    assert not hard, f"{name}: {[d.message for d in hard]}"
    return normalize(src)


def build_workspace(root_file: str, with_lib: bool = True) -> Workspace:
    """Workspace for one corpus root, resolving corpus-local imports."""
    root = load_module(root_file)
    modules = {root.name: root}
    queue = [root]
    while queue:
        m = queue.pop()
        for imp, _r in m.imports:
            if imp in modules:
                continue
            path = f"{imp}.pl"
            if os.path.exists(os.path.join(CORPUS, path)):
                mod = load_module(path)
                modules[mod.name] = mod
                queue.append(mod)
    libs = load_libdb() if with_lib else {}
    return Workspace(modules, lib_modules=libs, root=root.name)


@pytest.fixture(scope="session")
def libdb():
    return load_libdb()


@pytest.fixture(scope="session")
def nrev_ws():
    return build_workspace("nrev.pl")


@pytest.fixture(scope="session")
def prop_table():
    """A rich registry: corpus props plus the builtin library types."""
    return build_workspace("nrev.pl").prop_table


@pytest.fixture
def default_config():
    return CheckerConfig()
