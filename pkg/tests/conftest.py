import pytest

from systemfr.driver import check_corpus_libraries, prelude, stdlib_library


@pytest.fixture(scope="session")
def stdlib_lib():
    return stdlib_library()


@pytest.fixture(scope="session")
def corpus_libraries():
    return check_corpus_libraries()


@pytest.fixture(scope="session")
def corpus_results(corpus_libraries):
    return {name: rs for name, (rs, _) in corpus_libraries.items()}


@pytest.fixture(scope="session")
def prelude_lib():
    return prelude()[1]
