import pytest

from schrodinger_maximal.datum import make_datum


@pytest.fixture(scope="session")
def d64():
    return make_datum(2, 64.0)


@pytest.fixture(scope="session")
def d256():
    return make_datum(2, 256.0)


@pytest.fixture(scope="session")
def d4096():
    return make_datum(2, 4096.0)


@pytest.fixture(scope="session")
def d3():
    return make_datum(3, 1024.0)


@pytest.fixture(scope="session")
def n2_sweep(tmp_path_factory):
    """The full n=2 acceptance sweep, run once per session."""
    from schrodinger_maximal.acceptance import default_sweep_config
    from schrodinger_maximal.experiment import run_sweep

    out = tmp_path_factory.mktemp("sweep_n2")
    return run_sweep(default_sweep_config(), threads=0, out_dir=out)
