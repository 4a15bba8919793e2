import pytest

from lplab import build_resolution, make_grid
from lplab.verifier import CorpusSpec, generate_corpus


@pytest.fixture(scope="session")
def grid_1d():
    return make_grid(1, 4096, 40.0)


@pytest.fixture(scope="session")
def res_1d(grid_1d):
    return build_resolution(grid_1d)


@pytest.fixture(scope="session")
def grid_2d():
    return make_grid(2, 128, 10.0)


@pytest.fixture(scope="session")
def corpus_small(grid_1d):
    return generate_corpus(CorpusSpec(seed=7, count=16, band_limit=16.0), grid_1d)
