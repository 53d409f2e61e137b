import pytest

from pair_fixtures import make_combined_pair


@pytest.fixture
def combined_pair():
    return make_combined_pair()
