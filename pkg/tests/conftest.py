import pytest

from qbxlocal import set_backend


@pytest.fixture(params=["numba", "numpy"])
def each_backend(request):
    """Run the test once per kernel backend."""
    old = set_backend(request.param)
    yield request.param
    set_backend(old)
