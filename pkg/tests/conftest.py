import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def precision_128():
    """All tests run at 128-bit binary precision unless they override it."""
    saved = mp.mp.prec
    mp.mp.prec = 128
    yield
    mp.mp.prec = saved
