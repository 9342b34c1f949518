import math

import pytest


def rel_err(value: float, reference: float) -> float:
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


@pytest.fixture
def tol():
    return 1e-9
