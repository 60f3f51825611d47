import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from fair_sor_api.metric import instance_from_coords  # noqa: E402


@pytest.fixture
def colocated_pairs():
    """r1=b1 at (0,0) and r2=b2 at (10,0)."""
    return instance_from_coords([(0, 0), (0, 0), (10, 0), (10, 0)], [1, 2, 1, 2])


@pytest.fixture
def line_instance():
    """r1@0, b1@1, r2@10, b2@11."""
    return instance_from_coords([(0, 0), (1, 0), (10, 0), (11, 0)], [1, 2, 1, 2])


@pytest.fixture
def colocated_triples():
    """One point of each of 3 groups at (0,0) and again at (20,0)."""
    return instance_from_coords([(0, 0), (0, 0), (0, 0), (20, 0), (20, 0), (20, 0)], [1, 2, 3, 1, 2, 3])
