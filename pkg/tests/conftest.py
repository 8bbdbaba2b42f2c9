import random

import pytest

from fltrees.forest import LabeledForest


def F(*parents):
    return LabeledForest(tuple(parents))


@pytest.fixture
def rng():
    return random.Random(20240607)
