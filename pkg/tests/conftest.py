import numpy as np
import pytest

from swldpc.source_model import JointSource


def random_source(rng, ny=None, floor=0.05):
    """A random joint table with entries bounded away from zero, so all
    LLRs stay finite and moderate."""
    if ny is None:
        ny = int(rng.integers(2, 7))
    probs = rng.random((2, ny)) + floor
    probs /= probs.sum()
    return JointSource(probs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


UNIFORM_BSC01_TEXT = """\
# uniform-X with symmetric crossover 0.1
0 0 0.45
0 1 0.05
1 0 0.05
1 1 0.45
"""
