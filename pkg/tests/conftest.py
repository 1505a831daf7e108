import random

import pytest

from perms import Permutation
from permset import PermSet


@pytest.fixture
def rng():
    return random.Random(1729)


def family(n, *perms):
    """PermSet from compact one-line strings like "312" """
    return PermSet.from_perms(n, [tuple(int(c) for c in p) for p in perms])


def perm(text):
    return Permutation(int(c) for c in text)
