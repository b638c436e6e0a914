from fractions import Fraction

import pytest

from seipcover import ProblemISpec, SetCoverInstance, gen_problem_i
from seipcover.generators import random_corpus


@pytest.fixture
def e1():
    return SetCoverInstance.from_sets(3, [(1, 2), (3,), (1, 2, 3)], [1, 1, Fraction(5, 2)], name="e1")


@pytest.fixture
def problem_i_small():
    return gen_problem_i(ProblemISpec(2, 1, Fraction(1, 10)))


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()
