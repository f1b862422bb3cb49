"""Shared fixtures and frozen reference values for the test suite."""

import numpy as np
import pytest

# 31-cell reference problem: a single live cell maps to the target below
# after 15 steps under rule 110. Both strings and the step count are pinned.
INIT = "0000000000000001000000000000000"
TARGET = "1101011001111101000000000000000"
STEPS = 15

# First step of the reference trajectory: the live cell grows one to the left.
STEP1 = "0000000000000011000000000000000"

RULE_110_BITS = (0, 1, 1, 1, 0, 1, 1, 0)


@pytest.fixture
def reference_problem():
    from metastable import search

    return search.Problem.from_strings(INIT, TARGET, STEPS)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
