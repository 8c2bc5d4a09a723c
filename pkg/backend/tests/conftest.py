import os
import sys

import pytest

# Make the helper package importable the same way the entry script does
BACKEND_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if BACKEND_DIR not in sys.path:
    sys.path.insert(0, BACKEND_DIR)

from helper.algebra_parser import parse_algebra  # noqa: E402
from helper.exact_linalg import RingSpec  # noqa: E402

FIXTURES_DIR = os.path.join(BACKEND_DIR, "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, f"{name}.alg")


def load(name: str, ring: RingSpec = None):
    return parse_algebra(fixture_path(name), ring=ring)


@pytest.fixture
def Q():
    return RingSpec.rationals()


@pytest.fixture
def Z():
    return RingSpec.integers()


@pytest.fixture
def F2():
    return RingSpec.prime_field(2)


@pytest.fixture
def ground_field():
    return load("ground_field")


@pytest.fixture
def dual_numbers():
    return load("dual_numbers")


@pytest.fixture
def matrices():
    return load("matrices_2x2")


@pytest.fixture
def three_generator():
    return load("ainf_three_generator")
