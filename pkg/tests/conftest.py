import random

import pytest

from core.enumeration import enumerate_special
from core.polyhedron import special_model
from tests import builders


@pytest.fixture(scope="session")
def catalog_n1():
    return enumerate_special(1)


@pytest.fixture(scope="session")
def catalog_n2():
    return enumerate_special(2)


@pytest.fixture(scope="session")
def acyclic_n1(catalog_n1):
    return [rec for rec in catalog_n1.records if rec.acyclic]


@pytest.fixture
def piece_a():
    return builders.acyclic_piece()


@pytest.fixture
def piece_b():
    return builders.identity_piece()


@pytest.fixture
def special_a(piece_a):
    return special_model(piece_a)


@pytest.fixture
def composite():
    return builders.composite()


@pytest.fixture
def rng():
    return random.Random(20240607)
