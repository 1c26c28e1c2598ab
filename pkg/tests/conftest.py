"""Shared fixtures over the known-answer constants."""

import os

import pytest

from matfhe.cipher import Ciphertext, Enc4Randomness
from matfhe.keys import KeyTuple

from known_answers import CT_A, CT_B5, CT_B12, KA, KA_INV, KB, KB_INV, MOD

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")

# The coin pair that produces CT_A from plaintext 257 under key A.
RND_A = Enc4Randomness(r=291, row_choices=(2, 3))


@pytest.fixture
def key_a():
    return KeyTuple(MOD, KA, KA_INV)


@pytest.fixture
def key_b():
    return KeyTuple(MOD, KB, KB_INV)


@pytest.fixture
def ct_a():
    return Ciphertext(CT_A)


@pytest.fixture
def ct_b5():
    return Ciphertext(CT_B5)


@pytest.fixture
def ct_b12():
    return Ciphertext(CT_B12)
