# tests/conftest.py
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app import create_app
from core_words import DirectiveSequence, Morphism, stationary_extension
from demos import demo_construction, demo_sequence


@pytest.fixture
def app():
    app = create_app('testing')
    yield app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture(autouse=True)
def testing_settings(monkeypatch):
    monkeypatch.setenv('SADIC_CONFIG', 'testing')


@pytest.fixture(scope='session')
def fibonacci():
    tau = Morphism.from_images([(1, 2), (1,)], source_level=1, target_level=0)
    return DirectiveSequence((tau,), stationary_extension(tau), 'fibonacci')


@pytest.fixture(scope='session')
def p1_sequence():
    return demo_sequence('p1-small', levels=6)


@pytest.fixture(scope='session')
def p2_sequence():
    return demo_sequence('p2-small', levels=6)


@pytest.fixture(scope='session')
def toeplitz_sequence():
    return demo_sequence('toeplitz-k1', levels=6)


@pytest.fixture(scope='session')
def pinf_construction():
    return demo_construction('pinf-small')
