# tests/test_acceptance.py
"""End-to-end scenarios on amplified seeds and the built-in demos."""
import pytest

from analysis import complexity_table, language, right_special_report
from bratteli import (check_intertwining, enumerate_paths, minimal_path, uniform_diagram,
                      vershik_orbit)
from constructions import (PkWitness, build_pk_sequence, build_subexp_family,
                           check_pk, parse_growth)
from demos import demo_construction

SEED_LEVELS = 12


@pytest.fixture(scope='module')
def amplified():
    seed = uniform_diagram([2] * SEED_LEVELS, 50)
    return {k: build_pk_sequence(seed, k, amplify=True) for k in (1, 2, 3)}


@pytest.mark.parametrize('k', [1, 2, 3])
def test_amplified_seed_has_k_components(amplified, k):
    construction = amplified[k]
    t = construction.sequence
    assert isinstance(check_pk(t, k), PkWitness)
    report = right_special_report(t, 400, 100)
    assert report.identity_holds
    assert report.stabilized_branches == k
    assert report.branch_degrees == [2] * k


@pytest.mark.parametrize('k', [1, 2, 3])
def test_amplification_keeps_the_seed_class(amplified, k):
    construction = amplified[k]
    assert check_intertwining(construction.original, construction.ordered.diagram, construction.certificate)


def test_toeplitz_has_one_component(toeplitz_sequence):
    report = right_special_report(toeplitz_sequence, 300, 75)
    assert report.stabilized_branches == 1
    assert report.identity_holds


def test_subexp_first_level_words():
    sequence, spec = build_subexp_family(parse_growth('pow2_sqrt'), 1)
    assert spec.levels[0].alpha == 5
    rows = complexity_table(sequence, 15)
    assert rows[14].p >= 32


def test_entropy_profile_decreases(p1_sequence):
    rows = complexity_table(p1_sequence, 64)
    assert rows[63].h <= rows[15].h


def test_vershik_covers_small_toy():
    b = demo_construction('p1-small').ordered
    total = 0
    for vertex in (1, 2, 3):
        orbit = vershik_orbit(b, minimal_path(b, 2, vertex))
        assert len(set(orbit)) == len(orbit)
        assert set(orbit) == set(enumerate_paths(b, 2, vertex))
        total += len(orbit)
    assert total == 24


def test_language_of_level_one_is_closed_under_factors(p2_sequence):
    words = language(p2_sequence, 6, level=1)
    shorter = language(p2_sequence, 5, level=1)
    assert {w[1:] for w in words} <= shorter
    assert {w[:-1] for w in words} <= shorter
