# tests/test_constructions.py
import pytest

from bratteli import stationary_diagram, uniform_diagram
from constructions import (Clause, PkWitness, PropertyFailure, amplify_diagram,
                           arrange_image, assign_pk_ordering, build_pinf_sequence,
                           build_pk_sequence, build_subexp_family,
                           build_toeplitz_sequence, check_ds_classes, check_equal_row_sums,
                           check_pinf, check_pk, check_prefix_independence,
                           check_toeplitz, copy_matrix, linear_de_bruijn,
                           parse_growth, pk_prefix, subexp_morphism, surjection,
                           toeplitz_image, toeplitz_morphisms, vertex_copy_factorization)
from core_words import DirectiveSequence, Morphism, factors
from demos import P2_MATRIX, TOEPLITZ_MATRIX
from tests.helpers import stationary_sequence
from utils.exceptions import BudgetExceededError, PreconditionError, ValidationError


# ==================== PREFIXES ====================
@pytest.mark.parametrize('i, k, expected', [
    (1, 2, (1, 2, 3)),
    (2, 2, (1, 1, 2, 3)),
    (3, 2, (1, 1, 2, 2, 3)),
    (4, 2, (1, 1, 1, 1, 2)),
    (2, 1, (1, 1, 2)),
])
def test_pk_prefix(i, k, expected):
    assert pk_prefix(i, k) == expected


def test_arrange_image_appends_ascending_blocks():
    assert arrange_image([2, 2, 1, 1], (1, 1, 2, 3)) == (1, 1, 2, 3, 2, 4)


def test_arrange_image_needs_room_for_prefix():
    with pytest.raises(PreconditionError):
        arrange_image([1, 1, 1], (1, 1, 2))


# ==================== AMPLIFICATION ====================
def test_surjection_and_copy_matrix():
    assert surjection(5, 2) == (1, 2, 1, 2, 1)
    assert copy_matrix(3, 2).tolist() == [[1, 0], [0, 1], [1, 0]]


def test_vertex_copy_factorization_spreads_entries():
    b, c = vertex_copy_factorization([[5, 4], [3, 2]], 3)
    assert (c @ b).tolist() == [[5, 4], [3, 2]]
    assert c.tolist() == [[3, 4, 2], [2, 2, 1]]


def test_amplify_grows_levels_and_entries():
    derived, certificate = amplify_diagram(uniform_diagram([2] * 10, 50), 2)
    assert certificate.keep[:2] == (0, 1)
    for n in range(1, derived.depth):
        assert derived.size(n) >= n + 1
        assert min(derived.matrix(n).flat) >= 2


def test_amplify_rejects_short_diagram():
    with pytest.raises(PreconditionError):
        amplify_diagram(uniform_diagram([2], 50), 1)


# ==================== PROPERTY (P_k) ====================
def test_pk_construction_passes_its_check():
    d = stationary_diagram([[2]] * 4, P2_MATRIX, 5)
    result = build_pk_sequence(d, 2)
    verdict = check_pk(result.sequence, 2)
    assert isinstance(verdict, PkWitness)
    assert verdict.levels == 5
    kinds = {(dec.vertex, dec.kind) for dec in verdict.decompositions if dec.level == 1}
    assert kinds == {(1, 'short'), (2, 'short'), (3, 'short'), (4, 'long')}


def test_pk_ordering_images(p2_sequence):
    assert p2_sequence.morphism(1).images == (
        (1, 2, 3, 4), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 3, 4)
    )


@pytest.mark.parametrize('i, expected', [
    (1, (1, 2) + (1,) * 4 + (2,) * 4 + (3,) * 5),
    (3, (1, 1, 1, 2) + (1,) * 2 + (2,) * 4 + (3,) * 5),
])
def test_pk_ordering_arranges_full_rows(i, expected):
    d = stationary_diagram([[5]] * 3, [[5, 5, 5]] * 3, 2)
    word = assign_pk_ordering(d, 1).word(1, i)
    assert word == expected
    assert [word.count(t) for t in (1, 2, 3)] == [5, 5, 5]
    assert (3, 1) not in zip(word, word[1:])


def test_pk_preconditions_need_entries():
    d = stationary_diagram([[2]] * 3, [[1, 1, 1], [1, 1, 1], [3, 1, 1]], 3)
    with pytest.raises(PreconditionError) as excinfo:
        assign_pk_ordering(d, 1)
    assert excinfo.value.to_dict()['rule'] == 'short_rows'


def test_pk_preconditions_need_marker_letter():
    d = stationary_diagram([[2]] * 3, [[2, 2, 2]] * 3, 3)
    with pytest.raises(PreconditionError):
        assign_pk_ordering(d, 2)


@pytest.mark.parametrize('images, clause', [
    ([(1, 2, 3, 4, 1), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 3, 4)], Clause.SUFFIX),
    ([(1, 2, 3, 4), (1, 2, 1, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 3, 4)], Clause.PREFIX_SHORT),
    ([(1, 2, 3, 4), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 2, 1, 3, 4)], Clause.PREFIX_LONG),
    ([(1, 2, 3, 4, 1, 4), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 3, 4)], Clause.FACTOR),
    ([(1, 2, 3, 4), (1, 1, 2, 3, 4), (1, 1, 2, 2, 3, 4), (1, 1, 1, 1, 2, 4, 4)], Clause.PRIMITIVE),
])
def test_pk_check_reports_first_clause(images, clause):
    verdict = check_pk(stationary_sequence(images), 2)
    assert isinstance(verdict, PropertyFailure)
    assert verdict.clause == clause
    assert verdict.clause in Clause.all()
    assert verdict.level == 1


def test_failure_rejects_unknown_clause():
    with pytest.raises(ValidationError) as excinfo:
        PropertyFailure('5-unknown', 1, None, 'no such clause')
    assert excinfo.value.field == 'clause'


def test_check_rejects_non_hat_base(p2_sequence):
    base = Morphism.from_images([(1, 2), (2, 3), (4,), (5,)], source_level=1, target_level=0)
    t = DirectiveSequence((base,) + p2_sequence.morphisms[1:3])
    assert check_pk(t, 2).clause == Clause.HAT


def test_prefix_independence_holds_for_pk(p2_sequence):
    assert check_prefix_independence(p2_sequence, 2, 4) is None


# ==================== PROPERTY (P_∞) ====================
def test_pinf_construction(pinf_construction):
    t = pinf_construction.sequence
    assert isinstance(check_pinf(t), PkWitness)
    for n in range(1, len(t)):
        assert t.alphabet(n).size >= n + 2


def test_pinf_needs_growing_alphabets():
    d = stationary_diagram([[2]] * 4, P2_MATRIX, 5)
    with pytest.raises(PreconditionError):
        build_pinf_sequence(d)


# ==================== TOEPLITZ ====================
def test_toeplitz_images_have_equal_lengths(toeplitz_sequence):
    assert toeplitz_sequence.morphism(1).images[0] == (1, 1, 1, 2) + (1, 1) + (2,) * 4 + (3,) * 6
    verdict = check_toeplitz(toeplitz_sequence, 1)
    assert not isinstance(verdict, PropertyFailure)
    assert verdict.image_lengths[1:] == (16,) * (verdict.levels - 1)
    assert check_ds_classes(toeplitz_sequence, 1) is None


def test_toeplitz_image_first_letter_prefix():
    assert toeplitz_image(TOEPLITZ_MATRIX[1], 2, 1)[:3] == (1, 1, 2)
    assert toeplitz_image(TOEPLITZ_MATRIX[2], 3, 1)[:2] == (1, 2)


def test_toeplitz_check_flags_unequal_lengths():
    images = [(1, 2, 3), (1, 1, 2, 3), (1, 1, 1, 2, 3)]
    verdict = check_toeplitz(stationary_sequence(images), 1)
    assert verdict.clause == Clause.EQUAL_LENGTHS


def test_toeplitz_requires_equal_row_sums():
    d = stationary_diagram([[5]] * 3, [[5, 5, 5], [6, 5, 5], [5, 6, 5]], 3)
    assert not check_equal_row_sums(d)
    with pytest.raises(PreconditionError):
        build_toeplitz_sequence(d, 1)


def test_toeplitz_morphisms_match_the_pipeline(toeplitz_sequence):
    d = stationary_diagram([[5]] * 3, TOEPLITZ_MATRIX, 4)
    assert check_equal_row_sums(d)
    t = toeplitz_morphisms(d, 1)
    assert t.morphism(1).images == toeplitz_sequence.morphism(1).images


# ==================== SUBEXPONENTIAL FAMILY ====================
def test_de_bruijn_covers_every_word():
    word = linear_de_bruijn(2, 5)
    assert len(word) == 2 ** 5 + 4
    assert len(factors(word, 5)) == 32


def test_subexp_morphism_shape():
    tau, w, length = subexp_morphism(2, 1)
    assert tau.source.size == 5 and tau.target.size == 4
    assert set(tau.lengths) == {length}
    assert all(image[0] == 1 and image[-1] == 4 for image in tau.images)


def test_subexp_first_alpha():
    sequence, spec = build_subexp_family(parse_growth('pow2_sqrt'), 1)
    assert spec.levels[0].alpha == 5
    assert spec.base_length == 3
    assert sequence.has_level(10)


def test_subexp_alpha_cap():
    with pytest.raises(BudgetExceededError):
        build_subexp_family(parse_growth('pow2_sqrt'), 1, alpha_cap=4)


def test_parse_growth_rejects_unknown():
    with pytest.raises(ValidationError):
        parse_growth('factorial')
    assert parse_growth('poly:2')(3) == pytest.approx(9.0)
