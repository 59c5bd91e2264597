# tests/test_analysis.py
import math

import pytest

from analysis import (LevelBifurcation, asymptotic_pair_windows, complexity_table,
                      context_match, desubstitute_window, entropy_profile,
                      is_allowed, is_detected, language, language_horizon,
                      language_table, mandated_contexts, pair_fixpoint,
                      parse_mode, profile_bifurcation, render_pair_window,
                      right_special_report, scan_language, signal_audit,
                      windows_allowed)
from core_words import DirectiveSequence, Morphism, factors, stationary_extension
from demos import demo_sequence
from tests.helpers import stationary_sequence
from utils.exceptions import (BudgetExceededError, PropertyViolation,
                              ValidationError, WindowTooShortError)

P1_IMAGES = [(1, 2, 3), (1, 1, 2, 3), (1, 1, 1, 2, 3)]


# ==================== PAIRS & LANGUAGE ====================
def test_fibonacci_pair_fixpoint(fibonacci):
    fixpoint = pair_fixpoint(fibonacci, 0)
    assert fixpoint.converged
    assert fixpoint.pairs == {(1, 1), (1, 2), (2, 1)}
    assert fixpoint.followers() == {1: {1, 2}, 2: {1}}


def test_proper_morphism_pairs_in_one_step(p2_sequence):
    fixpoint = pair_fixpoint(p2_sequence, 2)
    assert fixpoint.depth == 1
    assert (4, 1) in fixpoint.pairs
    assert (1, 3) not in fixpoint.pairs


def test_fibonacci_language(fibonacci):
    assert language(fibonacci, 0) == {()}
    assert language(fibonacci, 2) == {(1, 1), (1, 2), (2, 1)}
    assert (2, 2) not in language(fibonacci, 2)
    assert is_allowed(fibonacci, (1, 2, 1, 1, 2))
    assert not is_allowed(fibonacci, (2, 2))


def test_language_horizon_covers_length(fibonacci):
    horizon = language_horizon(fibonacci, 30)
    assert min(fibonacci.image_lengths(0, horizon)) >= 30
    assert horizon == 8


def test_language_table_matches_direct_factors(p1_sequence):
    table = language_table(p1_sequence, 6)
    long_word = p1_sequence.apply((3, 1, 2, 3), 3, 0)
    assert factors(long_word, 6) <= table.words(6)
    assert all(table.contains(w) for w in factors(long_word, 6))


def test_language_table_workers_agree(p2_sequence):
    serial = language_table(p2_sequence, 12)
    parallel = language_table(p2_sequence, 12, workers=3)
    assert serial.words(12) == parallel.words(12)


def test_language_table_guards_text_length(p2_sequence):
    with pytest.raises(BudgetExceededError):
        language_table(p2_sequence, 40, max_text_length=100)


def test_finite_sequence_too_short_for_language():
    tau = Morphism.from_images([(1, 2), (1,)])
    with pytest.raises(WindowTooShortError):
        language(DirectiveSequence((tau,)), 5)


@pytest.mark.parametrize('fixture, m', [('fibonacci', 10), ('p2_sequence', 12)])
def test_language_does_not_depend_on_depth(request, fixture, m):
    t = request.getfixturevalue(fixture)
    horizon = language_horizon(t, m)
    words = language(t, m, horizon=horizon)
    for deeper in (horizon + 1, horizon + 2):
        assert language(t, m, horizon=deeper) == words


def test_language_table_finds_occurrences(fibonacci):
    table = language_table(fibonacci, 8)
    starts = table.occurrences((1, 2, 1))
    assert starts
    assert all(tuple(int(x) for x in table.text[p:p + 3]) == (1, 2, 1) for p in starts)
    assert table.occurrences((2, 2)) == []
    assert len(table.occurrences((1,), limit=3)) == 3


# ==================== COMPLEXITY ====================
def test_fibonacci_is_sturmian(fibonacci):
    rows = complexity_table(fibonacci, 30)
    assert [row.p for row in rows] == [m + 1 for m in range(1, 31)]
    assert rows[0].h == pytest.approx(math.log(2))


def test_scan_language_special_words(fibonacci):
    counts, special = scan_language(language_table(fibonacci, 8), 8)
    assert counts[:4] == [2, 3, 4, 5]
    for m in range(1, 8):
        assert len(special[m]) == 1
        assert set(special[m][0].followers) == {1, 2}


def test_entropy_decreases_for_linear_complexity(p1_sequence):
    rows = complexity_table(p1_sequence, 64)
    profile = dict(entropy_profile(rows))
    assert profile[64] <= profile[16]


# ==================== RIGHT-SPECIAL BRANCHES ====================
def test_fibonacci_single_branch(fibonacci):
    report = right_special_report(fibonacci, 30, 10)
    assert report.identity_holds
    assert report.suffix_branches == 1
    assert report.stabilized_branches == 1
    assert report.branch_degrees == [2]
    assert report.branches[0].signal is None


@pytest.mark.parametrize('fixture, branches', [
    ('p1_sequence', 1),
    ('p2_sequence', 2),
    ('toeplitz_sequence', 1),
])
def test_demo_branch_counts(request, fixture, branches):
    t = request.getfixturevalue(fixture)
    report = right_special_report(t, 40, 10)
    assert report.identity_holds
    assert report.stabilized_branches == branches
    assert report.branch_degrees == [2] * branches
    assert report.suffix_branches >= branches


def test_p2_branches_follow_their_signals(p2_sequence):
    report = right_special_report(p2_sequence, 40, 10)
    assert [b.signal for b in report.branches] == [1, 2]
    for branch in report.branches:
        for profile in branch.profiles:
            first = profile.at(1)
            assert first.followers == (branch.signal, branch.signal + 1)
            assert first.aligned
            assert profile.special.degree == 2


def test_short_lived_words_are_transients(toeplitz_sequence):
    report = right_special_report(toeplitz_sequence, 40, 10)
    # 1 2 1 1 1 1 2 2 2 2 | v2, v3 stays right-special for about fifty letters
    assert report.transients
    assert all(not is_detected(toeplitz_sequence, p) for p in report.transients)
    assert [b.signal for b in report.branches] == [1]


def test_profile_reads_level_one_context(p2_sequence):
    table = language_table(p2_sequence, 41)
    _, special = scan_language(table, 41)
    profiles = [profile_bifurcation(p2_sequence, table, s, 2) for s in special[40]]
    contexts = {p.at(1).context[-4:] for p in profiles if p.at(1) and p.at(1).signal == 2}
    assert (4, 1, 1, 2) in contexts


def test_context_match_is_undecided_on_short_contexts():
    found = LevelBifurcation(2, 2, (2, 3), (1, 2), 0, True)
    assert context_match(found, {(4, 1, 1, 2)}) is None
    assert context_match(LevelBifurcation(2, 2, (2, 3), (3, 1, 1, 2), 0, True), {(4, 1, 1, 2)}) is False
    assert context_match(LevelBifurcation(2, 2, (2, 3), (9, 4, 1, 1, 2), 0, True), {(4, 1, 1, 2)}) is True


@pytest.mark.parametrize('name, m_max', [('pinf-small', 40), ('subexp-sqrt', 14)])
def test_complexity_identity_on_demos(name, m_max):
    counts, special = scan_language(language_table(demo_sequence(name), m_max + 1), m_max + 1)
    for m in range(1, m_max + 1):
        assert counts[m] - counts[m - 1] == sum(s.degree - 1 for s in special[m])


def test_report_dict_lists_entries(fibonacci):
    data = right_special_report(fibonacci, 12).to_dict(include_words=True)
    assert data['gap'] == 3
    assert len(data['entries']) == 12
    assert data['entries'][4]['degrees'] == [2]
    assert data['entries'][4]['words'][0]['followers'] == [1, 2]
    assert data['branches'][0]['degree'] == 2


def test_report_rejects_bad_gap(fibonacci):
    with pytest.raises(ValidationError):
        right_special_report(fibonacci, 10, 10)


# ==================== DESUBSTITUTION ====================
def test_desubstitution_of_an_image(p2_sequence):
    word = p2_sequence.apply((3,), 2, 0)
    for position in range(len(word)):
        found = desubstitute_window(p2_sequence, word, position, 2, aligned=True)
        assert found.letter == 3
        assert found.offset == position


def test_desubstitution_is_local(p2_sequence):
    word = p2_sequence.apply((4,), 5, 0)
    center = len(word) // 2
    expected = desubstitute_window(p2_sequence, word, center, 2, aligned=True)
    for radius in (300, 600):
        window = word[center - radius:center + radius]
        found = desubstitute_window(p2_sequence, window, radius, 2)
        assert (found.letter, found.offset) == (expected.letter, expected.offset)


def test_desubstitution_level_one_reads_hat(p2_sequence):
    found = desubstitute_window(p2_sequence, (5, 6, 1, 2), 1, 1)
    assert found.word == (3, 1)
    assert (found.letter, found.offset) == (3, 1)


def test_desubstitution_rejects_bad_position(p2_sequence):
    with pytest.raises(ValidationError):
        desubstitute_window(p2_sequence, (1, 2), 5, 1)


# ==================== SIGNAL AUDIT ====================
def test_parse_mode():
    assert parse_mode('inf') is None
    assert parse_mode('3') == 3
    with pytest.raises(ValidationError):
        parse_mode('0')


def test_mandated_contexts():
    assert mandated_contexts(2, 4, 2) == {(4, 1, 1, 2)}
    assert mandated_contexts(1, 5, None) == {(5, 1), (5, 1, 1)}


def test_audit_passes_on_pk(p2_sequence):
    audit = signal_audit(p2_sequence, 2, 2, m_max=60)
    assert audit.passed
    readings = {level: {e.bifurcation.signal for e in audit.entries if e.bifurcation.level == level}
                for level in (1, 2)}
    assert readings[1] == {1, 2}
    assert readings[2] <= {1, 2}
    assert all(e.bifurcation.followers == (e.bifurcation.signal, e.bifurcation.signal + 1)
               for e in audit.entries)


def test_audit_passes_on_pinf():
    t = demo_sequence('pinf-compact')
    audit = signal_audit(t, 'inf', 3, m_max=120)
    assert audit.passed
    assert audit.profiles
    assert all(e.bifurcation.signal <= e.bifurcation.level for e in audit.entries)
    assert max(p.top_level for p in audit.profiles) >= 2
    assert all(p.stabilization_level() <= audit.n_max for p in audit.profiles)


def test_audit_dict(p2_sequence):
    data = signal_audit(p2_sequence, 2, 1, m_max=40).to_dict()
    assert data['mode'] == 2
    assert data['m_max'] == 40
    assert data['passed'] is True
    assert data['counterexamples'] == []
    assert {entry['signal'] for entry in data['entries']} == {1, 2}


def test_audit_refuses_sequence_without_property():
    images = [(1, 2, 3, 1), (1, 1, 2, 3), (1, 1, 1, 2, 3)]
    with pytest.raises(PropertyViolation) as excinfo:
        signal_audit(stationary_sequence(images), 1, 1)
    assert excinfo.value.clause == '4-suffix'


# ==================== ASYMPTOTIC PAIRS ====================
def test_first_offset_is_first_image_length():
    images = [(1, 2, 3), (1, 1, 2, 3), (1, 1, 1, 2, 3)]
    tau = Morphism.from_images(images, source_level=2, target_level=1)
    base = Morphism.from_images([(1, 2, 3), (4, 5, 6), (7, 8, 9)], source_level=1, target_level=0)
    t = DirectiveSequence((base, tau), stationary_extension(tau))
    assert asymptotic_pair_windows(t, 1, 1).alpha == -3


@pytest.mark.parametrize('i', [1, 2])
def test_pair_windows_agree_then_differ(p2_sequence, i):
    for n in range(1, 6):
        window = asymptotic_pair_windows(p2_sequence, i, n, 2)
        assert window.agree_before_zero()
        assert window.differ_at_zero()
        assert windows_allowed(p2_sequence, window)


@pytest.mark.parametrize('i', [1, 2])
def test_pair_windows_nest(p2_sequence, i):
    for n in range(1, 4):
        inner = asymptotic_pair_windows(p2_sequence, i, n, 2)
        outer = asymptotic_pair_windows(p2_sequence, i, n + 1, 2)
        shift = inner.alpha - outer.alpha
        assert outer.x_window[shift:shift + len(inner.x_window)] == inner.x_window
        assert outer.y_window[shift:shift + len(inner.y_window)] == inner.y_window


def test_pair_window_offsets(p2_sequence):
    assert asymptotic_pair_windows(p2_sequence, 1, 1, 2).alpha == -2
    assert asymptotic_pair_windows(p2_sequence, 1, 2, 2).alpha == -10
    assert asymptotic_pair_windows(p2_sequence, 2, 2, 2).alpha == -32


def test_pair_window_rejects_index_above_k(p2_sequence):
    with pytest.raises(ValidationError):
        asymptotic_pair_windows(p2_sequence, 3, 2, 2)


def test_render_pair_window(p2_sequence):
    text = render_pair_window(asymptotic_pair_windows(p2_sequence, 1, 2, 2), radius=6)
    lines = text.splitlines()
    assert lines[0] == 'i=1 n=2 alpha=-10'
    assert lines[1].startswith('x ') and lines[2].startswith('y ')
    assert '^' in lines[3]


def test_p1_images_form_a_valid_language():
    t = stationary_sequence(P1_IMAGES)
    assert is_allowed(t, (1, 1, 2), level=1)
    assert not is_allowed(t, (2, 2), level=1)


def test_pair_windows_guard_their_length(pinf_construction):
    with pytest.raises(BudgetExceededError) as excinfo:
        asymptotic_pair_windows(pinf_construction.sequence, 1, 4, 'inf')
    assert excinfo.value.rule == 'max_window_length'
    assert excinfo.value.limit == 5_000_000


def test_pair_windows_custom_limit(p2_sequence):
    with pytest.raises(BudgetExceededError):
        asymptotic_pair_windows(p2_sequence, 1, 3, 2, max_window_length=20)
