# analysis.py
"""
Finite observables of an S-adic subshift: languages, complexity and entropy
tables, right-special factors and the levels their bifurcations desubstitute
to, marker desubstitution, signal audits and the explicit windows of
left-asymptotic pairs.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from constructions import PropertyFailure, check_pinf, check_pk
from core_words import (DirectiveSequence, Word, as_word, common_prefix_length,
                        factors, is_hat, render_word)
from utils.exceptions import (BudgetExceededError, PreconditionError,
                              PropertyViolation, ValidationError,
                              WindowTooShortError)

logger = logging.getLogger(__name__)

Mode = Union[int, str]

MAX_HORIZON_STEPS = 64
OCCURRENCE_LIMIT = 64


# ==================== ALLOWED 2-WORDS ====================
@dataclass(frozen=True)
class PairFixpoint:
    level: int
    pairs: frozenset
    converged: bool
    depth: int

    def followers(self) -> dict[int, set[int]]:
        rv = {}
        for a, b in self.pairs:
            rv.setdefault(a, set()).add(b)
        return rv

    def to_dict(self):
        return {
            'level': self.level,
            'pairs': [list(p) for p in sorted(self.pairs)],
            'converged': self.converged,
            'depth': self.depth
        }


def _inner_pairs(images) -> set[Word]:
    rv = set()
    for image in images:
        rv |= factors(image, 2)
    return rv


def _push_pairs(tau, pairs) -> set[Word]:
    rv = set()
    for a, b in pairs:
        rv |= factors(tau.image(a) + tau.image(b), 2)
    return rv


def pair_fixpoint(t: DirectiveSequence, level: int = 0, budget: int = 12) -> PairFixpoint:
    """Allowed 2-words at ``level``, propagated down from seeds ever deeper until stable."""
    tau = t.morphism(level)
    if tau.is_proper():
        pairs = _inner_pairs(tau.images) | {(tau.images[0][-1], tau.images[0][0])}
        return PairFixpoint(level, frozenset(pairs), True, 1)
    previous = None
    for depth in range(1, budget + 1):
        top = level + depth
        if not t.has_level(top):
            logger.warning(f"Pair fixpoint at level {level} stopped: sequence ends at level {top}.")
            return PairFixpoint(level, frozenset(previous or ()), False, depth - 1)
        pairs = _inner_pairs(t.morphism(top).images)
        for n in range(top - 1, level - 1, -1):
            pairs = _push_pairs(t.morphism(n), pairs)
        if pairs == previous:
            logger.debug(f"Pair fixpoint at level {level} converged at depth {depth}.")
            return PairFixpoint(level, frozenset(pairs), True, depth)
        previous = pairs
    logger.warning(f"Pair fixpoint at level {level} did not converge within {budget} levels.")
    return PairFixpoint(level, frozenset(previous or ()), False, budget)


# ==================== LANGUAGE ====================
@dataclass
class LanguageTable:
    """Every factor of length <= ``max_length`` at ``level`` occurs in ``text``; 0 separates segments."""
    level: int
    horizon: int
    max_length: int
    text: np.ndarray = field(repr=False)
    _reach: Optional[np.ndarray] = field(default=None, repr=False)
    _haystack: Optional[str] = field(default=None, repr=False)

    @property
    def reach(self) -> np.ndarray:
        """Number of letters from each position to the next separator."""
        if self._reach is None:
            size = self.text.size
            zeros = np.append(np.flatnonzero(self.text == 0), size)
            index = np.arange(size)
            self._reach = zeros[np.searchsorted(zeros, index)] - index
        return self._reach

    @property
    def haystack(self) -> str:
        """The text with one character per letter, for substring search."""
        if self._haystack is None:
            self._haystack = ''.join(map(chr, self.text.tolist()))
        return self._haystack

    def occurrences(self, word: Word, limit: int = OCCURRENCE_LIMIT) -> list[int]:
        """Start positions of ``word`` in the text, at most ``limit`` of them."""
        needle = ''.join(map(chr, word))
        rv = []
        start = self.haystack.find(needle)
        while start >= 0 and len(rv) < limit:
            rv.append(start)
            start = self.haystack.find(needle, start + 1)
        return rv

    def words(self, m: int) -> set[Word]:
        if m == 0:
            return {()}
        if m > self.max_length:
            raise WindowTooShortError(f"Table holds words up to length {self.max_length}, {m} requested.",
                                      level=self.level, required=m)
        starts = self.reach[:self.text.size - m + 1] >= m
        windows = np.lib.stride_tricks.sliding_window_view(self.text, m)[starts]
        return {tuple(int(x) for x in row) for row in np.unique(windows, axis=0)}

    def contains(self, word: Word) -> bool:
        if not word:
            return True
        if len(word) > self.max_length:
            raise WindowTooShortError(f"Table holds words up to length {self.max_length}, "
                                      f"{len(word)} requested.", level=self.level, required=len(word))
        return ''.join(map(chr, word)) in self.haystack


def language_horizon(t: DirectiveSequence, length: int, level: int = 0) -> int:
    """Smallest N > level with min |τ_{[level, N)}(a)| >= length."""
    for horizon in range(level + 1, level + MAX_HORIZON_STEPS + 1):
        if not t.has_level(horizon):
            break
        if min(t.image_lengths(level, horizon)) >= length:
            return horizon
    raise WindowTooShortError(
        f"No level of the directive sequence gives images of length {length} at level {level}.",
        level=level, required=length
    )


def language_table(t: DirectiveSequence, max_length: int, level: int = 0, horizon: Optional[int] = None,
                   workers: int = 1, max_text_length: int = 5_000_000, budget: int = 12) -> LanguageTable:
    if max_length < 1:
        raise ValidationError(f"Word length must be positive, got {max_length}.", field='m')
    if horizon is None:
        horizon = language_horizon(t, max_length, level)
    elif min(t.image_lengths(level, horizon)) < max_length:
        raise WindowTooShortError(f"Horizon {horizon} is too shallow for words of length {max_length}.",
                                  level=level, required=max_length)
    lengths = t.image_lengths(level, horizon)
    pairs = pair_fixpoint(t, horizon, budget).pairs
    edge = max_length - 1
    total = sum(lengths) + len(pairs) * 2 * edge + len(lengths) + len(pairs)
    if total > max_text_length:
        raise BudgetExceededError(f"Language text would hold {total} letters, limit {max_text_length}.",
                                  rule='max_text_length', level=level, limit=max_text_length)
    window = t.window(level, horizon)
    logger.info(f"Language at level {level}: horizon {horizon}, words up to {max_length}, "
                f"{len(pairs)} junctions.")

    def junction(pair):
        a, b = pair
        return window.image(a)[len(window.image(a)) - edge:] + window.image(b)[:edge]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            junctions = list(pool.map(junction, sorted(pairs)))
    else:
        junctions = [junction(pair) for pair in sorted(pairs)]
    segments = list(window.images) + junctions
    text = np.zeros(sum(len(s) for s in segments) + len(segments), dtype=np.int64)
    position = 0
    for segment in segments:
        text[position:position + len(segment)] = segment
        position += len(segment) + 1
    return LanguageTable(level, horizon, max_length, text)


def language(t: DirectiveSequence, m: int, level: int = 0, horizon: Optional[int] = None) -> set[Word]:
    if m == 0:
        return {()}
    return language_table(t, m, level, horizon).words(m)


def is_allowed(t: DirectiveSequence, word: Word, level: int = 0) -> bool:
    word = as_word(word)
    if not word:
        return True
    return language_table(t, len(word), level).contains(word)


# ==================== COMPLEXITY ====================
@dataclass(frozen=True)
class SpecialWord:
    word: Word
    followers: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.followers)

    def to_dict(self):
        return {'word': list(self.word), 'followers': list(self.followers)}


def scan_language(table: LanguageTable, max_length: int):
    """
    Counts p(1..max_length) and right-special words RS(1..max_length-1).

    Factor classes of length m are refined to length m+1 by pairing each
    class with its next letter.
    """
    text, reach = table.text, table.reach
    classes = text.copy()
    base = int(text.max()) + 1
    counts, special = [], {}
    for m in range(1, max_length + 1):
        counts.append(int(np.unique(classes[reach >= m]).size))
        if m == max_length:
            break
        starts = np.flatnonzero(reach >= m + 1)
        keys = classes[starts] * base + text[starts + m]
        unique_keys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        owners = unique_keys // base
        owner_values, owner_counts = np.unique(owners, return_counts=True)
        rows = []
        for owner in owner_values[owner_counts >= 2]:
            members = np.flatnonzero(owners == owner)
            start = int(starts[first[members[0]]])
            followers = tuple(sorted(int(x) for x in unique_keys[members] % base))
            rows.append(SpecialWord(tuple(int(x) for x in text[start:start + m]), followers))
        special[m] = sorted(rows, key=lambda s: s.word)
        refined = np.full(text.size, -1, dtype=np.int64)
        refined[starts] = inverse
        classes = refined
    return counts, special


@dataclass(frozen=True)
class ComplexityRow:
    m: int
    p: int
    h: float

    def to_dict(self):
        return {'m': self.m, 'p': self.p, 'h': self.h}


def complexity_table(t: DirectiveSequence, m_max: int, level: int = 0, workers: int = 1,
                     max_text_length: int = 5_000_000) -> list[ComplexityRow]:
    table = language_table(t, m_max, level, workers=workers, max_text_length=max_text_length)
    counts, _ = scan_language(table, m_max)
    return [ComplexityRow(m, p, math.log(p) / m) for m, p in enumerate(counts, start=1)]


def entropy_profile(rows: list[ComplexityRow]) -> list[tuple[int, float]]:
    return [(row.m, row.h) for row in rows]


# ==================== DESUBSTITUTION ====================
@dataclass(frozen=True)
class Desubstitution:
    """``word[index]`` is the level letter whose τ_{[0, level)}-image covers the position, at ``offset``."""
    level: int
    word: Word
    index: int
    offset: int

    @property
    def letter(self) -> int:
        return self.word[self.index]

    def to_dict(self):
        return {'level': self.level, 'word': list(self.word), 'index': self.index,
                'letter': self.letter, 'offset': self.offset}


def _hat_parse(tau, word: Word, position: int):
    lookup = {e: (u, j) for u, image in enumerate(tau.images, start=1) for j, e in enumerate(image)}
    letters, index, offset, previous = [], 0, 0, None
    for p, e in enumerate(word):
        if e not in lookup:
            raise ValidationError(f"Letter {e} does not occur in any image of τ_0.", field=f'word[{p}]')
        u, j = lookup[e]
        if previous is None or previous != (u, j - 1):
            if previous is not None and (j != 0 or previous[1] != len(tau.image(previous[0])) - 1):
                raise ValidationError(f"Word breaks a τ_0-image at position {p}.", field=f'word[{p}]')
            letters.append(u)
        previous = (u, j)
        if p == position:
            index, offset = len(letters) - 1, j
    return tuple(letters), index, offset


def _placements(tau, segment: Word, left_open: bool, right_open: bool):
    """(letter, shift) pairs with ``segment`` read inside the image of letter at ``shift``."""
    size = len(segment)
    rv = []
    for u, image in enumerate(tau.images, start=1):
        if not left_open and not right_open:
            if image == segment:
                rv.append((u, 0))
        elif left_open and not right_open:
            if len(image) >= size and image[len(image) - size:] == segment:
                rv.append((u, len(image) - size))
        elif right_open and not left_open:
            if image[:size] == segment:
                rv.append((u, 0))
        else:
            rv.extend((u, s) for s in range(len(image) - size + 1) if image[s:s + size] == segment)
    return rv


def _marker_step(t: DirectiveSequence, level: int, word: Word, index: int, offset: int, aligned: bool):
    tau = t.morphism(level)
    marker = t.alphabet(level).size
    lengths = t.image_lengths(0, level)
    cuts = [q for q in range(1, len(word)) if word[q - 1] == marker and word[q] == 1]
    bounds = [0] + cuts + [len(word)]
    letters, new_index, new_offset = [], None, None
    for number, (start, stop) in enumerate(zip(bounds, bounds[1:])):
        segment = word[start:stop]
        left_open = number == 0 and not aligned
        right_open = number == len(bounds) - 2 and not aligned
        placements = _placements(tau, segment, left_open, right_open)
        if not left_open and not right_open:
            if not placements:
                raise ValidationError(f"Segment {render_word(segment)} at level {level} is not a τ_{level}-image.",
                                      field=f'level[{level}]')
            if len(placements) > 1:
                raise PropertyViolation(f"Segment {render_word(segment)} is the image of several letters.",
                                        clause='recognizability', level=level + 1)
        identified = placements[0] if len(placements) == 1 else None
        if identified is not None:
            letters.append(identified[0])
        if start <= index < stop:
            if identified is None:
                reason = "no marker found" if not cuts else "edge segment matches several images"
                raise WindowTooShortError(f"Cannot recognise the level {level + 1} letter at the position: "
                                          f"{reason}.", level=level + 1, required=2)
            u, shift = identified
            covered = tau.image(u)[:shift + index - start]
            new_index = len(letters) - 1
            new_offset = sum(lengths[v - 1] for v in covered) + offset
    return tuple(letters), new_index, new_offset


def desubstitute_window(t: DirectiveSequence, word: Word, position: int, to_level: int,
                        aligned: bool = False) -> Desubstitution:
    """
    Recognise the level ``to_level`` letter covering ``word[position]``.

    Level 0 is read through the hat morphism τ_0; higher levels are cut where
    the last letter of the alphabet is followed by v1. ``aligned`` declares
    that both ends of the word are cutting points.
    """
    word = as_word(word)
    if not 0 <= position < len(word):
        raise ValidationError(f"Position {position} is outside the word of length {len(word)}.",
                              field='position')
    if to_level < 0:
        raise ValidationError(f"Level must be non-negative, got {to_level}.", field='to_level')
    if to_level == 0:
        return Desubstitution(0, word, position, 0)
    tau = t.morphism(0)
    if not is_hat(tau):
        raise PreconditionError("Desubstitution needs a hat morphism τ_0.", rule='hat', level=0)
    letters, index, offset = _hat_parse(tau, word, position)
    for level in range(1, to_level):
        letters, index, offset = _marker_step(t, level, letters, index, offset, aligned)
        logger.debug(f"Level {level + 1}: {render_word(letters)}, letter index {index}, offset {offset}.")
    return Desubstitution(to_level, letters, index, offset)


# ==================== SIGNALS ====================
def parse_mode(mode: Mode) -> Optional[int]:
    """``'inf'`` selects Property (P_∞); otherwise a positive k."""
    if isinstance(mode, str) and mode.strip().lower() in ('inf', 'infinity', '∞'):
        return None
    try:
        k = int(mode)
    except (TypeError, ValueError):
        raise ValidationError(f"Mode must be a positive integer or 'inf', got {mode!r}.", field='mode')
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}.", field='mode')
    return k


def _squares(i: int) -> Word:
    return tuple(t for t in range(1, i) for _ in range(2))


def mandated_contexts(i: int, marker: int, k: Optional[int]) -> set[Word]:
    """Predecessor contexts allowed for signal v_i: v_m v_1^2...v_{i-1}^2 v_i."""
    rv = {(marker,) + _squares(i) + (i,)}
    if k is None and i == 1:
        rv.add((marker, 1, 1))
    return rv


# ==================== BIFURCATION PROFILES ====================
@dataclass(frozen=True)
class LevelBifurcation:
    """At ``level`` both continuations read ``context`` and then split into the letters ``followers``."""
    level: int
    signal: int
    followers: tuple[int, ...]
    context: Word
    offset: int
    aligned: bool

    @property
    def conforming(self) -> bool:
        """Followers are v_i, v_{i+1} for the signal v_i."""
        return self.followers == (self.signal, self.signal + 1)

    def to_dict(self):
        return {
            'level': self.level,
            'signal': self.signal,
            'followers': list(self.followers),
            'context': list(self.context),
            'offset': self.offset,
            'aligned': self.aligned,
            'rendered': f"{render_word(self.context)} | "
                        f"{', '.join(f'v{letter}' for letter in self.followers)}"
        }


@dataclass(frozen=True)
class BifurcationProfile:
    """A right-special word and its bifurcation read at levels 1, 2, ... until the window runs out."""
    special: SpecialWord
    levels: tuple[LevelBifurcation, ...]

    @property
    def signals(self) -> tuple[int, ...]:
        return tuple(found.signal for found in self.levels)

    @property
    def top_level(self) -> int:
        return self.levels[-1].level if self.levels else 0

    @property
    def stable(self) -> bool:
        signals = self.signals
        return len(signals) >= 2 and signals[-1] == signals[-2]

    def at(self, level: int) -> Optional[LevelBifurcation]:
        if 1 <= level <= len(self.levels):
            return self.levels[level - 1]
        return None

    def stabilization_level(self) -> Optional[int]:
        """Lowest level from which the signal index stays constant."""
        signals = self.signals
        if not signals:
            return None
        start = len(signals) - 1
        while start > 0 and signals[start - 1] == signals[-1]:
            start -= 1
        return self.levels[start].level

    def to_dict(self):
        return {
            'word': list(self.special.word),
            'followers': list(self.special.followers),
            'signals': list(self.signals),
            'stabilization_level': self.stabilization_level(),
            'stable': self.stable,
            'levels': [found.to_dict() for found in self.levels]
        }


def _common_suffix(words) -> Word:
    shortest = min(len(w) for w in words)
    size = 0
    while size < shortest and len({w[len(w) - size - 1] for w in words}) == 1:
        size += 1
    return words[0][len(words[0]) - size:]


def _follower_window(table: LanguageTable, word: Word, follower: int, room: int) -> Word:
    """The longest-reaching occurrence of ``word`` + follower, continued by at most ``room`` letters."""
    target = word + (follower,)
    starts = table.occurrences(target)
    if not starts:
        return target
    start = max(starts, key=lambda p: int(table.reach[p]))
    stop = start + min(int(table.reach[start]), len(target) + room)
    return tuple(int(x) for x in table.text[start:stop])


def _level_bifurcation(t: DirectiveSequence, windows, position: int, level: int,
                       strict: bool) -> Optional[LevelBifurcation]:
    found = []
    for window in windows:
        try:
            d = desubstitute_window(t, window, position, level)
        except WindowTooShortError:
            return None
        except (ValidationError, PropertyViolation) as e:
            if strict:
                raise
            logger.warning(f"Desubstitution to level {level} stopped: {e.message}")
            return None
        if d.index == 0:
            return None
        found.append(d)
    context = _common_suffix([d.word[:d.index] for d in found])
    if not context:
        return None
    return LevelBifurcation(level, context[-1], tuple(sorted({d.letter for d in found})), context,
                            found[0].offset, len({d.offset for d in found}) == 1)


def profile_bifurcation(t: DirectiveSequence, table: LanguageTable, special: SpecialWord, top_level: int,
                        strict: bool = False) -> BifurcationProfile:
    """
    Desubstitute the point where ``special`` branches, level by level up to ``top_level``.

    Each follower is read in its own occurrence from the language text; the
    profile stops at the first level whose letters are not recognisable
    inside those windows. With ``strict`` a window that breaks
    recognisability raises instead of ending the profile.
    """
    room = 2 * max(t.image_lengths(0, top_level))
    windows = [_follower_window(table, special.word, follower, room) for follower in special.followers]
    levels = []
    for level in range(1, top_level + 1):
        found = _level_bifurcation(t, windows, len(special.word), level, strict)
        if found is None:
            break
        levels.append(found)
    return BifurcationProfile(special, tuple(levels))


def context_match(found: LevelBifurcation, contexts) -> Optional[bool]:
    """True when the context ends with one of ``contexts``, None when it is too short to tell."""
    context = found.context
    if any(len(context) >= len(c) and context[len(context) - len(c):] == c for c in contexts):
        return True
    if all(len(context) >= len(c) for c in contexts):
        return False
    return None


def _conforms(t: DirectiveSequence, found: LevelBifurcation) -> bool:
    contexts = mandated_contexts(found.signal, t.alphabet(found.level).size, None)
    return found.aligned and found.conforming and context_match(found, contexts) is True


def is_detected(t: DirectiveSequence, profile: BifurcationProfile) -> bool:
    """The branching is a v_i | v_i, v_{i+1} bifurcation behind its mandated context at level 1."""
    first = profile.at(1)
    return first is not None and _conforms(t, first)


def branch_signal(t: DirectiveSequence, profile: BifurcationProfile) -> Optional[int]:
    """Signal at the highest level where the bifurcation still has the mandated shape."""
    for found in reversed(profile.levels):
        if _conforms(t, found):
            return found.signal
    return None


@dataclass(frozen=True)
class Branch:
    """Surviving right-special words grouped by the signal their bifurcation stabilizes to."""
    signal: Optional[int]
    profiles: tuple[BifurcationProfile, ...]

    @property
    def degree(self) -> int:
        return max(profile.special.degree for profile in self.profiles)

    def to_dict(self):
        return {
            'signal': self.signal,
            'degree': self.degree,
            'words': len(self.profiles),
            'profiles': [profile.to_dict() for profile in self.profiles]
        }


def group_branches(t: DirectiveSequence, table: LanguageTable, survivors: list[SpecialWord], level: int,
                   top_level: int):
    """Branches and the profiles that do not show a mandated bifurcation at level 1."""
    if level != 0 or top_level < 1 or not is_hat(t.morphism(0)):
        logger.info("Bifurcations are not desubstituted here; every surviving word is its own branch.")
        return [Branch(None, (BifurcationProfile(s, ()),)) for s in survivors], []
    groups, transients = {}, []
    for special in survivors:
        profile = profile_bifurcation(t, table, special, top_level)
        if is_detected(t, profile):
            groups.setdefault(branch_signal(t, profile), []).append(profile)
        else:
            transients.append(profile)
    return [Branch(signal, tuple(groups[signal])) for signal in sorted(groups)], transients


# ==================== RIGHT-SPECIAL FACTORS ====================
def _suffix(word: Word, n: int) -> Word:
    return word[len(word) - n:]


def _resolve_gap(m_max: int, gap: Optional[int], gap_fraction: float) -> int:
    if m_max < 1:
        raise ValidationError(f"m_max must be positive, got {m_max}.", field='m_max')
    if gap is None:
        gap = int(round(gap_fraction * m_max))
    if not 0 <= gap < m_max:
        raise ValidationError(f"Stability gap must lie in [0, {m_max}), got {gap}.", field='gap')
    return gap


def surviving_words(special: dict[int, list[SpecialWord]], m_max: int, gap: int):
    """
    Suffixes of length m_max - gap that stay right-special from that length up
    to m_max, and the right-special words of length m_max ending with one.
    """
    base = m_max - gap
    tails = {_suffix(s.word, base) for s in special[m_max]}
    kept = {tail for tail in tails
            if all(any(_suffix(s.word, base) == tail for s in special[m]) for m in range(base, m_max + 1))}
    return kept, [s for s in special[m_max] if _suffix(s.word, base) in kept]


@dataclass
class RightSpecialReport:
    level: int
    m_max: int
    gap: int
    horizon: int
    complexity: list[int]
    special: dict[int, list[SpecialWord]]
    identity_failures: list[int]
    suffix_branches: int
    branches: list[Branch]
    transients: list[BifurcationProfile] = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return not self.identity_failures

    @property
    def stabilized_branches(self) -> int:
        return len(self.branches)

    @property
    def branch_degrees(self) -> list[int]:
        return [b.degree for b in self.branches]

    def to_dict(self, include_words=False):
        entries = []
        for m in range(1, self.m_max + 1):
            entry = {
                'm': m,
                'p': self.complexity[m - 1],
                'special': len(self.special[m]),
                'degrees': sorted(s.degree for s in self.special[m])
            }
            if include_words:
                entry['words'] = [s.to_dict() for s in self.special[m]]
            entries.append(entry)
        return {
            'level': self.level,
            'm_max': self.m_max,
            'gap': self.gap,
            'horizon': self.horizon,
            'identity_holds': self.identity_holds,
            'identity_failures': self.identity_failures,
            'suffix_branches': self.suffix_branches,
            'stabilized_branches': self.stabilized_branches,
            'branch_degrees': self.branch_degrees,
            'branches': [b.to_dict() for b in self.branches],
            'transients': len(self.transients),
            'entries': entries
        }


def right_special_report(t: DirectiveSequence, m_max: int, gap: Optional[int] = None, level: int = 0,
                         gap_fraction: float = 0.25, lift_depth: int = 3, budget: int = 12,
                         workers: int = 1, max_text_length: int = 5_000_000) -> RightSpecialReport:
    """
    Complexity, right-special words and the asymptotic branches they stabilize into.

    ``suffix_branches`` counts the suffixes that stay right-special across the
    gap; the branches group the surviving words of length ``m_max`` by the
    signal their bifurcation point desubstitutes to, up to ``lift_depth``
    levels above ``level``.
    """
    gap = _resolve_gap(m_max, gap, gap_fraction)
    table = language_table(t, m_max + 1, level, workers=workers, max_text_length=max_text_length,
                           budget=budget)
    counts, special = scan_language(table, m_max + 1)
    failures = [m for m in range(1, m_max + 1)
                if counts[m] - counts[m - 1] != sum(s.degree - 1 for s in special[m])]
    if failures:
        logger.warning(f"Complexity identity fails at lengths {failures[:10]}.")

    kept, survivors = surviving_words(special, m_max, gap)
    top = min(table.horizon - 1, level + lift_depth)
    branches, transients = group_branches(t, table, survivors, level, top)
    if transients:
        logger.warning(f"{len(transients)} surviving right-special words show no mandated bifurcation "
                       f"at level 1.")
    report = RightSpecialReport(level, m_max, gap, table.horizon, counts[:m_max], special, failures,
                                len(kept), branches, transients)
    logger.info(f"Right-special report at level {level}: m_max {m_max}, {report.stabilized_branches} branches, "
                f"degrees {report.branch_degrees}.")
    return report


# ==================== SIGNAL AUDIT ====================
@dataclass(frozen=True)
class AuditEntry:
    word: Word
    bifurcation: LevelBifurcation
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_dict(self):
        rv = self.bifurcation.to_dict()
        rv['word'] = list(self.word)
        rv['ok'] = self.ok
        if self.problems:
            rv['problems'] = list(self.problems)
        return rv


@dataclass
class SignalAudit:
    k: Optional[int]
    n_max: int
    m_max: int
    entries: list[AuditEntry]
    profiles: list[BifurcationProfile]
    transients: list[BifurcationProfile] = field(default_factory=list)

    @property
    def counterexamples(self) -> list[AuditEntry]:
        return [e for e in self.entries if not e.ok]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self):
        return {
            'mode': self.k if self.k is not None else 'inf',
            'n_max': self.n_max,
            'm_max': self.m_max,
            'passed': self.passed,
            'counterexamples': [e.to_dict() for e in self.counterexamples],
            'entries': [e.to_dict() for e in self.entries],
            'branches': [p.to_dict() for p in self.profiles],
            'transients': len(self.transients)
        }


def _audit_problems(t: DirectiveSequence, found: LevelBifurcation, k: Optional[int]) -> tuple[str, ...]:
    bound = found.level if k is None else k
    i, problems = found.signal, []
    if not found.aligned:
        problems.append("continuations split at different offsets inside the letters")
    if i > bound:
        problems.append(f"signal v{i} has index above {bound}")
    if not found.conforming:
        followers = ', '.join(f'v{letter}' for letter in found.followers)
        problems.append(f"followers {followers} are not v{i}, v{i + 1}")
    # long-lived v1 bifurcations also sit behind v_m v1 v1
    if i > 1 and context_match(found, mandated_contexts(i, t.alphabet(found.level).size, k)) is False:
        problems.append(f"context {render_word(found.context)} does not end with the mandated predecessor")
    return tuple(problems)


def signal_audit(t: DirectiveSequence, mode: Mode, n_max: int, m_max: int = 64, gap: Optional[int] = None,
                 gap_fraction: float = 0.25, workers: int = 1, max_text_length: int = 5_000_000,
                 budget: int = 12) -> SignalAudit:
    """
    Audit the long-lived right-special words level by level.

    The words of length ``m_max`` that survive the gap and show a mandated
    bifurcation at level 1 are desubstituted at their branching point up to
    ``n_max``; at every level reached the signal index, the follower pair
    and the predecessor context are checked.
    """
    k = parse_mode(mode)
    if n_max < 1:
        raise ValidationError(f"n_max must be positive, got {n_max}.", field='n_max')
    gap = _resolve_gap(m_max, gap, gap_fraction)
    horizon = max(language_horizon(t, m_max + 1), n_max + 1)
    verdict = check_pinf(t, horizon + 1) if k is None else check_pk(t, k, horizon + 1)
    if isinstance(verdict, PropertyFailure):
        raise PropertyViolation(f"Sequence fails the property before auditing: {verdict.message}",
                                clause=verdict.clause, level=verdict.level, letter=verdict.letter)
    table = language_table(t, m_max + 1, horizon=horizon, workers=workers, max_text_length=max_text_length,
                           budget=budget)
    _, special = scan_language(table, m_max + 1)
    _, survivors = surviving_words(special, m_max, gap)
    members, transients, entries = [], [], []
    for word in survivors:
        profile = profile_bifurcation(t, table, word, n_max, strict=True)
        if not is_detected(t, profile):
            transients.append(profile)
            continue
        members.append(profile)
        entries.extend(AuditEntry(word.word, found, _audit_problems(t, found, k)) for found in profile.levels)
    audit = SignalAudit(k, n_max, m_max, entries, members, transients)
    logger.info(f"Signal audit: {len(members)} branching words, {len(entries)} level readings, "
                f"{len(transients)} transients.")
    if not audit.passed:
        logger.warning(f"Signal audit found {len(audit.counterexamples)} counterexamples.")
    return audit


# ==================== ASYMPTOTIC PAIRS ====================
@dataclass(frozen=True)
class AsymptoticPairWindow:
    """``x_window[j]`` and ``y_window[j]`` sit at position ``alpha + j`` of the pair."""
    i: int
    level: int
    alpha: int
    x_window: Word
    y_window: Word
    x_preimage: Word
    y_preimage: Word

    def agree_before_zero(self) -> bool:
        split = -self.alpha
        return self.x_window[:split] == self.y_window[:split]

    def differ_at_zero(self) -> bool:
        split = -self.alpha
        return (split < len(self.x_window) and split < len(self.y_window)
                and self.x_window[split] != self.y_window[split])

    def to_dict(self):
        return {
            'i': self.i,
            'level': self.level,
            'alpha': self.alpha,
            'x_preimage': list(self.x_preimage),
            'y_preimage': list(self.y_preimage),
            'x_window': list(self.x_window),
            'y_window': list(self.y_window)
        }


def _check_window_size(t: DirectiveSequence, words, level: int, n: int, max_window_length: int) -> None:
    lengths = t.image_lengths(0, level)
    size = max(sum(lengths[v - 1] for v in word) for word in words)
    if size > max_window_length:
        raise BudgetExceededError(f"Pair windows from level {level} would hold {size} letters, "
                                  f"limit {max_window_length}.",
                                  rule='max_window_length', level=n, limit=max_window_length)


def asymptotic_pair_windows(t: DirectiveSequence, i: int, n: int, mode: Mode = 1,
                            max_window_length: int = 5_000_000) -> AsymptoticPairWindow:
    """
    Windows of the i-th left-asymptotic pair at level n.

    The level-n words v1^2...v_{i-1}^2 v_i v_i and v1^2...v_{i-1}^2 v_i v_{i+1}
    alternate between the two points with the parity of n; the offset grows
    by |τ_{[0,n)}(v1^2...v_{i-1}^2 v_i)| at each level.
    """
    k = parse_mode(mode)
    if i < 1 or (k is not None and i > k):
        raise ValidationError(f"Component index must lie in 1..{k}, got {i}.", field='i')
    start = 1 if k is not None else i
    if n < start:
        raise ValidationError(f"Level must be at least {start}, got {n}.", field='n')
    head = _squares(i) + (i,)
    square_word, step_word = head + (i,), head + (i + 1,)
    if i + 1 > t.alphabet(start).size:
        raise ValidationError(f"Level {start} has no letter v{i + 1}.", field='i')
    for level in sorted({start, n}):
        _check_window_size(t, (square_word, step_word), level, n, max_window_length)
    alpha = 0
    for level in range(start, n + 1):
        if level == start:
            square = t.apply(head + (i,), level, 0)
            step = t.apply(head + (i + 1,), level, 0)
            alpha = -common_prefix_length(square, step)
        else:
            lengths = t.image_lengths(0, level)
            alpha -= sum(lengths[v - 1] for v in head)
    if (n - start) % 2 == 0:
        x_pre, y_pre = square_word, step_word
    else:
        x_pre, y_pre = step_word, square_word
    return AsymptoticPairWindow(i, n, alpha, t.apply(x_pre, n, 0), t.apply(y_pre, n, 0), x_pre, y_pre)


def windows_allowed(t: DirectiveSequence, window: AsymptoticPairWindow) -> bool:
    """Both windows are images of allowed level-n words."""
    return (is_allowed(t, window.x_preimage, window.level)
            and is_allowed(t, window.y_preimage, window.level))


def render_pair_window(window: AsymptoticPairWindow, radius: int = 12) -> str:
    """Two aligned rows around position 0 with an offset ruler underneath."""
    low = max(window.alpha, -radius)
    high = min(window.alpha + min(len(window.x_window), len(window.y_window)), radius)
    cells = range(low, high)
    x_cells = [str(window.x_window[p - window.alpha]) for p in cells]
    y_cells = [str(window.y_window[p - window.alpha]) for p in cells]
    ruler = [str(p) if p % 5 == 0 else '.' for p in cells]
    width = max(len(c) for c in x_cells + y_cells + ruler)
    marker = ['^' if p == 0 else '' for p in cells]

    def row(values):
        return ' '.join(v.rjust(width) for v in values)

    return '\n'.join([
        f"i={window.i} n={window.level} alpha={window.alpha}",
        f"x  {row(x_cells)}",
        f"y  {row(y_cells)}",
        f"   {row(marker)}",
        f"   {row(ruler)}"
    ])
