# core_words.py
"""
Words over level alphabets, morphisms between consecutive levels and
directive sequences.

Letters are dense 1-based indices: letter ``i`` of the alphabet at level ``n``
stands for ``v_{i,n}``. Words are plain tuples of letters.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from utils.exceptions import ValidationError, WindowTooShortError

logger = logging.getLogger(__name__)

Word = tuple[int, ...]


# ==================== ALPHABETS & WORDS ====================
@dataclass(frozen=True)
class LevelAlphabet:
    level: int
    size: int

    def __post_init__(self):
        if self.level < 0:
            raise ValidationError(f"Alphabet level must be non-negative, got {self.level}.", field='level')
        if self.size < 1:
            raise ValidationError(f"Alphabet size must be positive, got {self.size}.", field='size')

    def letters(self):
        return range(1, self.size + 1)

    def __contains__(self, letter):
        return 1 <= letter <= self.size


def as_word(values: Iterable[int]) -> Word:
    return tuple(int(v) for v in values)


def render_word(word: Word) -> str:
    """Run-length text form, e.g. ``v1^2 v2``."""
    if not word:
        return 'ε'
    parts = []
    run_letter, run_length = word[0], 0
    for letter in word:
        if letter == run_letter:
            run_length += 1
            continue
        parts.append(f"v{run_letter}" if run_length == 1 else f"v{run_letter}^{run_length}")
        run_letter, run_length = letter, 1
    parts.append(f"v{run_letter}" if run_length == 1 else f"v{run_letter}^{run_length}")
    return ' '.join(parts)


def factors(word: Word, m: int) -> set[Word]:
    """All contiguous subwords of length m."""
    if m < 0:
        raise ValidationError(f"Factor length must be non-negative, got {m}.", field='m')
    word = tuple(word)
    return {word[i:i + m] for i in range(len(word) - m + 1)}


def common_prefix_length(u: Word, w: Word) -> int:
    n = 0
    for a, b in zip(u, w):
        if a != b:
            break
        n += 1
    return n


def prefix_dependent(u: Word, w: Word) -> bool:
    """True when one of the words is a prefix of the other."""
    n = min(len(u), len(w))
    return tuple(u[:n]) == tuple(w[:n])


# ==================== MORPHISMS ====================
@dataclass(frozen=True)
class Morphism:
    source: LevelAlphabet
    target: LevelAlphabet
    images: tuple[Word, ...]

    def __post_init__(self):
        images = tuple(as_word(image) for image in self.images)
        object.__setattr__(self, 'images', images)
        if len(images) != self.source.size:
            raise ValidationError(
                f"Expected {self.source.size} images, got {len(images)}.", field='images'
            )
        for index, image in enumerate(images):
            if not image:
                raise ValidationError(f"Image of letter {index + 1} is empty.", field=f'images[{index}]')
            outside = [a for a in image if a not in self.target]
            if outside:
                raise ValidationError(
                    f"Image of letter {index + 1} uses letters {sorted(set(outside))} "
                    f"outside 1..{self.target.size}.",
                    field=f'images[{index}]'
                )

    @classmethod
    def from_images(cls, images, source_level=1, target_size=None, target_level=None):
        images = [as_word(image) for image in images]
        if target_size is None:
            target_size = max((max(image) for image in images if image), default=1)
        if target_level is None:
            target_level = source_level - 1
        return cls(LevelAlphabet(source_level, len(images)), LevelAlphabet(target_level, target_size), images)

    @classmethod
    def identity(cls, alphabet: LevelAlphabet):
        return cls(alphabet, alphabet, tuple((a,) for a in alphabet.letters()))

    def image(self, letter: int) -> Word:
        if letter not in self.source:
            raise ValidationError(f"Letter {letter} is outside 1..{self.source.size}.", field='letter')
        return self.images[letter - 1]

    def apply(self, word: Word) -> Word:
        out = []
        for letter in word:
            out.extend(self.image(letter))
        return tuple(out)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(image) for image in self.images)

    def incidence(self) -> np.ndarray:
        """Rows are source letters, columns target letters."""
        rows = [np.bincount(np.asarray(image) - 1, minlength=self.target.size) for image in self.images]
        return np.vstack(rows).astype(np.int64)

    def is_proper(self) -> bool:
        return len({image[0] for image in self.images}) == 1 and len({image[-1] for image in self.images}) == 1

    def at_level(self, target_level: int):
        """The same images with the target alphabet moved to ``target_level``."""
        shift = self.source.level - self.target.level
        return Morphism(
            LevelAlphabet(target_level + shift, self.source.size),
            LevelAlphabet(target_level, self.target.size),
            self.images
        )

    def to_dict(self):
        rv = {
            'source_level': self.source.level,
            'source_size': self.source.size,
            'target_size': self.target.size,
            'images': [list(image) for image in self.images]
        }
        if self.source.level - self.target.level != 1:
            rv['target_level'] = self.target.level
        return rv

    @classmethod
    def from_dict(cls, data, location='morphism'):
        if not isinstance(data, dict):
            raise ValidationError("Morphism must be a JSON object.", field=location)
        missing = [key for key in ('source_level', 'source_size', 'target_size', 'images') if key not in data]
        if missing:
            raise ValidationError(f"Missing keys: {', '.join(missing)}.", field=location)
        images = data['images']
        if not isinstance(images, list) or not all(isinstance(image, list) for image in images):
            raise ValidationError("Images must be a list of letter lists.", field=f'{location}.images')
        try:
            source_level = int(data['source_level'])
            target_level = int(data.get('target_level', source_level - 1))
            return cls(
                LevelAlphabet(source_level, int(data['source_size'])),
                LevelAlphabet(target_level, int(data['target_size'])),
                images
            )
        except ValidationError as e:
            raise ValidationError(e.message, field=f'{location}.{e.field}' if e.field else location)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Non-integer value: {e}", field=location)


@dataclass(frozen=True)
class MorphismReport:
    incidence: tuple[tuple[int, ...], ...]
    primitive: bool
    left_proper: bool
    right_proper: bool
    hat: bool
    injective_on_symbols: bool

    def to_dict(self):
        return {
            'incidence': [list(row) for row in self.incidence],
            'primitive': self.primitive,
            'left_proper': self.left_proper,
            'right_proper': self.right_proper,
            'hat': self.hat,
            'injective_on_symbols': self.injective_on_symbols
        }


def matrix_rows(matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in np.asarray(matrix).tolist())


def is_hat(morphism: Morphism) -> bool:
    seen = set()
    for image in morphism.images:
        letters = set(image)
        if letters & seen:
            return False
        seen |= letters
    return True


def analyze_morphism(morphism: Morphism) -> MorphismReport:
    incidence = morphism.incidence()
    return MorphismReport(
        incidence=matrix_rows(incidence),
        primitive=bool((incidence > 0).all()),
        left_proper=len({image[0] for image in morphism.images}) == 1,
        right_proper=len({image[-1] for image in morphism.images}) == 1,
        hat=is_hat(morphism),
        injective_on_symbols=len(set(morphism.images)) == len(morphism.images)
    )


def compose(outer: Morphism, inner: Morphism) -> Morphism:
    """``outer ∘ inner``: each letter goes through inner first."""
    if inner.target != outer.source:
        raise ValidationError(
            f"Cannot compose: inner target {inner.target} differs from outer source {outer.source}.",
            field='alphabet'
        )
    return Morphism(inner.source, outer.target, tuple(outer.apply(image) for image in inner.images))


# ==================== DIRECTIVE SEQUENCES ====================
Extension = Callable[[int], Morphism]


@dataclass(frozen=True)
class DirectiveSequence:
    """
    τ_0, τ_1, ... where τ_n maps words over level n+1 to words over level n.

    ``extension`` optionally produces τ_n for n past the stored morphisms.
    """
    morphisms: tuple[Morphism, ...]
    extension: Optional[Extension] = field(default=None, compare=False, repr=False)
    name: str = field(default='', compare=False)

    def __post_init__(self):
        morphisms = tuple(self.morphisms)
        object.__setattr__(self, 'morphisms', morphisms)
        if not morphisms:
            raise ValidationError("A directive sequence needs at least one morphism.", field='morphisms')
        for n, tau in enumerate(morphisms):
            self._check_link(n, tau, morphisms[n - 1] if n else None)

    @staticmethod
    def _check_link(n, tau, previous):
        if tau.target.level != n or tau.source.level != n + 1:
            raise ValidationError(
                f"Morphism {n} maps level {tau.source.level} to {tau.target.level}, expected {n + 1} to {n}.",
                field=f'morphisms[{n}]'
            )
        if previous is not None and previous.source != tau.target:
            raise ValidationError(
                f"Morphism {n} target {tau.target.size} letters, previous source has {previous.source.size}.",
                field=f'morphisms[{n}]'
            )

    def __len__(self):
        return len(self.morphisms)

    @property
    def is_extendable(self) -> bool:
        return self.extension is not None

    def morphism(self, n: int) -> Morphism:
        if n < 0:
            raise ValidationError(f"Level must be non-negative, got {n}.", field='level')
        if n < len(self.morphisms):
            return self.morphisms[n]
        if self.extension is None:
            raise WindowTooShortError(
                f"Directive sequence stops at level {len(self.morphisms)}, level {n} requested.",
                level=n, required=n + 1
            )
        tau = self.extension(n)
        previous = self.morphism(n - 1)
        self._check_link(n, tau, previous)
        return tau

    def has_level(self, n: int) -> bool:
        return n < len(self.morphisms) or self.extension is not None

    def alphabet(self, level: int) -> LevelAlphabet:
        if level == 0:
            return self.morphism(0).target
        return self.morphism(level - 1).source

    def extended(self, count: int):
        """A copy holding at least ``count`` explicit morphisms."""
        if count <= len(self.morphisms):
            return self
        return DirectiveSequence(
            tuple(self.morphism(n) for n in range(count)), self.extension, self.name
        )

    def window(self, start: int, stop: int) -> Morphism:
        """τ_{[start, stop)} = τ_start ∘ ... ∘ τ_{stop-1}."""
        if not 0 <= start < stop:
            raise ValidationError(f"Invalid window [{start}, {stop}).", field='window')
        result = self.morphism(stop - 1)
        for n in range(stop - 2, start - 1, -1):
            result = compose(self.morphism(n), result)
        return result

    def apply(self, word: Word, from_level: int, to_level: int) -> Word:
        """Image of a level ``from_level`` word at level ``to_level``."""
        if to_level > from_level:
            raise ValidationError(f"Cannot push level {from_level} up to {to_level}.", field='to_level')
        for n in range(from_level - 1, to_level - 1, -1):
            word = self.morphism(n).apply(word)
        return tuple(word)

    def image_lengths(self, start: int, stop: int) -> tuple[int, ...]:
        """|τ_{[start, stop)}(v)| for each letter v at level stop, without building words."""
        lengths = np.ones(self.alphabet(start).size, dtype=object)
        for n in range(start, stop):
            lengths = self.morphism(n).incidence().astype(object) @ lengths
        return tuple(int(x) for x in lengths)

    def to_dict(self):
        rv = {'morphisms': [tau.to_dict() for tau in self.morphisms]}
        if self.name:
            rv['name'] = self.name
        return rv

    @classmethod
    def from_dict(cls, data, location='sequence'):
        if not isinstance(data, dict) or not isinstance(data.get('morphisms'), list):
            raise ValidationError("Directive sequence must be an object with a 'morphisms' list.", field=location)
        morphisms = tuple(
            Morphism.from_dict(item, location=f'{location}.morphisms[{n}]')
            for n, item in enumerate(data['morphisms'])
        )
        return cls(morphisms, name=data.get('name', ''))


def stationary_extension(morphism: Morphism) -> Extension:
    """Extension rule repeating one morphism at every further level."""
    def extension(n):
        return morphism.at_level(n)
    return extension
