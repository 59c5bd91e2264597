# constructions.py
"""
Constructive recipes on Bratteli diagrams: amplification with an
intertwining certificate, orderings with Property (P_k) and (P_∞), the
Toeplitz-preserving morphisms and the subexponential-complexity family,
with a validator for each property.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from bratteli import (BratteliDiagram, IntertwiningCertificate,
                      OrderedBratteliDiagram, ordering_from_words,
                      read_morphisms, validate_diagram)
from core_words import (DirectiveSequence, LevelAlphabet, Morphism, Word,
                        analyze_morphism, is_hat, matrix_rows, prefix_dependent)
from utils.exceptions import (BudgetExceededError, PreconditionError,
                              ValidationError, WindowTooShortError)

logger = logging.getLogger(__name__)


class Clause:
    HAT = 'hat'
    PRIMITIVE = '1-primitive'
    PREFIX_SHORT = '2-prefix'
    PREFIX_LONG = '3-prefix'
    SUFFIX = '4-suffix'
    FACTOR = '4-factor'
    EQUAL_LENGTHS = 'equal-lengths'
    TOEPLITZ_IMAGE = 'toeplitz-image'
    CLASS_FOLLOW = 'class-follow'
    CLASS_FOLLOWERS = 'class-followers'
    PREFIX_INDEPENDENCE = 'prefix-independence'

    @classmethod
    def all(cls):
        return [cls.HAT, cls.PRIMITIVE, cls.PREFIX_SHORT, cls.PREFIX_LONG, cls.SUFFIX, cls.FACTOR,
                cls.EQUAL_LENGTHS, cls.TOEPLITZ_IMAGE, cls.CLASS_FOLLOW, cls.CLASS_FOLLOWERS,
                cls.PREFIX_INDEPENDENCE]


# ==================== VERDICTS ====================
@dataclass(frozen=True)
class PropertyFailure:
    clause: str
    level: int
    letter: Optional[int]
    message: str

    def __post_init__(self):
        if self.clause not in Clause.all():
            raise ValidationError(f"Unknown clause '{self.clause}'.", field='clause')

    def to_dict(self):
        return {'passed': False, 'clause': self.clause, 'level': self.level,
                'letter': self.letter, 'message': self.message}


@dataclass(frozen=True)
class ImageDecomposition:
    level: int
    vertex: int
    kind: str
    prefix: Word
    interior: Word
    suffix: int

    def to_dict(self):
        return {'level': self.level, 'vertex': self.vertex, 'kind': self.kind,
                'prefix': list(self.prefix), 'interior': list(self.interior), 'suffix': self.suffix}


@dataclass(frozen=True)
class PkWitness:
    """Per-image prefix/interior/suffix split; ``k`` is None for Property (P_∞)."""
    k: Optional[int]
    levels: int
    decompositions: tuple[ImageDecomposition, ...]

    def to_dict(self):
        return {'passed': True, 'k': self.k if self.k is not None else 'inf', 'levels': self.levels,
                'decompositions': [d.to_dict() for d in self.decompositions]}


@dataclass(frozen=True)
class ToeplitzWitness:
    k: int
    levels: int
    image_lengths: tuple[int, ...]

    def to_dict(self):
        return {'passed': True, 'k': self.k, 'levels': self.levels, 'image_lengths': list(self.image_lengths)}


Verdict = Union[PkWitness, ToeplitzWitness, PropertyFailure]


def pk_prefix(i: int, k: int) -> Word:
    """Mandated prefix of the image of v_i: v_1^2...v_{i-1}^2 v_i...v_{k+1}, or v_1^i v_2 past k+1."""
    if i <= k + 1:
        return tuple(t for t in range(1, i) for _ in range(2)) + tuple(range(i, k + 2))
    return (1,) * i + (2,)


def _k_at(k: Optional[int], n: int) -> int:
    return n if k is None else k


# ==================== AMPLIFICATION ====================
def surjection(size: int, base: int) -> tuple[int, ...]:
    """Round-robin copy map g: copy w of W (size ``size``) onto vertex ((w-1) mod base)+1."""
    return tuple((w - 1) % base + 1 for w in range(1, size + 1))


def copy_matrix(size: int, base: int) -> np.ndarray:
    """B(w, v) = 1 exactly when copy w maps to vertex v."""
    b = np.zeros((size, base), dtype=object)
    for w, v in enumerate(surjection(size, base), start=1):
        b[w - 1, v - 1] = 1
    return b


def vertex_copy_factorization(matrix, size: int):
    """
    Split A (|U_{n+1}| x |U_n|) through ``size`` copies of the columns:
    returns (B, C) with B (size x |U_n|) the copy map and C (|U_{n+1}| x size)
    spreading A(u, v) evenly over the copies of v, lower copies first.
    """
    a = np.asarray(matrix, dtype=object)
    rows, cols = a.shape
    if size < cols:
        raise ValidationError(f"Cannot split {cols} vertices into {size} copies.", field='size')
    g = surjection(size, cols)
    b = copy_matrix(size, cols)
    c = np.zeros((rows, size), dtype=object)
    for v in range(1, cols + 1):
        copies = [w for w, image in enumerate(g, start=1) if image == v]
        for u in range(rows):
            q, r = divmod(int(a[u, v - 1]), len(copies))
            for index, w in enumerate(copies):
                c[u, w - 1] = q + (1 if index < r else 0)
    return b, c


def amplify_diagram(d: BratteliDiagram, k: int, level_margin: int = 1):
    """
    Telescope ``d`` until matrix j has entries >= s_j (s_{j+1} + k + 2), with
    s_j = max(j + level_margin, k + 2, |U_j|), then route each level through
    s_j vertex copies. Returns the derived diagram and its certificate.
    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}.", field='k')
    report = validate_diagram(d)
    if not report.valid:
        raise ValidationError("Diagram is not valid.", field='diagram', errors=report.violations)
    if d.depth < 2:
        raise WindowTooShortError(f"Amplification needs depth at least 2, got {d.depth}.",
                                  level=d.depth, required=2)

    def target(j, level):
        return max(j + level_margin, k + 2, d.size(level))

    keep = [0, 1]
    while keep[-1] < d.depth:
        j, start = len(keep) - 1, keep[-1]
        s_j = target(j, start)
        chosen, product = None, None
        for stop in range(start + 1, d.depth + 1):
            product = d.product(start, stop)
            if min(product.flat) >= s_j * (target(j + 1, stop) + k + 2):
                chosen = stop
                break
        if chosen is None:
            if len(keep) >= 3:
                logger.info(f"Amplification stops at original level {start}: tail too short")
                break
            if min(product.flat) == 0:
                raise PreconditionError(
                    f"Matrices {start}..{d.depth - 1} never become positive; the window is not simple.",
                    rule='non_simple_window', level=start
                )
            raise WindowTooShortError(
                f"Telescoping from level {start} never reaches entries {s_j}*(next size+{k + 2}).",
                level=start
            )
        keep.append(chosen)

    sizes = [1] + [target(j, level) for j, level in enumerate(keep) if j > 0]
    b_matrices, c_matrices, derived = [copy_matrix(1, 1)], [], []
    for j in range(1, len(keep)):
        a = d.product(keep[j - 1], keep[j])
        _, c = vertex_copy_factorization(a, sizes[j - 1])
        b_next = copy_matrix(sizes[j], a.shape[0])
        c_matrices.append(c)
        b_matrices.append(b_next)
        derived.append(b_next @ c)

    logger.info(f"Amplified diagram: kept levels {keep}, sizes {sizes}")
    certificate = IntertwiningCertificate(
        tuple(keep), tuple(matrix_rows(b) for b in b_matrices), tuple(matrix_rows(c) for c in c_matrices)
    )
    return BratteliDiagram(tuple(sizes), tuple(matrix_rows(m) for m in derived)), certificate


# ==================== PROPERTY (P_k) / (P_∞) ORDERINGS ====================
def _pk_preconditions(d: BratteliDiagram, k: Optional[int]) -> None:
    report = validate_diagram(d)
    if not report.valid:
        raise ValidationError("Diagram is not valid.", field='diagram', errors=report.violations)
    for n in range(1, d.depth):
        kk, m = _k_at(k, n), d.size(n)
        a = d.matrix(n)
        if m <= kk:
            raise PreconditionError(f"Level {n} has {m} vertices, needs more than {kk}.",
                                    rule='vertex_count', level=n)
        if m < kk + 2:
            raise PreconditionError(
                f"Level {n} has {m} vertices; the last letter would close the prefix and precede v1.",
                rule='marker', level=n
            )
        for i in range(1, d.size(n + 1) + 1):
            row = a[i - 1]
            if min(row) <= 0:
                raise PreconditionError(f"Row {i} of matrix {n} has a zero entry.",
                                        rule='positive_entries', level=n, vertex=i)
            if i <= kk + 1 and any(row[j - 1] < 2 for j in range(1, i)):
                raise PreconditionError(f"Row {i} of matrix {n} needs entries >= 2 before column {i}.",
                                        rule='short_rows', level=n, vertex=i)
            if i > kk + 1 and row[0] < i:
                raise PreconditionError(f"Entry ({i},1) of matrix {n} is {row[0]} < {i}.",
                                        rule='first_column', level=n, vertex=i)


def arrange_image(row, prefix: Word) -> Word:
    """``prefix`` followed by the remaining letters of ``row`` in ascending blocks."""
    blocks = []
    for t, count in enumerate(row, start=1):
        rest = int(count) - prefix.count(t)
        if rest < 0:
            raise PreconditionError(f"Prefix uses letter {t} {prefix.count(t)} times, row allows {count}.",
                                    rule='row_too_small')
        blocks.extend([t] * rest)
    return tuple(prefix) + tuple(blocks)


def _level_zero_words(d: BratteliDiagram):
    return tuple((1,) * int(row[0]) for row in d.matrices[0])


def _assign_ordering(d: BratteliDiagram, k: Optional[int]) -> OrderedBratteliDiagram:
    _pk_preconditions(d, k)
    words = [_level_zero_words(d)]
    for n in range(1, d.depth):
        kk = _k_at(k, n)
        words.append(tuple(arrange_image(row, pk_prefix(i, kk))
                           for i, row in enumerate(d.matrices[n], start=1)))
    return ordering_from_words(d, words)


def assign_pk_ordering(d: BratteliDiagram, k: int) -> OrderedBratteliDiagram:
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}.", field='k')
    return _assign_ordering(d, k)


def assign_pinf_ordering(d: BratteliDiagram) -> OrderedBratteliDiagram:
    return _assign_ordering(d, None)


def check_property(t: DirectiveSequence, k: Optional[int], levels: Optional[int] = None) -> Verdict:
    """Property (P_k), or (P_∞) when ``k`` is None, on the first ``levels`` morphisms."""
    count = len(t) if levels is None else levels
    if not is_hat(t.morphism(0)):
        return PropertyFailure(Clause.HAT, 0, None, "τ_0 is not a hat morphism.")
    decompositions = []
    for n in range(1, count):
        tau, kk = t.morphism(n), _k_at(k, n)
        m = tau.target.size
        if not analyze_morphism(tau).primitive:
            return PropertyFailure(Clause.PRIMITIVE, n, None, f"τ_{n} is not primitive.")
        for i, image in enumerate(tau.images, start=1):
            prefix = pk_prefix(i, kk)
            clause = Clause.PREFIX_SHORT if i <= kk + 1 else Clause.PREFIX_LONG
            if image[:len(prefix)] != prefix:
                return PropertyFailure(clause, n, i, f"τ_{n}(v{i}) does not start with the mandated prefix.")
            if image[-1] != m:
                return PropertyFailure(Clause.SUFFIX, n, i, f"τ_{n}(v{i}) ends with v{image[-1]}, not v{m}.")
            if any(a == m and b == 1 for a, b in zip(image, image[1:])):
                return PropertyFailure(Clause.FACTOR, n, i, f"τ_{n}(v{i}) contains v{m} v1.")
            decompositions.append(ImageDecomposition(
                n, i, 'short' if i <= kk + 1 else 'long', prefix, image[len(prefix):-1], image[-1]
            ))
    return PkWitness(k, count, tuple(decompositions))


def check_pk(t: DirectiveSequence, k: int, levels: Optional[int] = None) -> Verdict:
    return check_property(t, k, levels)


def check_pinf(t: DirectiveSequence, levels: Optional[int] = None) -> Verdict:
    return check_property(t, None, levels)


def check_prefix_independence(t: DirectiveSequence, k: Optional[int], levels: int) -> Optional[PropertyFailure]:
    """τ_{[0,n)}(v_i) and τ_{[0,n)}(v_{i+1}) are never prefix dependent for i <= k."""
    for n in range(1, levels + 1):
        window = t.window(0, n)
        for i in range(1, min(_k_at(k, n), window.source.size - 1) + 1):
            if prefix_dependent(window.image(i), window.image(i + 1)):
                return PropertyFailure(Clause.PREFIX_INDEPENDENCE, n, i,
                                       f"Images of v{i} and v{i + 1} at level {n} are prefix dependent.")
    return None


# ==================== TOEPLITZ ====================
def check_equal_row_sums(d: BratteliDiagram) -> bool:
    return all(len({sum(row) for row in matrix}) <= 1 for matrix in d.matrices)


def toeplitz_image(row, i: int, k: int) -> Word:
    s = (i - 1) % (k + 1) + 1
    if i == 1:
        prefix = (1, 1, 1) + tuple(range(2, k + 2))
    else:
        prefix = tuple(t for t in range(1, s) for _ in range(2)) + tuple(range(s, k + 2))
    return arrange_image(row, prefix)


def toeplitz_ordering(d: BratteliDiagram, k: int) -> OrderedBratteliDiagram:
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}.", field='k')
    report = validate_diagram(d)
    if not report.valid:
        raise ValidationError("Diagram is not valid.", field='diagram', errors=report.violations)
    if not check_equal_row_sums(d):
        raise PreconditionError("Row sums differ within a level.", rule='equal_row_sums')
    for n in range(1, d.depth):
        if d.size(n) < k + 1:
            raise PreconditionError(f"Level {n} has {d.size(n)} vertices, needs at least {k + 1}.",
                                    rule='alphabet_size', level=n)
        for i, row in enumerate(d.matrices[n], start=1):
            if min(row) <= 3:
                raise PreconditionError(f"Row {i} of matrix {n} has an entry <= 3.",
                                        rule='entries_above_3', level=n, vertex=i)
    words = [_level_zero_words(d)]
    for n in range(1, d.depth):
        words.append(tuple(toeplitz_image(row, i, k) for i, row in enumerate(d.matrices[n], start=1)))
    return ordering_from_words(d, words)


def toeplitz_morphisms(d: BratteliDiagram, k: int) -> DirectiveSequence:
    return read_morphisms(toeplitz_ordering(d, k), name=f'toeplitz-k{k}')


def check_toeplitz(t: DirectiveSequence, k: int, levels: Optional[int] = None) -> Verdict:
    count = len(t) if levels is None else levels
    if not is_hat(t.morphism(0)):
        return PropertyFailure(Clause.HAT, 0, None, "τ_0 is not a hat morphism.")
    lengths = [len(t.morphism(0).images[0])]
    for n in range(1, count):
        tau = t.morphism(n)
        if len(set(tau.lengths)) != 1:
            return PropertyFailure(Clause.EQUAL_LENGTHS, n, None, f"Images of τ_{n} have lengths {tau.lengths}.")
        lengths.append(tau.lengths[0])
        for i, (image, row) in enumerate(zip(tau.images, tau.incidence().tolist()), start=1):
            try:
                expected = toeplitz_image(row, i, k)
            except PreconditionError:
                expected = None
            if image != expected:
                return PropertyFailure(Clause.TOEPLITZ_IMAGE, n, i,
                                       f"τ_{n}(v{i}) differs from the Toeplitz image of its row.")
    return ToeplitzWitness(k, count, tuple(lengths))


def ds_class(letter: int, k: int) -> int:
    """0 for v_1, otherwise the residue class s in 1..k+1 of the index."""
    return 0 if letter == 1 else (letter - 1) % (k + 1) + 1


def check_ds_classes(t: DirectiveSequence, k: int, levels: Optional[int] = None) -> Optional[PropertyFailure]:
    """No letter is followed by a different letter of its own class, nor by two letters of one class."""
    count = len(t) if levels is None else levels
    for n in range(1, count):
        tau = t.morphism(n)
        followers: dict[int, set[int]] = {}
        for i, image in enumerate(tau.images, start=1):
            for a, b in zip(image, image[1:]):
                if a != b and ds_class(a, k) == ds_class(b, k):
                    return PropertyFailure(Clause.CLASS_FOLLOW, n, i,
                                           f"v{a} is followed by v{b} of the same class in τ_{n}(v{i}).")
                followers.setdefault(a, set()).add(b)
        for image in tau.images:
            for other in tau.images:
                followers.setdefault(image[-1], set()).add(other[0])
        for a, after in sorted(followers.items()):
            classes = [ds_class(b, k) for b in after]
            if len(classes) != len(set(classes)):
                return PropertyFailure(Clause.CLASS_FOLLOWERS, n, a,
                                       f"v{a} is followed by two letters of one class at level {n}.")
    return None


# ==================== SUBEXPONENTIAL FAMILY ====================
@dataclass(frozen=True)
class Growth:
    """A growth sequence g given through ln g(n)."""
    name: str
    log: Callable[[int], float] = field(compare=False, repr=False)

    def __call__(self, n: int) -> float:
        return math.exp(self.log(n))


def parse_growth(text: str, table: Optional[dict] = None) -> Growth:
    """``pow2_sqrt``, ``poly:<d>`` or a table {n: g_n} (read from CSV by the caller)."""
    if table is not None:
        def log_table(n):
            if n not in table:
                raise ValidationError(f"Growth table has no entry for n={n}.", field='g')
            return math.log(table[n])
        return Growth(text, log_table)
    if text == 'pow2_sqrt':
        return Growth(text, lambda n: math.sqrt(n) * math.log(2))
    if text.startswith('poly:'):
        try:
            degree = float(text.split(':', 1)[1])
        except ValueError:
            raise ValidationError(f"Invalid polynomial degree in '{text}'.", field='g')
        return Growth(text, lambda n: degree * math.log(n))
    raise ValidationError(f"Unknown growth '{text}'; use pow2_sqrt, poly:<d> or a CSV table.", field='g')


def linear_de_bruijn(alphabet_size: int, order: int) -> tuple[int, ...]:
    """
    Prefer-largest de Bruijn word over 0..alphabet_size-1: every word of
    length ``order`` occurs exactly once, total length size^order + order - 1.
    """
    sequence = [0] * order
    seen = {tuple(sequence)}
    while True:
        tail = sequence[len(sequence) - order + 1:] if order > 1 else []
        for symbol in range(alphabet_size - 1, -1, -1):
            window = tuple(tail) + (symbol,)
            if window not in seen:
                seen.add(window)
                sequence.append(symbol)
                break
        else:
            return tuple(sequence)


@dataclass(frozen=True)
class SubexpLevel:
    n: int
    alpha: int
    length: int
    interior: Word

    def to_dict(self):
        return {'n': self.n, 'alpha': self.alpha, 'length': self.length, 'interior_length': len(self.interior)}


@dataclass(frozen=True)
class SubexpSpec:
    growth: str
    base_length: int
    levels: tuple[SubexpLevel, ...]

    def to_dict(self):
        return {'g': self.growth, 'L0': self.base_length, 'levels': [level.to_dict() for level in self.levels]}


SUBEXP_BASE_LENGTH = 3


def subexp_morphism(n: int, alpha: int):
    """τ_n over V_n = n+2 letters: v1 v2 w v_{n+2} and v1^i v2 w' v_{n+2}, all of one length."""
    m = n + 2
    w = tuple(symbol + 2 for symbol in linear_de_bruijn(m - 1, alpha))
    length = max(3 + len(w), 2 * n + 4)
    w = w + (m - 1,) * (length - 3 - len(w))
    images = [(1, 2) + w + (m,)]
    for i in range(2, m + 2):
        middle = tuple(range(3, m))
        pad = length - i - 2 - len(middle)
        images.append((1,) * i + (2,) + middle + (m - 1,) * pad + (m,))
    return Morphism(LevelAlphabet(n + 1, m + 1), LevelAlphabet(n, m), tuple(images)), w, length


def _subexp_base():
    images = tuple(tuple(range(SUBEXP_BASE_LENGTH * u + 1, SUBEXP_BASE_LENGTH * (u + 1) + 1)) for u in range(3))
    return Morphism(LevelAlphabet(1, 3), LevelAlphabet(0, 3 * SUBEXP_BASE_LENGTH), images)


def build_subexp_family(growth: Growth, levels: int, alpha_cap: int = 24,
                        max_image_length: int = 200_000):
    """Levels 1..``levels`` carry the α search; later levels continue with α = 1."""
    if levels < 1:
        raise ValidationError(f"levels must be positive, got {levels}.", field='levels')
    morphisms, spec_levels = [_subexp_base()], []
    scale = SUBEXP_BASE_LENGTH
    for n in range(1, levels + 1):
        alpha = next((a for a in range(1, alpha_cap + 1)
                      if (a - 1) * math.log(n + 1) >= growth.log(a * scale)), None)
        if alpha is None:
            raise BudgetExceededError(f"No α <= {alpha_cap} satisfies the growth bound at level {n}.",
                                      rule='alpha_cap', level=n, limit=alpha_cap)
        if (n + 1) ** alpha + alpha + 2 > max_image_length:
            raise BudgetExceededError(
                f"Level {n} would need images of length {(n + 1) ** alpha + alpha + 2}.",
                rule='image_length', level=n, limit=max_image_length
            )
        tau, w, length = subexp_morphism(n, alpha)
        morphisms.append(tau)
        spec_levels.append(SubexpLevel(n, alpha, length, w))
        logger.info(f"Subexponential level {n}: alpha={alpha}, L={length}")
        scale *= length

    def extension(n):
        return subexp_morphism(n, 1)[0]

    sequence = DirectiveSequence(tuple(morphisms), extension=extension, name=f'subexp-{growth.name}')
    return sequence, SubexpSpec(growth.name, SUBEXP_BASE_LENGTH, tuple(spec_levels))


# ==================== PIPELINES ====================
@dataclass(frozen=True)
class Construction:
    sequence: DirectiveSequence
    ordered: Optional[OrderedBratteliDiagram] = None
    certificate: Optional[IntertwiningCertificate] = None
    original: Optional[BratteliDiagram] = None

    def to_dict(self):
        rv = {'sequence': self.sequence.to_dict()}
        if self.ordered is not None:
            rv['ordered_diagram'] = self.ordered.to_dict()
        if self.certificate is not None:
            rv['certificate'] = self.certificate.to_dict()
        return rv


def build_pk_sequence(d: BratteliDiagram, k: int, amplify: bool = False) -> Construction:
    certificate = None
    original = d
    if amplify:
        d, certificate = amplify_diagram(d, k)
    ordered = assign_pk_ordering(d, k)
    return Construction(read_morphisms(ordered, name=f'pk-{k}'), ordered, certificate, original)


def build_pinf_sequence(d: BratteliDiagram, amplify: bool = False) -> Construction:
    certificate = None
    original = d
    if amplify:
        d, certificate = amplify_diagram(d, 1, level_margin=2)
    ordered = assign_pinf_ordering(d)
    return Construction(read_morphisms(ordered, name='pinf'), ordered, certificate, original)


def build_toeplitz_sequence(d: BratteliDiagram, k: int) -> Construction:
    ordered = toeplitz_ordering(d, k)
    return Construction(read_morphisms(ordered, name=f'toeplitz-k{k}'), ordered)
