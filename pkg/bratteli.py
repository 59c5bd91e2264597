# bratteli.py
"""
Bratteli diagrams, telescoping, orderings, morphisms read on an ordered
diagram, the Vershik successor on finite paths and intertwining
certificates.

Matrix n has shape |V_{n+1}| x |V_n|; entry (u, v) counts the edges from
v in V_n to u in V_{n+1}. Vertices are 1-based like letters.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core_words import (DirectiveSequence, LevelAlphabet, Morphism, Word,
                        as_word, matrix_rows)
from utils.exceptions import (CountMismatchError, ValidationError,
                              VershikOverflowError, WindowTooShortError)

logger = logging.getLogger(__name__)

Matrix = tuple[tuple[int, ...], ...]


def as_matrix(rows) -> Matrix:
    return matrix_rows(np.asarray(rows, dtype=object))


def to_array(matrix: Matrix) -> np.ndarray:
    """Exact integer array; object dtype keeps long products unbounded."""
    return np.array([list(row) for row in matrix], dtype=object)


# ==================== DIAGRAMS ====================
@dataclass(frozen=True)
class BratteliDiagram:
    level_sizes: tuple[int, ...]
    matrices: tuple[Matrix, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.level_sizes)
        matrices = tuple(as_matrix(m) if len(m) else () for m in self.matrices)
        object.__setattr__(self, 'level_sizes', sizes)
        object.__setattr__(self, 'matrices', matrices)
        if len(sizes) != len(matrices) + 1:
            raise ValidationError(
                f"{len(matrices)} matrices need {len(matrices) + 1} level sizes, got {len(sizes)}.",
                field='levels'
            )
        for n, matrix in enumerate(matrices):
            rows, cols = len(matrix), len(matrix[0]) if matrix else 0
            if (rows, cols) != (sizes[n + 1], sizes[n]) or any(len(row) != cols for row in matrix):
                raise ValidationError(
                    f"Matrix {n} must have shape {sizes[n + 1]}x{sizes[n]}.", field=f'matrices[{n}]'
                )

    @classmethod
    def from_matrices(cls, matrices):
        matrices = [as_matrix(m) for m in matrices]
        if not matrices:
            return cls((1,), ())
        sizes = [len(matrices[0][0])] + [len(m) for m in matrices]
        return cls(tuple(sizes), tuple(matrices))

    @property
    def depth(self) -> int:
        return len(self.matrices)

    def size(self, level: int) -> int:
        return self.level_sizes[level]

    def matrix(self, n: int) -> np.ndarray:
        if not 0 <= n < self.depth:
            raise WindowTooShortError(f"Diagram has no matrix {n} (depth {self.depth}).", level=n)
        return to_array(self.matrices[n])

    def truncated(self, depth: int):
        if depth > self.depth:
            raise WindowTooShortError(
                f"Diagram depth {self.depth} is below the requested {depth}.", level=depth, required=depth
            )
        return BratteliDiagram(self.level_sizes[:depth + 1], self.matrices[:depth])

    def product(self, start: int, stop: int) -> np.ndarray:
        """A_{stop-1} ... A_start."""
        result = self.matrix(start)
        for n in range(start + 1, stop):
            result = self.matrix(n) @ result
        return result

    def to_dict(self):
        return {
            'levels': list(self.level_sizes[1:]),
            'matrices': [[list(row) for row in matrix] for matrix in self.matrices]
        }

    @classmethod
    def from_dict(cls, data, location='diagram'):
        if not isinstance(data, dict) or 'matrices' not in data:
            raise ValidationError("Diagram must be an object with 'levels' and 'matrices'.", field=location)
        matrices = data['matrices']
        if not isinstance(matrices, list):
            raise ValidationError("'matrices' must be a list.", field=f'{location}.matrices')
        try:
            parsed = [as_matrix(m) for m in matrices]
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Matrices must hold integers: {e}", field=f'{location}.matrices')
        levels = data.get('levels', [len(m) for m in parsed])
        try:
            return cls(tuple([1] + [int(s) for s in levels]), tuple(parsed))
        except ValidationError as e:
            raise ValidationError(e.message, field=f'{location}.{e.field}')
        except (TypeError, ValueError):
            raise ValidationError("'levels' must be a list of integers.", field=f'{location}.levels')


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, kind, message, level=None, vertex=None):
        self.violations.append({'kind': kind, 'message': message, 'level': level, 'vertex': vertex})

    def to_dict(self):
        return {'valid': self.valid, 'violations': self.violations}


def validate_diagram(d: BratteliDiagram) -> ValidationReport:
    """Report every violated diagram invariant."""
    report = ValidationReport()
    if d.size(0) != 1:
        report.add('root', f"Level 0 has {d.size(0)} vertices, expected 1.", level=0)
    for n in range(d.depth):
        matrix = d.matrix(n)
        if (matrix < 0).any():
            report.add('negative', f"Matrix {n} has negative entries.", level=n)
        for v, column in enumerate(matrix.T, start=1):
            if not (column > 0).any():
                report.add('no_outgoing', f"Vertex {v} at level {n} has no outgoing edge.", level=n, vertex=v)
        for u, row in enumerate(matrix, start=1):
            if sum(row) <= 0:
                report.add('no_incoming', f"Vertex {u} at level {n + 1} has no incoming edge.",
                           level=n + 1, vertex=u)
    return report


def telescope(d: BratteliDiagram, keep) -> BratteliDiagram:
    keep = [int(k) for k in keep]
    if not keep or keep[0] != 0:
        raise ValidationError("Telescoping levels must start at 0.", field='keep')
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise ValidationError("Telescoping levels must be strictly increasing.", field='keep')
    if keep[-1] > d.depth:
        raise WindowTooShortError(
            f"Level {keep[-1]} is beyond the diagram depth {d.depth}.", level=keep[-1], required=keep[-1]
        )
    matrices = tuple(matrix_rows(d.product(a, b)) for a, b in zip(keep, keep[1:]))
    return BratteliDiagram(tuple(d.size(k) for k in keep), matrices)


def uniform_diagram(sizes, entry: int) -> BratteliDiagram:
    """Root followed by levels of the given sizes, every entry equal to ``entry``."""
    sizes = [1] + list(sizes)
    matrices = [[[entry] * sizes[n] for _ in range(sizes[n + 1])] for n in range(len(sizes) - 1)]
    return BratteliDiagram(tuple(sizes), tuple(as_matrix(m) for m in matrices))


def stationary_diagram(first, matrix, depth: int) -> BratteliDiagram:
    """``first`` as matrix 0 followed by ``depth - 1`` copies of ``matrix``."""
    return BratteliDiagram.from_matrices([first] + [matrix] * (depth - 1))


# ==================== ORDERED DIAGRAMS ====================
@dataclass(frozen=True)
class OrderedBratteliDiagram:
    diagram: BratteliDiagram
    order_words: tuple[tuple[Word, ...], ...]

    def __post_init__(self):
        words = tuple(tuple(as_word(w) for w in level) for level in self.order_words)
        object.__setattr__(self, 'order_words', words)
        d = self.diagram
        if len(words) != d.depth:
            raise ValidationError(f"Expected order words for {d.depth} levels, got {len(words)}.",
                                  field='order_words')
        for n, level in enumerate(words):
            if len(level) != d.size(n + 1):
                raise ValidationError(
                    f"Level {n} needs {d.size(n + 1)} order words, got {len(level)}.", field=f'order_words[{n}]'
                )
            for u, (word, row) in enumerate(zip(level, d.matrices[n]), start=1):
                if any(not 1 <= a <= d.size(n) for a in word):
                    raise ValidationError(
                        f"Order word of vertex {u} at level {n} uses letters outside 1..{d.size(n)}.",
                        field=f'order_words[{n}][{u - 1}]'
                    )
                found = tuple(word.count(v) for v in range(1, d.size(n) + 1))
                if found != tuple(row):
                    raise CountMismatchError(
                        f"Order word of vertex {u} at level {n} has letter counts {found}, expected {tuple(row)}.",
                        level=n, vertex=u, expected=list(row), found=list(found)
                    )

    @property
    def depth(self) -> int:
        return self.diagram.depth

    def word(self, n: int, u: int) -> Word:
        return self.order_words[n][u - 1]

    def to_dict(self):
        rv = self.diagram.to_dict()
        rv['order_words'] = [[list(w) for w in level] for level in self.order_words]
        return rv

    @classmethod
    def from_dict(cls, data, location='ordered_diagram'):
        diagram = BratteliDiagram.from_dict(data, location)
        words = data.get('order_words')
        if not isinstance(words, list):
            raise ValidationError("Ordered diagram needs an 'order_words' list.", field=f'{location}.order_words')
        return ordering_from_words(diagram, words)


def ordering_from_words(d: BratteliDiagram, words) -> OrderedBratteliDiagram:
    return OrderedBratteliDiagram(d, tuple(tuple(as_word(w) for w in level) for level in words))


def read_morphisms(b: OrderedBratteliDiagram, name='') -> DirectiveSequence:
    """
    τ_n(u) = order_words(n, u) for n >= 1; τ_0 is the hat morphism over the
    edges of the first level, numbered consecutively per vertex.
    """
    d = b.diagram
    if d.depth == 0:
        raise WindowTooShortError("An ordered diagram without levels reads no morphisms.", level=0, required=1)
    edge_count = sum(len(w) for w in b.order_words[0])
    images, next_edge = [], 1
    for word in b.order_words[0]:
        images.append(tuple(range(next_edge, next_edge + len(word))))
        next_edge += len(word)
    morphisms = [Morphism(LevelAlphabet(1, d.size(1)), LevelAlphabet(0, edge_count), images)]
    for n in range(1, d.depth):
        morphisms.append(Morphism(LevelAlphabet(n + 1, d.size(n + 1)), LevelAlphabet(n, d.size(n)),
                                  b.order_words[n]))
    return DirectiveSequence(tuple(morphisms), name=name)


# ==================== FINITE PATHS ====================
Edge = tuple[int, int]


@dataclass(frozen=True)
class FinitePath:
    """e_1 ... e_N; edge e_n = (vertex in V_n, position in order_words(n-1, vertex))."""
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, 'edges', tuple((int(u), int(p)) for u, p in self.edges))

    @property
    def depth(self) -> int:
        return len(self.edges)

    @property
    def terminal(self) -> int:
        return self.edges[-1][0]

    def to_dict(self):
        return {'edges': [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data, location='path'):
        try:
            return cls(tuple((u, p) for u, p in data['edges']))
        except (KeyError, TypeError, ValueError):
            raise ValidationError("Path must be an object with 'edges' as [vertex, position] pairs.",
                                  field=location)


def validate_path(b: OrderedBratteliDiagram, p: FinitePath) -> None:
    if p.depth == 0 or p.depth > b.depth:
        raise ValidationError(f"Path depth {p.depth} outside 1..{b.depth}.", field='path')
    below = 1
    for n, (u, position) in enumerate(p.edges, start=1):
        if not 1 <= u <= b.diagram.size(n):
            raise ValidationError(f"Edge {n} ends at unknown vertex {u}.", field=f'path.edges[{n - 1}]')
        word = b.word(n - 1, u)
        if not 1 <= position <= len(word):
            raise ValidationError(f"Edge {n} has position {position} outside 1..{len(word)}.",
                                  field=f'path.edges[{n - 1}]')
        if word[position - 1] != below:
            raise ValidationError(f"Edge {n} starts at {word[position - 1]}, previous edge ends at {below}.",
                                  field=f'path.edges[{n - 1}]')
        below = u


def _extreme_path(b, level, vertex, maximal):
    edges = []
    u = vertex
    for n in range(level, 0, -1):
        word = b.word(n - 1, u)
        position = len(word) if maximal else 1
        edges.append((u, position))
        u = word[position - 1]
    return FinitePath(tuple(reversed(edges)))


def minimal_path(b: OrderedBratteliDiagram, level: int, vertex: int) -> FinitePath:
    return _extreme_path(b, level, vertex, maximal=False)


def maximal_path(b: OrderedBratteliDiagram, level: int, vertex: int) -> FinitePath:
    return _extreme_path(b, level, vertex, maximal=True)


def vershik_successor(b: OrderedBratteliDiagram, p: FinitePath) -> FinitePath:
    validate_path(b, p)
    edges = list(p.edges)
    for k, (u, position) in enumerate(edges, start=1):
        word = b.word(k - 1, u)
        if position < len(word):
            break
    else:
        raise VershikOverflowError(depth=p.depth)
    edges[k - 1] = (u, position + 1)
    if k > 1:
        source = word[position]
        edges[:k - 1] = minimal_path(b, k - 1, source).edges
    return FinitePath(tuple(edges))


def vershik_orbit(b: OrderedBratteliDiagram, start: FinitePath, limit: Optional[int] = None):
    """Successors of ``start`` up to overflow, ``start`` included."""
    orbit = [start]
    while limit is None or len(orbit) < limit:
        try:
            orbit.append(vershik_successor(b, orbit[-1]))
        except VershikOverflowError:
            break
    return orbit


def enumerate_paths(b: OrderedBratteliDiagram, depth: int, vertex: Optional[int] = None):
    """All depth-``depth`` paths, optionally only those ending at ``vertex``."""
    paths = [((), 1)]
    for n in range(1, depth + 1):
        extended = []
        for edges, end in paths:
            for u in range(1, b.diagram.size(n) + 1):
                for position, source in enumerate(b.word(n - 1, u), start=1):
                    if source == end:
                        extended.append((edges + ((u, position),), u))
        paths = extended
    return [FinitePath(edges) for edges, end in paths if vertex is None or end == vertex]


def path_counts(d: BratteliDiagram, depth: int) -> tuple[int, ...]:
    """Number of paths from the root to each vertex of level ``depth``."""
    if depth == 0:
        return (1,)
    return tuple(int(x) for x in d.product(0, depth)[:, 0])


def check_proper_ordering(b: OrderedBratteliDiagram, depth: int) -> bool:
    """
    True when the maximal (and the minimal) paths of every depth up to
    ``depth`` agree below the top edge, i.e. both extreme chains are unique
    on the window.
    """
    if not 1 <= depth <= b.depth:
        raise WindowTooShortError(f"Depth {depth} outside 1..{b.depth}.", level=depth, required=depth)
    for n in range(1, depth):
        for maximal in (True, False):
            heads = {_extreme_path(b, n + 1, u, maximal).edges[:n]
                     for u in range(1, b.diagram.size(n + 1) + 1)}
            if len(heads) > 1:
                logger.info(f"{'Maximal' if maximal else 'Minimal'} chains split at level {n}")
                return False
    return True


# ==================== INTERTWINING ====================
@dataclass(frozen=True)
class IntertwiningCertificate:
    """Factor pairs with C_n B_n = A_n (original, telescoped at ``keep``) and B_{n+1} C_n = M_n."""
    keep: tuple[int, ...]
    b_matrices: tuple[Matrix, ...]
    c_matrices: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, 'keep', tuple(int(k) for k in self.keep))
        object.__setattr__(self, 'b_matrices', tuple(as_matrix(m) for m in self.b_matrices))
        object.__setattr__(self, 'c_matrices', tuple(as_matrix(m) for m in self.c_matrices))

    def to_dict(self):
        return {
            'keep': list(self.keep),
            'B': [[list(row) for row in m] for m in self.b_matrices],
            'C': [[list(row) for row in m] for m in self.c_matrices]
        }

    @classmethod
    def from_dict(cls, data, location='certificate'):
        if not isinstance(data, dict) or not all(key in data for key in ('keep', 'B', 'C')):
            raise ValidationError("Certificate must be an object with 'keep', 'B' and 'C'.", field=location)
        try:
            return cls(tuple(data['keep']), tuple(data['B']), tuple(data['C']))
        except (TypeError, ValueError) as e:
            raise ValidationError(f"Certificate matrices must hold integers: {e}", field=location)


def _shape(matrix: Matrix):
    return len(matrix), len(matrix[0]) if matrix else 0


def intertwining_failures(original: BratteliDiagram, derived: BratteliDiagram,
                          cert: IntertwiningCertificate) -> list[str]:
    telescoped = telescope(original, cert.keep)
    depth = telescoped.depth
    if derived.depth != depth:
        raise ValidationError(f"Derived depth {derived.depth} differs from telescoped depth {depth}.",
                              field='derived')
    if len(cert.b_matrices) != depth + 1 or len(cert.c_matrices) != depth:
        raise ValidationError(f"Certificate needs {depth + 1} B and {depth} C matrices.", field='certificate')
    for n, b in enumerate(cert.b_matrices):
        if _shape(b) != (derived.size(n), telescoped.size(n)):
            raise ValidationError(f"B[{n}] must be {derived.size(n)}x{telescoped.size(n)}.", field=f'B[{n}]')
    for n, c in enumerate(cert.c_matrices):
        if _shape(c) != (telescoped.size(n + 1), derived.size(n)):
            raise ValidationError(f"C[{n}] must be {telescoped.size(n + 1)}x{derived.size(n)}.", field=f'C[{n}]')
    failures = []
    for n in range(depth):
        c, b, b_next = (to_array(m) for m in (cert.c_matrices[n], cert.b_matrices[n], cert.b_matrices[n + 1]))
        if not np.array_equal(c @ b, telescoped.matrix(n)):
            failures.append(f"C[{n}]B[{n}] differs from the original matrix {n}")
        if not np.array_equal(b_next @ c, derived.matrix(n)):
            failures.append(f"B[{n + 1}]C[{n}] differs from the derived matrix {n}")
    return failures


def check_intertwining(original: BratteliDiagram, derived: BratteliDiagram,
                       cert: IntertwiningCertificate) -> bool:
    failures = intertwining_failures(original, derived, cert)
    for failure in failures:
        logger.info(failure)
    return not failures
