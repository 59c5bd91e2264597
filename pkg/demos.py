# demos.py
"""Built-in demo diagrams and the directive sequences read on them."""
import logging
from dataclasses import dataclass

from bratteli import BratteliDiagram, stationary_diagram, uniform_diagram
from constructions import (Construction, build_pinf_sequence, build_pk_sequence,
                           build_subexp_family, build_toeplitz_sequence, parse_growth)
from core_words import DirectiveSequence, stationary_extension
from utils.exceptions import NotFoundError

logger = logging.getLogger(__name__)


class DemoName:
    P1_SMALL = 'p1-small'
    P2_SMALL = 'p2-small'
    TOEPLITZ_K1 = 'toeplitz-k1'
    SUBEXP_SQRT = 'subexp-sqrt'
    PINF_SMALL = 'pinf-small'
    PINF_COMPACT = 'pinf-compact'

    @classmethod
    def all(cls):
        return [cls.P1_SMALL, cls.P2_SMALL, cls.TOEPLITZ_K1, cls.SUBEXP_SQRT, cls.PINF_SMALL, cls.PINF_COMPACT]


@dataclass(frozen=True)
class DemoInfo:
    name: str
    kind: str
    k: object
    description: str

    def to_dict(self):
        return {'name': self.name, 'kind': self.kind, 'k': self.k, 'description': self.description}


DEMOS = {
    DemoName.P1_SMALL: DemoInfo(DemoName.P1_SMALL, 'pk', 1,
                                'Stationary 3-letter diagram ordered with Property (P_1).'),
    DemoName.P2_SMALL: DemoInfo(DemoName.P2_SMALL, 'pk', 2,
                                'Stationary 4-letter diagram ordered with Property (P_2).'),
    DemoName.TOEPLITZ_K1: DemoInfo(DemoName.TOEPLITZ_K1, 'toeplitz', 1,
                                   'Equal row sums 16, Toeplitz-preserving ordering with k = 1.'),
    DemoName.SUBEXP_SQRT: DemoInfo(DemoName.SUBEXP_SQRT, 'subexp', 1,
                                   'Subexponential family for g(n) = 2^sqrt(n), one searched level.'),
    DemoName.PINF_SMALL: DemoInfo(DemoName.PINF_SMALL, 'pinf', 'inf',
                                  'Uniform 2-vertex seed amplified and ordered with Property (P_∞).'),
    DemoName.PINF_COMPACT: DemoInfo(DemoName.PINF_COMPACT, 'pinf', 'inf',
                                    'n + 2 vertices at level n, ordered with Property (P_∞) unamplified.'),
}

P1_MATRIX = [[1, 1, 1], [2, 1, 1], [3, 1, 1]]
P2_MATRIX = [[1, 1, 1, 1], [2, 1, 1, 1], [2, 2, 1, 1], [4, 1, 1, 1]]
TOEPLITZ_MATRIX = [[5, 5, 6], [6, 5, 5], [5, 6, 5]]
STATIONARY_DEPTH = 8


def seed_diagram(levels: int = 16, entry: int = 50) -> BratteliDiagram:
    """Two vertices per level, every entry ``entry``."""
    return uniform_diagram([2] * levels, entry)


def compact_pinf_diagram(levels: int = STATIONARY_DEPTH) -> BratteliDiagram:
    """
    n + 2 vertices at level n, entries just large enough for Property (P_∞).

    Row i of matrix n has 2 below column i and 1 elsewhere while i <= n + 1,
    and starts with i followed by ones past that.
    """
    matrices = [[[2]] * 3]
    for n in range(1, levels):
        columns = n + 2
        rows = [[2 if j < i else 1 for j in range(1, columns + 1)] for i in range(1, n + 2)]
        rows += [[i] + [1] * (columns - 1) for i in range(n + 2, n + 4)]
        matrices.append(rows)
    return BratteliDiagram.from_matrices(matrices)


def demo_info(name: str) -> DemoInfo:
    if name not in DEMOS:
        raise NotFoundError(f"Unknown demo '{name}'. Choose one of {', '.join(DemoName.all())}.",
                            resource_type='demo', resource_id=name)
    return DEMOS[name]


def demo_diagram(name: str, levels: int = STATIONARY_DEPTH) -> BratteliDiagram:
    info = demo_info(name)
    if name == DemoName.P1_SMALL:
        return stationary_diagram([[2]] * 3, P1_MATRIX, levels)
    if name == DemoName.P2_SMALL:
        return stationary_diagram([[2]] * 4, P2_MATRIX, levels)
    if name == DemoName.TOEPLITZ_K1:
        return stationary_diagram([[5]] * 3, TOEPLITZ_MATRIX, levels)
    if name == DemoName.PINF_SMALL:
        return seed_diagram()
    if name == DemoName.PINF_COMPACT:
        return compact_pinf_diagram(levels)
    raise NotFoundError(f"Demo '{name}' is built from a growth sequence, not a diagram.",
                        resource_type='demo_diagram', resource_id=info.name)


def _stationary(construction: Construction) -> Construction:
    sequence = construction.sequence
    extended = DirectiveSequence(sequence.morphisms, stationary_extension(sequence.morphisms[-1]), sequence.name)
    return Construction(extended, construction.ordered, construction.certificate, construction.original)


def demo_construction(name: str, levels: int = STATIONARY_DEPTH, subexp_alpha_cap: int = 24,
                      subexp_max_image_length: int = 200_000) -> Construction:
    info = demo_info(name)
    if info.kind == 'subexp':
        sequence, _ = build_subexp_family(parse_growth('pow2_sqrt'), 1, subexp_alpha_cap, subexp_max_image_length)
        return Construction(sequence)
    d = demo_diagram(name, levels)
    if info.kind == 'pk':
        return _stationary(build_pk_sequence(d, info.k))
    if info.kind == 'toeplitz':
        return _stationary(build_toeplitz_sequence(d, info.k))
    return build_pinf_sequence(d, amplify=name == DemoName.PINF_SMALL)


def demo_sequence(name: str, **kwargs) -> DirectiveSequence:
    construction = demo_construction(name, **kwargs)
    logger.info(f"Demo {name}: {len(construction.sequence)} stored morphisms, "
                f"extendable={construction.sequence.is_extendable}")
    return construction.sequence
