"""
Scalar reduction of a symmetric space around a reflective submanifold.

Everything the solver needs from the Lie theory is a handful of numbers: the
sign of the curvature, the length b of the root on a unit normal, the ratio set K
of the restricted roots and the vertical/horizontal multiplicities of each root
block. SpaceModel holds them and refuses inconsistent combinations.
"""

import enum
import math
from dataclasses import dataclass

from .errors import ModelError


class Curvature(enum.IntEnum):
    COMPACT = 1
    NONCOMPACT = -1

    @classmethod
    def parse(cls, value):
        """Accept an enum member, +1/-1, or the words compact/noncompact."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower().replace('-', '').replace('_', '')
            if key in ('compact', '+1', '1'):
                return cls.COMPACT
            if key in ('noncompact', '-1'):
                return cls.NONCOMPACT
            raise ModelError(f"Unknown curvature type '{value}'")
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise ModelError(f"Unknown curvature type '{value}'") from None

    @property
    def label(self):
        return 'compact' if self is Curvature.COMPACT else 'noncompact'


VERTICAL_RATIOS = (0, 1, 2)


def _pairs(mapping):
    """Normalise a {ratio: multiplicity} mapping to a sorted tuple of (float, int)."""
    pairs = {}
    for key, value in dict(mapping).items():
        ratio = float(key)
        count = int(value)
        if count != value or count < 0:
            raise ModelError(f'Multiplicity for k={key} must be a non-negative integer, got {value}')
        pairs[ratio] = pairs.get(ratio, 0) + count
    return tuple(sorted(pairs.items()))


def default_r_cut(epsilon, b, ratios):
    """pi/(2 b k_max) for compact spaces, +inf otherwise."""
    if Curvature.parse(epsilon) is Curvature.NONCOMPACT:
        return math.inf
    return math.pi / (2.0 * b * max(tuple(ratios) + (1.0,)))


@dataclass(frozen=True)
class SpaceModel:
    epsilon: Curvature
    b: float
    ratios: tuple
    mult_vertical: tuple
    mult_horizontal: tuple
    k0: float
    r_cut: float = None
    r_max: float = None
    name: str = 'custom'

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, 'epsilon', Curvature.parse(self.epsilon))
        set_(self, 'b', float(self.b))
        set_(self, 'ratios', tuple(sorted({float(k) for k in self.ratios})))
        set_(self, 'mult_vertical', _pairs(self.mult_vertical))
        set_(self, 'mult_horizontal', _pairs(self.mult_horizontal))
        set_(self, 'k0', float(self.k0))
        if self.r_cut is None:
            set_(self, 'r_cut', default_r_cut(self.epsilon, self.b, self.ratios))
        set_(self, 'r_cut', float(self.r_cut))
        if self.r_max is not None:
            set_(self, 'r_max', float(self.r_max))
        self.validate()

    def validate(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise ModelError(f'b must be a positive real, got {self.b}')
        if not self.ratios or any(k <= 0 for k in self.ratios):
            raise ModelError(f'The ratio set K must be a non-empty set of positive reals, got {self.ratios}')
        for k, _ in self.mult_vertical:
            if k not in VERTICAL_RATIOS:
                raise ModelError(f'Vertical multiplicities are indexed by k in {{0, 1, 2}}, got k={k}')
        allowed = set(self.ratios) | {0.0}
        for k, _ in self.mult_horizontal:
            if k not in allowed:
                raise ModelError(f'Horizontal multiplicity given for k={k}, which is not in K or 0')
        if self.m_vertical < 1:
            raise ModelError('The fibre must have dimension m^V >= 1')
        if self.m_horizontal < 1:
            raise ModelError('The base must have dimension m^H >= 1')
        if self.k0 not in allowed:
            raise ModelError(f'k0={self.k0} is not in K or 0')
        if self.horizontal(self.k0) < 1:
            raise ModelError(f'The gradient block k0={self.k0} needs m_k0^H >= 1')
        if not self.r_cut > 0:
            raise ModelError(f'r_cut must be positive, got {self.r_cut}')
        if self.epsilon is Curvature.COMPACT:
            limit = default_r_cut(self.epsilon, self.b, self.ratios)
            if not math.isfinite(self.r_cut) or self.r_cut > limit * (1 + 1e-12):
                raise ModelError(
                    f'Compact type needs a finite r_cut <= {limit:.17g}, got {self.r_cut}'
                )
        if self.r_max is not None and not self.r_max > 0:
            raise ModelError(f'r_max must be positive, got {self.r_max}')

    # ── Multiplicities ──────────────────────────────────────────────────

    def vertical(self, k):
        return dict(self.mult_vertical).get(float(k), 0)

    def horizontal(self, k):
        return dict(self.mult_horizontal).get(float(k), 0)

    def reduced_horizontal(self, k):
        """m~_k: the k0 block loses the gradient direction."""
        count = self.horizontal(k)
        return count - 1 if float(k) == self.k0 else count

    @property
    def m_vertical(self):
        return sum(count for _, count in self.mult_vertical)

    @property
    def m_horizontal(self):
        return sum(count for _, count in self.mult_horizontal)

    @property
    def vertical_blocks(self):
        return [(k, count) for k, count in self.mult_vertical if count]

    @property
    def horizontal_blocks(self):
        return [(k, count) for k, count in self.mult_horizontal if count]

    @property
    def k_max(self):
        return max(self.ratios + (1.0,))

    # ── Radius ceiling ──────────────────────────────────────────────────

    def ceiling(self, margin=1e-3):
        """
        Largest radius a run may reach.

        Compact: r_cut shrunk by the relative margin. Noncompact: the user supplied
        r_max, since r_cut is infinite there.
        """
        limits = []
        if math.isfinite(self.r_cut):
            limits.append(self.r_cut * (1.0 - margin))
        if self.r_max is not None:
            limits.append(self.r_max)
        if not limits:
            raise ModelError(
                f"Model '{self.name}' has an infinite cut radius; runs need a finite r_max"
            )
        return min(limits)

    def replace(self, **changes):
        fields = {
            'epsilon': self.epsilon,
            'b': self.b,
            'ratios': self.ratios,
            'mult_vertical': dict(self.mult_vertical),
            'mult_horizontal': dict(self.mult_horizontal),
            'k0': self.k0,
            'r_cut': self.r_cut,
            'r_max': self.r_max,
            'name': self.name,
        }
        if 'b' in changes and 'r_cut' not in changes and self.epsilon is Curvature.COMPACT:
            # the default cut radius scales with 1/b
            if self.r_cut == default_r_cut(self.epsilon, self.b, self.ratios):
                fields['r_cut'] = None
        fields.update(changes)
        return SpaceModel(**fields)

    def __str__(self):
        return f'{self.name} ({self.epsilon.label}, b={self.b:g}, k0={self.k0:g})'
