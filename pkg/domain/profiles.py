"""
Initial radius profiles.

A profile turns a description (constant, cosine, clamped cosine, sampled table)
into node values on a domain and reports its own endpoint derivatives, which the
config layer checks against the boundary condition r' = r'' = 0.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from kernels.errors import DomainError

from .grid import RadiusField


@dataclass(frozen=True)
class EndpointDerivatives:
    first: tuple
    second: tuple

    @property
    def max_first(self):
        return max(abs(v) for v in self.first)

    @property
    def max_second(self):
        return max(abs(v) for v in self.second)


class Profile:
    kind = None

    def values(self, domain):
        raise NotImplementedError

    def endpoint_derivatives(self, domain):
        raise NotImplementedError

    def field(self, domain, model, margin=1e-3):
        return RadiusField(domain, model, self.values(domain), margin)


@dataclass(frozen=True)
class ConstantProfile(Profile):
    c: float
    kind = 'constant'

    def values(self, domain):
        return np.full(domain.n, float(self.c))

    def endpoint_derivatives(self, domain):
        return EndpointDerivatives((0.0, 0.0), (0.0, 0.0))


@dataclass(frozen=True)
class CosineProfile(Profile):
    """c + a*cos(m*pi*(s - s0)/L); r' vanishes at the ends, r'' does not unless a = 0."""
    c: float
    a: float
    m: int = 1
    kind = 'cosine'

    def _phase(self, domain):
        return self.m * math.pi * (domain.s - domain.origin) / domain.length

    def values(self, domain):
        return self.c + self.a * np.cos(self._phase(domain))

    def endpoint_derivatives(self, domain):
        w = self.m * math.pi / domain.length
        ends = (0.0, self.m * math.pi)
        first = tuple(-self.a * w * math.sin(x) for x in ends)
        second = tuple(-self.a * w * w * math.cos(x) for x in ends)
        return EndpointDerivatives(first, second)


@dataclass(frozen=True)
class ClampedProfile(Profile):
    """
    c + a*(9/8)*(cos x - cos(3x)/9), x = m*pi*(s - s0)/L.

    Peak-to-mean amplitude a, with r' = r'' = 0 at both ends.
    """
    c: float
    a: float
    m: int = 1
    kind = 'clamped'

    def _phase(self, domain):
        return self.m * math.pi * (domain.s - domain.origin) / domain.length

    def values(self, domain):
        x = self._phase(domain)
        return self.c + self.a * 1.125 * (np.cos(x) - np.cos(3.0 * x) / 9.0)

    def endpoint_derivatives(self, domain):
        w = self.m * math.pi / domain.length
        ends = (0.0, self.m * math.pi)
        first = tuple(self.a * 1.125 * w * (-math.sin(x) + math.sin(3.0 * x) / 3.0) for x in ends)
        second = tuple(self.a * 1.125 * w * w * (-math.cos(x) + math.cos(3.0 * x)) for x in ends)
        return EndpointDerivatives(first, second)


@dataclass(frozen=True, eq=False)
class TableProfile(Profile):
    """Sampled (s, r) pairs, resampled on the domain grid with a not-a-knot cubic spline."""
    s: np.ndarray
    r: np.ndarray
    kind = 'table'

    def _spline(self, domain):
        s = np.asarray(self.s, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if s.shape != r.shape or s.ndim != 1 or s.size < 4:
            raise DomainError('Table profile needs matching 1-D s and r columns with at least 4 rows')
        if not np.all(np.diff(s) > 0):
            raise DomainError('Table profile s column must be strictly increasing')
        lo, hi = domain.origin, domain.origin + domain.length
        tolerance = 1e-9 * max(1.0, abs(hi))
        if s[0] > lo + tolerance or s[-1] < hi - tolerance:
            raise DomainError(f'Table profile covers [{s[0]:g}, {s[-1]:g}], domain is [{lo:g}, {hi:g}]')
        return CubicSpline(s, r)

    def values(self, domain):
        return self._spline(domain)(np.clip(domain.s, self.s[0], self.s[-1]))

    def endpoint_derivatives(self, domain):
        spline = self._spline(domain)
        ends = np.array([domain.origin, domain.origin + domain.length])
        return EndpointDerivatives(
            tuple(float(v) for v in spline(ends, 1)),
            tuple(float(v) for v in spline(ends, 2)),
        )
