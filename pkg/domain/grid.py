"""
One-dimensional reduction of the base domain.

The base B is an interval [s0, s0 + L] along the eigen-direction that carries
grad r. Everything transverse to it is folded into two per-node profiles:

    omega    density of dv_B over s (transverse volume already integrated out)
    gamma_k  transverse Hessian trace per unit vector in the k block, so that
             Tr(pr_k o Hess r) = m~_k * gamma_k * r'

Derivatives use central differences with mirror ghost nodes, i.e. a Neumann
boundary with r' = 0 at both ends.
"""

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.integrate import trapezoid

from kernels.errors import DomainError, ModelError

MIN_NODES = 8


def _frozen(values):
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BaseDomain:
    length: float
    n: int
    omega: np.ndarray
    gamma: dict = dataclass_field(default_factory=dict)
    origin: float = 0.0
    kind: str = 'flat'

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, 'length', float(self.length))
        set_(self, 'n', int(self.n))
        set_(self, 'origin', float(self.origin))
        if not (math.isfinite(self.length) and self.length > 0):
            raise DomainError(f'Domain length must be positive, got {self.length}')
        if self.n < MIN_NODES:
            raise DomainError(f'Domain needs at least {MIN_NODES} nodes, got {self.n}')
        if self.origin < 0:
            raise DomainError(f'Domain origin must be >= 0, got {self.origin}')

        omega = np.broadcast_to(np.asarray(self.omega, dtype=float), (self.n,))
        if not np.all(np.isfinite(omega)) or not np.all(omega > 0):
            raise DomainError(
                f'omega must be positive at every node of the {self.kind} domain '
                f'(origin {self.origin:g}); radial profiles need origin > 0'
            )
        set_(self, 'omega', _frozen(omega))

        gamma = {}
        for k, profile in dict(self.gamma).items():
            values = np.broadcast_to(np.asarray(profile, dtype=float), (self.n,))
            if not np.all(np.isfinite(values)):
                raise DomainError(f'gamma_{k} must be finite at every node')
            gamma[None if k is None else float(k)] = _frozen(values)
        set_(self, 'gamma', gamma)

    # ── Constructors ────────────────────────────────────────────────────

    @classmethod
    def flat(cls, length, n, origin=0.0):
        """Product-like base: omega = 1, gamma = 0."""
        return cls(length=length, n=n, omega=1.0, origin=origin, kind='flat')

    @classmethod
    def spherical(cls, length, n, transverse, origin, scale=1.0):
        """
        Radial coordinate on a round sphere of curvature scale**2.

        transverse is the number of directions orthogonal to s (m^H - 1 for a
        space-form base). The warp is sin(scale*s)/scale.
        """
        s = origin + np.linspace(0.0, length, n)
        if np.any(scale * s >= math.pi):
            raise DomainError('Spherical radial domain must stay below the antipode (scale*s < pi)')
        with np.errstate(divide='ignore'):
            log_derivative = scale / np.tan(scale * s)
        return cls._warped(length, n, origin, transverse, np.sin(scale * s) / scale, log_derivative, 'spherical')

    @classmethod
    def hyperbolic(cls, length, n, transverse, origin, scale=1.0):
        """Radial coordinate in hyperbolic space of curvature -scale**2; warp sinh(scale*s)/scale."""
        s = origin + np.linspace(0.0, length, n)
        with np.errstate(divide='ignore'):
            log_derivative = scale / np.tanh(scale * s)
        return cls._warped(length, n, origin, transverse, np.sinh(scale * s) / scale, log_derivative, 'hyperbolic')

    @classmethod
    def _warped(cls, length, n, origin, transverse, warp, log_derivative, kind):
        transverse = int(transverse)
        if transverse < 0:
            raise DomainError(f'Transverse dimension must be >= 0, got {transverse}')
        if transverse and origin <= 0:
            raise DomainError(f'A {kind} domain with transverse directions needs origin > 0')
        if transverse == 0:
            return cls(length=length, n=n, omega=1.0, origin=origin, kind=kind)
        with np.errstate(divide='ignore', invalid='ignore'):
            omega = warp ** transverse
        return cls(length=length, n=n, omega=omega, gamma={None: log_derivative}, origin=origin, kind=kind)

    @classmethod
    def from_table(cls, s, omega, gamma=None):
        """Domain from sampled profiles; s must be uniform and increasing."""
        s = np.asarray(s, dtype=float)
        if s.ndim != 1 or s.size < MIN_NODES:
            raise DomainError(f'Table needs a 1-D grid of at least {MIN_NODES} points')
        steps = np.diff(s)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise DomainError('Table grid must be uniform and strictly increasing')
        return cls(
            length=s[-1] - s[0],
            n=s.size,
            omega=omega,
            gamma=gamma or {},
            origin=s[0],
            kind='table',
        )

    # ── Derived values ──────────────────────────────────────────────────

    @property
    def h(self):
        return self.length / (self.n - 1)

    @property
    def s(self):
        return self.origin + self.h * np.arange(self.n)

    @property
    def vol_B(self):
        return quadrature(self, np.ones(self.n))

    def connection(self, k):
        """Gamma_k per node; blocks without their own profile use the shared one, else zero."""
        profile = self.gamma.get(float(k))
        if profile is None:
            profile = self.gamma.get(None)
        if profile is None:
            return np.zeros(self.n)
        return profile

    def __str__(self):
        return f'{self.kind} domain [{self.origin:g}, {self.origin + self.length:g}] with {self.n} nodes'


def _radius_limit(model, margin):
    try:
        return model.ceiling(margin)
    except ModelError:
        return math.inf


class RadiusField:
    """
    Radius values on the grid of a domain.

    The array is read-only; with_values builds a new, validated field.
    """

    def __init__(self, domain, model, values, margin=1e-3):
        values = np.array(values, dtype=float)
        if values.shape != (domain.n,):
            raise DomainError(f'Radius field needs {domain.n} values, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise DomainError('Radius field contains non-finite values')
        if not np.all(values > 0):
            raise DomainError(f'Radius field must be positive, min is {values.min():.17g}')
        limit = _radius_limit(model, margin)
        if not np.all(values < limit):
            raise DomainError(f'Radius {values.max():.17g} reaches the ceiling {limit:.17g} of {model.name}')
        values.setflags(write=False)
        self.domain = domain
        self.model = model
        self.margin = margin
        self.values = values

    def with_values(self, values):
        return RadiusField(self.domain, self.model, values, self.margin)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f'<RadiusField n={self.values.size} min={self.values.min():.6g} max={self.values.max():.6g}>'


@dataclass(frozen=True)
class GhostedField:
    """A radius field with one mirror ghost node on each side."""
    field: RadiusField
    padded: np.ndarray

    @property
    def boundary_hessian_residual(self):
        """r'' at the two endpoints, which the mirror boundary does not force to zero."""
        h = self.field.domain.h
        p = self.padded
        return (2.0 * (p[2] - p[1]) / h ** 2, 2.0 * (p[-3] - p[-2]) / h ** 2)


def enforce_boundary(field):
    values = field.values
    padded = np.concatenate(([values[1]], values, [values[-2]]))
    padded.setflags(write=False)
    return GhostedField(field=field, padded=padded)


def derivatives(domain, field):
    """Second-order central differences; r' is exactly zero at both ends."""
    p = enforce_boundary(field).padded
    h = domain.h
    first = (p[2:] - p[:-2]) / (2.0 * h)
    second = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / (h * h)
    return first, second


def quadrature(domain, integrand):
    values = np.broadcast_to(np.asarray(integrand, dtype=float), (domain.n,))
    return float(trapezoid(values * domain.omega, dx=domain.h))
