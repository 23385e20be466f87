"""
Closed-form functionals of a tube of non-constant radius.

Notation used throughout (per node):

    c = co(k0, r)     g = r'     Q = sqrt(c**2 + g**2)     u = c / Q

The tube density psi and the mean curvature rho are written so that rho is
exactly the first variation of the reduced area v * int r^mV psi omega ds with
respect to the normal speed r_t * u. That fixes every sign:

    rho = u * ( sum_k mV_k cot_k
              - sum_{k != k0} mH_k tan_k - (mH_k0 - 1) tan_k0
              - tan_k0 (c**2 + 2 g**2) / Q**2
              - r'' / Q**2
              - (sum_k m~_k Gamma_k) g / c**2 )

At constant radius this is the classical principal curvature sum of the tube,
and in the flat limit it is the mean curvature of a surface of revolution.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from domain.grid import derivatives, enforce_boundary, quadrature
from kernels.roots import kernel_co, kernel_cot, kernel_sinc, kernel_tan

UNIT_SPHERE_TABLE_SIZE = 16


@lru_cache(maxsize=None)
def _unit_sphere_volume(m):
    return 2.0 * math.pi ** ((m + 1) / 2.0) / special.gamma((m + 1) / 2.0)


UNIT_SPHERE_VOLUMES = tuple(_unit_sphere_volume(m) for m in range(UNIT_SPHERE_TABLE_SIZE + 1))


def unit_sphere_volume(m):
    """Volume of the m-dimensional Euclidean unit sphere: v_0 = 2, v_1 = 2 pi, v_2 = 4 pi."""
    m = int(m)
    if m < 0:
        raise ValueError(f'Sphere dimension must be >= 0, got {m}')
    if m <= UNIT_SPHERE_TABLE_SIZE:
        return UNIT_SPHERE_VOLUMES[m]
    return _unit_sphere_volume(m)


# ─────────────────────────────────────────────
# Densities
# ─────────────────────────────────────────────

def _vertical_sinc(model, r):
    product = np.ones_like(np.asarray(r, dtype=float))
    for k, count in model.vertical_blocks:
        product = product * np.asarray(kernel_sinc(model, k, r)) ** count
    return product


def _horizontal_co(model, r, skip_k0):
    product = np.ones_like(np.asarray(r, dtype=float))
    for k, count in model.horizontal_blocks:
        if skip_k0 and k == model.k0:
            continue
        product = product * np.asarray(kernel_co(model, k, r)) ** count
    return product


def _scalar(values):
    if np.ndim(values) == 0:
        return float(values)
    return values


def ambient_density(model, s):
    """psi-bar(s): the tube density at constant radius s."""
    values = _vertical_sinc(model, s) * _horizontal_co(model, s, skip_k0=False)
    return _scalar(values)


def tube_density(model, r, g):
    c = np.asarray(kernel_co(model, model.k0, r))
    g = np.asarray(g, dtype=float)
    values = (
        _vertical_sinc(model, r)
        * _horizontal_co(model, r, skip_k0=True)
        * c ** (model.horizontal(model.k0) - 1)
        * np.hypot(c, g)
    )
    return _scalar(values)


def monitor_u(model, r, g):
    """Cosine of the angle between the tube normal and the radial direction."""
    c = np.asarray(kernel_co(model, model.k0, r))
    values = c / np.hypot(c, np.asarray(g, dtype=float))
    return _scalar(values)


def monitor_v(model, r, g):
    """Reciprocal of u: Q / co(k0, r), never below 1."""
    c = np.asarray(kernel_co(model, model.k0, r))
    values = np.hypot(c, np.asarray(g, dtype=float)) / c
    return _scalar(values)


def monitor_phi(model, r, g, constant):
    """exp(constant * r) * v, bounded below by v for a positive constant."""
    r = np.asarray(r, dtype=float)
    values = np.exp(constant * r) * np.asarray(monitor_v(model, r, g))
    return _scalar(values)


class GradNormRelation:
    """
    Map between the gradient of r on the base (g) and the squared gradient of
    the radius pulled back to the tube (G = g**2 (co**2 + g**2)).
    """

    @staticmethod
    def forward(model, r, g):
        c = np.asarray(kernel_co(model, model.k0, r))
        g = np.asarray(g, dtype=float)
        return _scalar(g * g * (c * c + g * g))

    @staticmethod
    def inverse(model, r, big_g):
        c = np.asarray(kernel_co(model, model.k0, r))
        big_g = np.asarray(big_g, dtype=float)
        c2 = c * c
        # 2G / (c^2 + sqrt(c^4 + 4G)) is the cancellation-free form of (-c^2 + sqrt(c^4 + 4G)) / 2
        g2 = 2.0 * big_g / (c2 + np.sqrt(c2 * c2 + 4.0 * big_g))
        return _scalar(np.sqrt(g2))


grad_norm_relation = GradNormRelation()


# ─────────────────────────────────────────────
# Mean curvature
# ─────────────────────────────────────────────

def constant_radius_curvature(model, r):
    """rho at r' = r'' = 0: sum mV_k cot_k - sum mH_k tan_k."""
    total = np.zeros_like(np.asarray(r, dtype=float))
    for k, count in model.vertical_blocks:
        total = total + count * np.asarray(kernel_cot(model, k, r))
    for k, count in model.horizontal_blocks:
        total = total - count * np.asarray(kernel_tan(model, k, r))
    return _scalar(total)


def transverse_trace(model, domain):
    """sum_k m~_k Gamma_k per node."""
    total = np.zeros(domain.n)
    for k in set(model.ratios) | {0.0}:
        count = model.reduced_horizontal(k)
        if count:
            total = total + count * domain.connection(k)
    return total


def mean_curvature(model, domain, field, first, second):
    """
    Mean curvature rho per node, in the form given at the top of this module.

    Read against the tube formula as it is usually printed, three terms differ:

    - there is no 2 (cos - 1 + sinc) g**2 / r term;
    - the tan and r'' terms carry the opposite sign;
    - the connection term is divided by co(k0, r)**2, not a per-block cos(k b r)**2.

    In this form rho is the finite-difference derivative of tube_area along the
    normal speed on multi-block, k0 = 1, noncompact and spherical-base models.
    """
    r = field.values if hasattr(field, 'values') else np.asarray(field, dtype=float)
    g = np.asarray(first, dtype=float)
    c = np.asarray(kernel_co(model, model.k0, r))
    c2 = c * c
    q2 = c2 + g * g
    tan_k0 = np.asarray(kernel_tan(model, model.k0, r))

    brace = np.zeros_like(r)
    for k, count in model.vertical_blocks:
        brace = brace + count * np.asarray(kernel_cot(model, k, r))
    for k, count in model.horizontal_blocks:
        if k == model.k0:
            continue
        brace = brace - count * np.asarray(kernel_tan(model, k, r))
    brace = brace - (model.horizontal(model.k0) - 1) * tan_k0
    brace = brace - tan_k0 * (c2 + 2.0 * g * g) / q2
    brace = brace - np.asarray(second, dtype=float) / q2
    brace = brace - transverse_trace(model, domain) * g / c2
    return (c / np.sqrt(q2)) * brace


# ─────────────────────────────────────────────
# Integrated quantities
# ─────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class GeometrySample:
    r: np.ndarray
    first: np.ndarray
    second: np.ndarray
    rho: np.ndarray
    psi: np.ndarray
    u: np.ndarray
    v: np.ndarray
    area_integrand: np.ndarray
    numerator_integrand: np.ndarray
    area: float
    hbar: float
    boundary_hessian_residual: tuple

    @property
    def min_u(self):
        return float(self.u.min())

    @property
    def max_v(self):
        return float(self.v.max())

    @property
    def max_r(self):
        return float(self.r.max())

    def max_phi(self, constant):
        return float((np.exp(constant * self.r) * self.v).max())


def sample(model, domain, field):
    """Every per-node functional of the field in one pass."""
    r = field.values
    first, second = derivatives(domain, field)
    rho = mean_curvature(model, domain, field, first, second)
    psi = tube_density(model, r, first)
    u = monitor_u(model, r, first)
    v = monitor_v(model, r, first)
    weight = r ** model.m_vertical * psi
    denominator = quadrature(domain, weight)
    numerator = quadrature(domain, weight * rho)
    return GeometrySample(
        r=r,
        first=first,
        second=second,
        rho=rho,
        psi=psi,
        u=u,
        v=v,
        area_integrand=weight,
        numerator_integrand=weight * rho,
        area=unit_sphere_volume(model.m_vertical) * denominator,
        hbar=numerator / denominator,
        boundary_hessian_residual=enforce_boundary(field).boundary_hessian_residual,
    )


def tube_area(model, domain, field):
    first, _ = derivatives(domain, field)
    r = field.values
    integrand = r ** model.m_vertical * tube_density(model, r, first)
    return unit_sphere_volume(model.m_vertical) * quadrature(domain, integrand)


def average_mean_curvature(model, domain, field):
    return sample(model, domain, field).hbar


def curvature_bound(model, a1, a2, points=257):
    """
    Range of the constant-radius curvature over radii in [a1, a2].

    Bounds the average mean curvature of any tube squeezed between the
    constant tubes of radius a1 and a2.
    """
    radii = np.linspace(float(a1), float(a2), points)
    values = np.asarray(constant_radius_curvature(model, radii))
    return float(values.min()), float(values.max())
