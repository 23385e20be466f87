"""
Enclosed volume and the a-priori radius bound.

    delta(y) = int_0^y s^mV psi-bar(s) ds

is increasing in y. The enclosed volume of a tube is v_mV * int_B delta(r) dv_B,
and delta^-1 turns volume (and area) totals back into radii.

delta is evaluated by composite Gauss-Legendre quadrature, vectorised over y;
delta_reference uses scipy's adaptive quad and exists to cross-check it.
Inversion starts from a monotone (PCHIP) interpolant of the inverse table and
is polished by Newton with the exact derivative y' = s^mV psi-bar(s).
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from domain.grid import quadrature
from kernels.errors import RangeError

from .curvature import ambient_density, unit_sphere_volume

logger = logging.getLogger(__name__)

GAUSS_POINTS = 24
MIN_PANELS = 4
TABLE_SIZE = 513
NEWTON_TOLERANCE = 1e-13
NEWTON_MAX_ITERATIONS = 60

_NODES, _WEIGHTS = leggauss(GAUSS_POINTS)


def _integrand(model, s):
    return s ** model.m_vertical * np.asarray(ambient_density(model, s))


def _panel_count(model, y_max):
    # panels of width ~ 2 / (growth rate of the integrand)
    rate = model.k_max * model.b * (model.m_vertical + model.m_horizontal) / 4.0
    return MIN_PANELS + int(math.ceil(y_max * rate))


def delta(model, y):
    """delta(y) for a float or an array of y >= 0."""
    ys = np.asarray(y, dtype=float)
    flat = ys.reshape(-1)
    out = np.zeros_like(flat)
    positive = flat > 0
    if np.any(positive):
        top = flat[positive]
        panels = _panel_count(model, float(top.max()))
        width = top / panels
        total = np.zeros_like(top)
        for panel in range(panels):
            # Gauss nodes mapped into [panel * width, (panel + 1) * width]
            s = (panel + 0.5 * (_NODES[:, None] + 1.0)) * width[None, :]
            total += 0.5 * width * np.sum(_WEIGHTS[:, None] * _integrand(model, s), axis=0)
        out[positive] = total
    if np.ndim(y) == 0:
        return float(out[0])
    return out.reshape(ys.shape)


def delta_reference(model, y, epsrel=1e-10):
    if y <= 0:
        return 0.0
    value, _ = quad(lambda s: float(_integrand(model, s)), 0.0, float(y), epsabs=0.0, epsrel=epsrel, limit=200)
    return value


def delta_derivative(model, y):
    return _integrand(model, y)


class DeltaTable:
    """Dense table of delta on [0, top] with a monotone inverse interpolant."""

    def __init__(self, model, margin=1e-3):
        self.model = model
        self.top = model.ceiling(margin)
        self.radii = np.linspace(0.0, self.top, TABLE_SIZE)
        self.values = delta(model, self.radii)
        self.y_max = float(self.values[-1])
        self._inverse = PchipInterpolator(self.values, self.radii, extrapolate=False)

    def inverse(self, y):
        """x with delta(x) = y, to NEWTON_TOLERANCE absolute."""
        y = float(y)
        if y < 0 or math.isnan(y):
            raise RangeError(f'delta^-1 needs y >= 0, got {y!r}')
        if y > self.y_max * (1.0 + 1e-14):
            raise RangeError(
                f'delta^-1({y:.17g}) exceeds delta(ceiling) = {self.y_max:.17g} for {self.model.name}'
            )
        if y == 0.0:
            return 0.0
        if y >= self.y_max:
            return self.top

        x = float(self._inverse(y))
        for _ in range(NEWTON_MAX_ITERATIONS):
            slope = float(delta_derivative(self.model, x))
            if slope <= 0:
                break
            step = (delta(self.model, x) - y) / slope
            x_next = min(max(x - step, 0.5 * x), 0.5 * (x + self.top))
            if abs(x_next - x) <= NEWTON_TOLERANCE:
                x = x_next
                break
            x = x_next
        else:
            logger.warning('[Volume] Newton did not settle for delta^-1(%.17g); last x=%.17g', y, x)
        return x


@lru_cache(maxsize=64)
def delta_table(model, margin=1e-3):
    logger.debug('[Volume] building delta table for %s', model)
    return DeltaTable(model, margin)


def delta_inverse(model, y, margin=1e-3):
    return delta_table(model, margin).inverse(y)


def enclosed_volume(model, domain, field):
    return unit_sphere_volume(model.m_vertical) * quadrature(domain, delta(model, field.values))


def equilibrium_radius(model, domain, vol_d, margin=1e-3):
    """Radius of the constant tube enclosing vol_d."""
    return delta_inverse(model, vol_d / (unit_sphere_volume(model.m_vertical) * domain.vol_B), margin)


def radius_upper_bound(model, domain, area0, vol_d0, margin=1e-3):
    """
    Uniform bound on the radius along the flow.

    Raises RangeError when the total exceeds delta at the ceiling, i.e. the
    bound says nothing below the cut radius.
    """
    v_fibre = unit_sphere_volume(model.m_vertical)
    total = vol_d0 / (v_fibre * domain.vol_B) + area0 / (v_fibre * unit_sphere_volume(model.m_horizontal - 1))
    return delta_inverse(model, total, margin)
