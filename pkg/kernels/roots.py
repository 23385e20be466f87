"""
Root kernels.

Each kernel is a scalar function of sqrt(eps)*k*b*r. For compact spaces it is the
circular function, for noncompact spaces the hyperbolic one, and for k = 0 the
limit value is returned exactly. Every function accepts a float or a numpy
array for r and returns the same shape.

    kernel_co    cos(sqrt(eps) k b r)
    kernel_cot   sqrt(eps) k b / tan(sqrt(eps) k b r)      (1/r at k = 0)
    kernel_tan   sqrt(eps) k b tan(sqrt(eps) k b r)
    kernel_sinc  sin(sqrt(eps) k b r) / (sqrt(eps) k b r)
    kernel_double_sin  sqrt(eps) k b sin(2 sqrt(eps) k b r)
"""

import numpy as np

from .errors import KernelDomainError, PoleError
from .spaces import Curvature

# Below this value of k*b*r the kernels switch to their Taylor expansions.
SERIES_THRESHOLD = 1e-4

# |cos| or |sin| below this is treated as a pole.
POLE_TOLERANCE = 1e-14


def _radius(model, r):
    values = np.asarray(r, dtype=float)
    if not np.all(values > 0) or not np.all(values < model.r_cut):
        bad = values[~((values > 0) & (values < model.r_cut))]
        raise KernelDomainError(
            f'Radius {bad.flat[0]!r} outside (0, {model.r_cut:.17g}) for {model.name}'
        )
    return values


def _result(values, r):
    if np.ndim(r) == 0:
        return float(values)
    return values


def _is_zero(k):
    return float(k) == 0.0


def kernel_co(model, k, r):
    values = _radius(model, r)
    if _is_zero(k):
        return _result(np.ones_like(values), r)
    x = k * model.b * values
    if model.epsilon is Curvature.COMPACT:
        return _result(np.cos(x), r)
    return _result(np.cosh(x), r)


def kernel_cot(model, k, r):
    values = _radius(model, r)
    if _is_zero(k):
        return _result(1.0 / values, r)
    x = k * model.b * values
    x2 = x * x
    if model.epsilon is Curvature.COMPACT:
        sin = np.sin(x)
        if np.any(np.abs(sin) < POLE_TOLERANCE):
            raise PoleError(f'cot pole at k={k}, b={model.b}')
        small = 1.0 - x2 / 3.0 - x2 * x2 / 45.0
        with np.errstate(divide='ignore', invalid='ignore'):
            x_cot = x * np.cos(x) / sin
    else:
        small = 1.0 + x2 / 3.0 - x2 * x2 / 45.0
        with np.errstate(divide='ignore', invalid='ignore'):
            x_cot = x / np.tanh(x)
    x_cot = np.where(x < SERIES_THRESHOLD, small, x_cot)
    return _result(x_cot / values, r)


def kernel_tan(model, k, r):
    values = _radius(model, r)
    if _is_zero(k):
        return _result(np.zeros_like(values), r)
    kb = k * model.b
    x = kb * values
    if model.epsilon is Curvature.COMPACT:
        cos = np.cos(x)
        if np.any(np.abs(cos) < POLE_TOLERANCE):
            raise PoleError(f'tan pole at k={k}, b={model.b}')
        return _result(kb * np.sin(x) / cos, r)
    return _result(-kb * np.tanh(x), r)


def kernel_sinc(model, k, r):
    values = _radius(model, r)
    if _is_zero(k):
        return _result(np.ones_like(values), r)
    x = k * model.b * values
    x2 = x * x
    if model.epsilon is Curvature.COMPACT:
        small = 1.0 - x2 / 6.0 + x2 * x2 / 120.0
        exact = np.sin(x) / np.where(x > 0, x, 1.0)
    else:
        small = 1.0 + x2 / 6.0 + x2 * x2 / 120.0
        exact = np.sinh(x) / np.where(x > 0, x, 1.0)
    return _result(np.where(x < SERIES_THRESHOLD, small, exact), r)


def kernel_double_sin(model, k, r):
    values = _radius(model, r)
    if _is_zero(k):
        return _result(np.zeros_like(values), r)
    kb = k * model.b
    x = kb * values
    if model.epsilon is Curvature.COMPACT:
        return _result(kb * np.sin(2.0 * x), r)
    return _result(-kb * np.sinh(2.0 * x), r)
