"""
Time integrators for the method-of-lines system r_t = F(r).

Every scheme takes the current field, a step size and returns the new node
values as a plain array. The nonlocal term Hbar is recomputed inside F, so
each Runge-Kutta stage sees the average curvature of its own stage field.
Stage fields are validated RadiusFields; a stage leaving the admissible
range raises and the caller rejects the step.
"""

import numpy as np
from scipy.linalg import solve_banded

from domain.grid import derivatives

from .rhs import diffusion_coefficient, evaluate
from .state import Scheme


def _rhs(model, domain, field):
    rhs, _ = evaluate(model, domain, field)
    return rhs


def explicit_euler(model, domain, field, dt, rhs=None):
    if rhs is None:
        rhs = _rhs(model, domain, field)
    return field.values + dt * rhs


def rk4(model, domain, field, dt, rhs=None):
    r = field.values
    k1 = _rhs(model, domain, field) if rhs is None else rhs
    k2 = _rhs(model, domain, field.with_values(r + 0.5 * dt * k1))
    k3 = _rhs(model, domain, field.with_values(r + 0.5 * dt * k2))
    k4 = _rhs(model, domain, field.with_values(r + dt * k3))
    return r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _mirror_laplacian_bands(n, weight):
    """
    Banded form (scipy.linalg.solve_banded layout) of I - weight * D2, with D2
    the second difference under mirror ghosts.
    """
    ab = np.zeros((3, n))
    ab[1] = 1.0 + 2.0 * weight
    ab[0, 1:] = -weight[:-1]
    ab[2, :-1] = -weight[1:]
    # mirror rows: r_-1 = r_1 and r_n = r_(n-2)
    ab[0, 1] = -2.0 * weight[0]
    ab[2, -2] = -2.0 * weight[-1]
    return ab


def imex_euler(model, domain, field, dt, rhs=None):
    """
    Linearly implicit Euler: the diffusion D r'' with D = 1/(c**2 + g**2)
    frozen at the start of the step is implicit, the remainder explicit.
    """
    r = field.values
    if rhs is None:
        rhs = _rhs(model, domain, field)
    first, second = derivatives(domain, field)
    coefficient = diffusion_coefficient(model, r, first)
    explicit = rhs - coefficient * second
    weight = dt * coefficient / domain.h ** 2
    return solve_banded((1, 1), _mirror_laplacian_bands(domain.n, weight), r + dt * explicit)


SCHEMES = {
    Scheme.EXPLICIT_EULER: explicit_euler,
    Scheme.RK4: rk4,
    Scheme.IMEX: imex_euler,
}
