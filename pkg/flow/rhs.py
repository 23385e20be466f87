"""
Right-hand sides of the radius evolution.

Eulerian form on the fixed base:     r_t = (Hbar - rho) / u
Following a tube point (Lagrangian): d r^/dt = u (Hbar - rho)
Base point drift:                    dx/dt = (rho - Hbar) r' / (c Q)

The Eulerian form follows from the two Lagrangian equations by the chain rule
r^(t) = r_t(x(t)). Its principal part is r'' / (c**2 + g**2), which the IMEX
scheme treats implicitly.
"""

import numpy as np

from geometry.curvature import monitor_u, sample
from kernels.roots import kernel_co, kernel_double_sin


def evaluate(model, domain, field):
    """(rhs per node, GeometrySample) for a radius field."""
    geometry = sample(model, domain, field)
    return (geometry.hbar - geometry.rho) / geometry.u, geometry


def eulerian_rhs(model, domain, state):
    field = getattr(state, 'field', state)
    rhs, _ = evaluate(model, domain, field)
    return rhs


def diffusion_coefficient(model, r, g):
    c = np.asarray(kernel_co(model, model.k0, r))
    return 1.0 / (c * c + np.asarray(g) ** 2)


def radius_speed(model, r, g, hbar, rho):
    """Normal speed projected on the radial direction, as seen by a tube point."""
    return monitor_u(model, r, g) * (hbar - rho)


def laplacian_identity(model, r, g):
    """
    Closed form of the Laplacian of the radius on the tube along the flow,
    -g**2 * kb sin(2 kb r) / (c**2 + g**2) with the hyperbolic continuation in
    the noncompact case.
    """
    c = np.asarray(kernel_co(model, model.k0, r))
    g2 = np.asarray(g, dtype=float) ** 2
    values = -g2 * np.asarray(kernel_double_sin(model, model.k0, r)) / (c * c + g2)
    if np.ndim(values) == 0:
        return float(values)
    return values


def radius_speed_without_laplacian(model, r, g, hbar, rho):
    """
    d r^/dt - Laplacian r^, written out:
    c / Q * (Hbar - rho) + g**2 * kb sin(2 kb r) / (c**2 + g**2).
    """
    c = np.asarray(kernel_co(model, model.k0, r))
    g2 = np.asarray(g, dtype=float) ** 2
    q2 = c * c + g2
    values = (
        c / np.sqrt(q2) * (np.asarray(hbar) - np.asarray(rho))
        + g2 * np.asarray(kernel_double_sin(model, model.k0, r)) / q2
    )
    if np.ndim(values) == 0:
        return float(values)
    return values
