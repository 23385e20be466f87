"""
Particle picture of the flow, used to cross-check the Eulerian solver.

A tube point moves with normal speed Hbar - rho. Its distance r^ from the
submanifold and its base point x evolve as

    d r^/dt = u (Hbar - rho)          dx/dt = (rho - Hbar) r' / (c Q)

and r^(t) must agree with the Eulerian profile evaluated at x(t).
"""

import logging
import math
from dataclasses import dataclass, field as dataclass_field, replace

from scipy.interpolate import CubicSpline

from kernels.roots import kernel_co

from .runner import initial_state, step
from .state import FlowTermination

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Particle:
    x: float
    r_hat: float
    active: bool = True
    reason: str = ''


def _interpolate(domain, values, x):
    return float(CubicSpline(domain.s, values)(x))


def lagrangian_step(model, domain, state, particle, dt):
    """Explicit Euler step of one particle against the profile in state."""
    if not particle.active:
        return particle
    x = particle.x
    rho = _interpolate(domain, state.sample.rho, x)
    g = _interpolate(domain, state.sample.first, x)
    c = kernel_co(model, model.k0, particle.r_hat)
    q = math.hypot(c, g)
    speed = state.hbar - rho
    x_new = x - dt * speed * g / (c * q)
    moved = replace(particle, x=x_new, r_hat=particle.r_hat + dt * (c / q) * speed)
    lower, upper = domain.origin, domain.origin + domain.length
    if not lower <= x_new <= upper:
        return replace(moved, active=False, reason=f'left the base at x={x_new:.6g}, t={state.t + dt:.6g}')
    return moved


@dataclass(frozen=True)
class TracePoint:
    t: float
    x: float
    r_hat: float
    r_profile: float

    @property
    def error(self):
        return abs(self.r_hat - self.r_profile)


@dataclass(eq=False)
class ParticleTrace:
    points: list = dataclass_field(default_factory=list)
    reason: str = ''

    @property
    def max_error(self):
        return max((point.error for point in self.points), default=0.0)

    @property
    def completed(self):
        return not self.reason


def track_particle(config, x0, t_end):
    """
    Run the Eulerian solver and one particle side by side up to t_end
    (capped by config.t_end), recording |r^ - r_t(x)| after every step.
    """
    if t_end < config.t_end:
        # step() lands exactly on config.t_end
        config = replace(config, t_end=t_end)
    model, domain = config.model, config.domain
    state = initial_state(config)
    r0 = _interpolate(domain, state.field.values, x0)
    particle = Particle(x=float(x0), r_hat=r0)
    trace = ParticleTrace(points=[TracePoint(t=0.0, x=particle.x, r_hat=r0, r_profile=r0)])
    while state.t < config.t_end:
        try:
            new_state = step(model, domain, state, config)
        except FlowTermination as exc:
            trace.reason = f'{exc.termination}: {exc}'
            break
        particle = lagrangian_step(model, domain, state, particle, new_state.t - state.t)
        state = new_state
        if not particle.active:
            trace.reason = particle.reason
            break
        trace.points.append(TracePoint(
            t=state.t, x=particle.x, r_hat=particle.r_hat,
            r_profile=_interpolate(domain, state.field.values, particle.x),
        ))

    if trace.reason:
        logger.warning('[Lagrangian] cross-check stopped: %s', trace.reason)
    else:
        logger.info('[Lagrangian] max |r^ - r(x)| = %.3g over %d steps', trace.max_error, len(trace.points) - 1)
    return trace

