"""
The flow loop: step size control, step rejection, monitors and termination.
"""

import logging

import numpy as np

from domain.grid import RadiusField, quadrature
from geometry.curvature import curvature_bound, unit_sphere_volume
from geometry.volume import delta, delta_derivative, enclosed_volume, radius_upper_bound
from kernels.errors import DomainError, KernelDomainError, PoleError, RangeError
from kernels.roots import kernel_co

from .rhs import evaluate
from .schemes import SCHEMES
from .state import (
    MIN_DT, FlowState, FlowTermination, NonPositiveRadius, RadiusOverflow, RunReport,
    SeriesPoint, Snapshot, StepSizeUnderflow, Termination, TubeLost,
)

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-15
PROJECTION_MAX_ITERATIONS = 20

_REJECTED = (KernelDomainError, PoleError, DomainError)


def stiffness(model, r):
    """max over the nodes of max(1, 1/co(k_max, r)**2)."""
    c = np.asarray(kernel_co(model, model.k_max, r))
    return float(max(1.0, np.max(1.0 / (c * c))))


def choose_dt(model, domain, state, config):
    if config.dt is not None:
        return config.dt
    min_u = state.min_u
    return config.cfl * domain.h ** 2 * min_u * min_u / (2.0 * stiffness(model, state.field.values))


def radius_bound(config, area, vol_d):
    """(bound, bound_is_ceiling); the ceiling stands in when the bound is vacuous."""
    try:
        bound = radius_upper_bound(config.model, config.domain, area, vol_d, config.margin)
    except RangeError as exc:
        logger.warning('[Flow] radius bound unavailable (%s); using the ceiling %.6g', exc, config.ceiling)
        return config.ceiling, True
    return min(bound, config.ceiling), bound >= config.ceiling


def initial_state(config):
    model, domain = config.model, config.domain
    field = RadiusField(domain, model, config.initial.values, config.margin)
    rhs, geometry = evaluate(model, domain, field)
    vol_d = enclosed_volume(model, domain, field)
    bound, is_ceiling = radius_bound(config, geometry.area, vol_d)
    return FlowState(
        t=0.0, field=field, sample=geometry, rhs=rhs, vol_d=vol_d, bound=bound,
        bound_is_ceiling=is_ceiling, phi_constant=config.phi_constant,
    )


def conserve_project(model, domain, field, target):
    """
    Rescale r by the factor lam solving volD(lam * r) = target (Newton).
    """
    r = field.values
    fibre = unit_sphere_volume(model.m_vertical)
    lam = 1.0
    for _ in range(PROJECTION_MAX_ITERATIONS):
        residual = fibre * quadrature(domain, delta(model, lam * r)) - target
        if abs(residual) <= PROJECTION_TOLERANCE * target:
            break
        slope = fibre * quadrature(domain, np.asarray(delta_derivative(model, lam * r)) * r)
        correction = residual / slope
        lam -= correction
        if abs(correction) <= 4e-16 * lam:
            break
    else:
        logger.warning('[Flow] volume projection stopped at residual %.3g', residual)
    return field.with_values(lam * r)


def step(model, domain, state, config):
    """
    One accepted time step from state.

    Rejected attempts (non-finite values or a stage outside the kernels'
    domain) halve dt. Raises a FlowTermination subclass when the accepted
    step ends the run.
    """
    integrator = SCHEMES[config.scheme]
    dt = choose_dt(model, domain, state, config)
    remaining = config.t_end - state.t
    last = remaining <= dt * (1.0 + 1e-6)
    if last:
        dt = remaining
    elif remaining < 2.0 * dt:
        # two equal steps rather than one full step and a sliver
        dt = 0.5 * remaining

    rejected = 0
    while True:
        if dt < MIN_DT:
            raise StepSizeUnderflow(f'dt={dt:.3g} fell below {MIN_DT:g} at t={state.t:.17g}', t=state.t)
        try:
            values = integrator(model, domain, state.field, dt, rhs=state.rhs)
        except _REJECTED as exc:
            reason = str(exc)
        else:
            if np.all(np.isfinite(values)):
                break
            reason = 'non-finite values'
        logger.warning('[Flow] step rejected at t=%.6g dt=%.3g: %s', state.t, dt, reason)
        rejected += 1
        dt *= 0.5
        last = False

    t = config.t_end if last else state.t + dt
    if np.any(values <= 0):
        raise NonPositiveRadius(f'Radius reached {values.min():.17g} at t={t:.17g}', t=t)
    if values.max() >= config.ceiling:
        raise RadiusOverflow(
            f'Radius {values.max():.17g} reached the ceiling {config.ceiling:.17g} at t={t:.17g}', t=t
        )

    field = RadiusField(domain, model, values, config.margin)
    if config.conserve_project:
        try:
            field = conserve_project(model, domain, field, state.vol_d)
        except DomainError as exc:
            raise RadiusOverflow(f'Volume projection left the admissible radii at t={t:.17g}: {exc}', t=t)

    rhs, geometry = evaluate(model, domain, field)
    if geometry.min_u < config.u_floor:
        raise TubeLost(f'min u = {geometry.min_u:.3g} fell below {config.u_floor:g} at t={t:.17g}', t=t)
    return FlowState(
        t=t, field=field, sample=geometry, rhs=rhs, vol_d=enclosed_volume(model, domain, field),
        bound=state.bound, dt=dt, rejected=rejected, bound_is_ceiling=state.bound_is_ceiling,
        phi_constant=state.phi_constant,
    )


def _record(report, state, snapshot):
    if not report.rows or report.rows[-1].t < state.t:
        report.rows.append(SeriesPoint.from_state(state))
    if snapshot and (not report.snapshots or report.snapshots[-1].t < state.t):
        report.snapshots.append(Snapshot.from_state(state, report.config.domain))


def run(config):
    """Integrate config from t=0; expected failures end up in the report, never raised."""
    model, domain = config.model, config.domain
    logger.info(
        '[Flow] start %s on %s scheme=%s t_end=%g', model, domain, config.scheme.value, config.t_end
    )
    report = RunReport(config=config)
    state = initial_state(config)
    report.bound_is_ceiling = state.bound_is_ceiling
    r0 = state.field.values
    report.curvature_range = curvature_bound(model, r0.min(), r0.max())
    _record(report, state, snapshot=True)

    while True:
        if state.t >= config.t_end:
            report.termination = Termination.REACHED_T_END
            report.message = f'Reached t_end={config.t_end:g}'
            break
        if state.sup_rhs < config.steady_tol:
            report.termination = Termination.STEADY_STATE
            report.message = f'sup|rhs|={state.sup_rhs:.3g} below {config.steady_tol:g} at t={state.t:.6g}'
            break
        if report.steps >= config.max_steps:
            report.termination = Termination.STEP_LIMIT
            report.message = f'Stopped after {report.steps} steps at t={state.t:.6g}'
            break
        try:
            state = step(model, domain, state, config)
        except FlowTermination as exc:
            report.termination = exc.termination
            report.message = str(exc)
            break
        report.steps += 1
        report.rejected_steps += state.rejected
        if report.steps % config.record_every == 0:
            _record(report, state, snapshot=False)
            logger.debug(
                '[Flow] step %d t=%.6g dt=%.3g Hbar=%.12g min_u=%.6g max_v=%.6g max_phi=%.6g', report.steps,
                state.t, state.dt, state.hbar, state.min_u, state.max_v, state.max_phi,
            )
        if config.snapshot_every and report.steps % config.snapshot_every == 0:
            _record(report, state, snapshot=True)

    _record(report, state, snapshot=True)
    log = logger.info if report.succeeded else logger.warning
    log('[Flow] %s after %d steps (%d rejected): %s', report.termination, report.steps,
        report.rejected_steps, report.message)
    return report
