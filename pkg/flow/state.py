"""
Value types of the flow loop: how a run is configured, what a time step
produces and how a run ends.
"""

import enum
import math
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from kernels.errors import TubeflowError

DEFAULT_U_FLOOR = 1e-3
DEFAULT_MARGIN = 1e-3
DEFAULT_CFL = 0.9
MIN_DT = 1e-14
DEFAULT_PHI_CONSTANT = 1.0


class Termination(enum.Enum):
    REACHED_T_END = 'ReachedTEnd'
    STEADY_STATE = 'SteadyState'
    TUBE_LOST = 'TubeLost'
    RADIUS_OVERFLOW = 'RadiusOverflow'
    NON_POSITIVE_RADIUS = 'NonPositiveRadius'
    STEP_SIZE_UNDERFLOW = 'StepSizeUnderflow'
    STEP_LIMIT = 'StepLimit'

    @property
    def is_normal(self):
        return self in (Termination.REACHED_T_END, Termination.STEADY_STATE)

    def __str__(self):
        return self.value


class Scheme(enum.Enum):
    EXPLICIT_EULER = 'explicit-euler'
    RK4 = 'rk4'
    IMEX = 'imex'

    @property
    def order(self):
        return 4 if self is Scheme.RK4 else 1


# ─────────────────────────────────────────────
# Terminations raised inside a step
# ─────────────────────────────────────────────

class FlowTermination(TubeflowError):
    termination = None

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class TubeLost(FlowTermination):
    termination = Termination.TUBE_LOST


class RadiusOverflow(FlowTermination):
    termination = Termination.RADIUS_OVERFLOW


class NonPositiveRadius(FlowTermination):
    termination = Termination.NON_POSITIVE_RADIUS


class StepSizeUnderflow(FlowTermination):
    termination = Termination.STEP_SIZE_UNDERFLOW


class RunConfigError(TubeflowError, ValueError):
    """A RunConfig violates its invariants."""


# ─────────────────────────────────────────────
# Configuration
# ─────────────────────────────────────────────

@dataclass
class RunConfig:
    model: object
    domain: object
    initial: object
    scheme: Scheme = Scheme.RK4
    dt: Optional[float] = None
    cfl: Optional[float] = None
    t_end: float = 1.0
    steady_tol: float = 1e-10
    u_floor: float = DEFAULT_U_FLOOR
    margin: float = DEFAULT_MARGIN
    record_every: int = 1
    snapshot_every: int = 0
    conserve_project: bool = False
    max_steps: int = 1_000_000
    phi_constant: float = DEFAULT_PHI_CONSTANT
    label: str = ''

    def __post_init__(self):
        self.scheme = Scheme(self.scheme)
        if self.dt is not None and self.cfl is not None:
            raise RunConfigError('Give either a fixed dt or a CFL factor, not both')
        if self.dt is None and self.cfl is None:
            self.cfl = DEFAULT_CFL
        if self.dt is not None and not (math.isfinite(self.dt) and self.dt > 0):
            raise RunConfigError(f'dt must be positive, got {self.dt}')
        if self.cfl is not None and not 0 < self.cfl <= 1:
            raise RunConfigError(f'CFL factor must lie in (0, 1], got {self.cfl}')
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise RunConfigError(f't_end must be >= 0, got {self.t_end}')
        if not self.steady_tol >= 0:
            raise RunConfigError(f'steady_tol must be >= 0, got {self.steady_tol}')
        if not 0 <= self.u_floor < 1:
            raise RunConfigError(f'u_floor must lie in [0, 1), got {self.u_floor}')
        if not 0 < self.margin < 1:
            raise RunConfigError(f'margin must lie in (0, 1), got {self.margin}')
        if self.record_every < 1:
            raise RunConfigError('record_every must be >= 1')
        if self.snapshot_every < 0:
            raise RunConfigError('snapshot_every must be >= 0')
        if self.max_steps < 1:
            raise RunConfigError('max_steps must be >= 1')
        if not (math.isfinite(self.phi_constant) and self.phi_constant > 0):
            raise RunConfigError(f'phi_constant must be positive, got {self.phi_constant}')
        if self.initial.domain is not self.domain:
            raise RunConfigError('The initial field lives on a different domain')
        # runs need a finite ceiling; noncompact models without r_max fail here
        self.ceiling = self.model.ceiling(self.margin)


# ─────────────────────────────────────────────
# State and report
# ─────────────────────────────────────────────

@dataclass(eq=False)
class FlowState:
    t: float
    field: object
    sample: object
    rhs: np.ndarray
    vol_d: float
    bound: float
    dt: float = 0.0
    rejected: int = 0
    bound_is_ceiling: bool = False
    phi_constant: float = DEFAULT_PHI_CONSTANT

    @property
    def hbar(self):
        return self.sample.hbar

    @property
    def area(self):
        return self.sample.area

    @property
    def min_u(self):
        return self.sample.min_u

    @property
    def max_v(self):
        return self.sample.max_v

    @property
    def max_phi(self):
        return self.sample.max_phi(self.phi_constant)

    @property
    def max_r(self):
        return self.sample.max_r

    @property
    def sup_rhs(self):
        return float(np.max(np.abs(self.rhs)))

    @property
    def boundary_hessian_residual(self):
        return max(abs(v) for v in self.sample.boundary_hessian_residual)

    @property
    def deviation(self):
        """Sup-norm distance of r from its mean over the nodes."""
        r = self.field.values
        return float(np.max(np.abs(r - r.mean())))

    @property
    def diagnostics(self):
        return {
            'area': self.area,
            'volD': self.vol_d,
            'min_u': self.min_u,
            'max_v': self.max_v,
            'max_phi': self.max_phi,
            'max_r': self.max_r,
            'bound': self.bound,
            'boundary_hessian_residual': self.boundary_hessian_residual,
            'sup_rhs': self.sup_rhs,
        }


SERIES_COLUMNS = ('t', 'area', 'volD', 'Hbar', 'min_u', 'max_r', 'bound', 'sup_rhs', 'boundary_hess_residual',
                  'max_v', 'max_phi')


@dataclass(frozen=True)
class SeriesPoint:
    t: float
    area: float
    vol_d: float
    hbar: float
    min_u: float
    max_r: float
    bound: float
    sup_rhs: float
    boundary_hess_residual: float
    deviation: float
    max_v: float = math.nan
    max_phi: float = math.nan

    @classmethod
    def from_state(cls, state):
        return cls(
            t=state.t,
            area=state.area,
            vol_d=state.vol_d,
            hbar=state.hbar,
            min_u=state.min_u,
            max_r=state.max_r,
            bound=state.bound,
            sup_rhs=state.sup_rhs,
            boundary_hess_residual=state.boundary_hessian_residual,
            deviation=state.deviation,
            max_v=state.max_v,
            max_phi=state.max_phi,
        )

    def as_row(self):
        return (self.t, self.area, self.vol_d, self.hbar, self.min_u, self.max_r,
                self.bound, self.sup_rhs, self.boundary_hess_residual, self.max_v, self.max_phi)


@dataclass(frozen=True, eq=False)
class Snapshot:
    t: float
    s: np.ndarray
    r: np.ndarray
    rho: np.ndarray
    u: np.ndarray

    @classmethod
    def from_state(cls, state, domain):
        return cls(t=state.t, s=domain.s, r=state.field.values, rho=state.sample.rho, u=state.sample.u)


@dataclass(eq=False)
class RunReport:
    config: RunConfig
    rows: list = dataclass_field(default_factory=list)
    snapshots: list = dataclass_field(default_factory=list)
    termination: Optional[Termination] = None
    message: str = ''
    steps: int = 0
    rejected_steps: int = 0
    bound_is_ceiling: bool = False
    curvature_range: tuple = (math.nan, math.nan)

    @property
    def succeeded(self):
        return self.termination is not None and self.termination.is_normal

    @property
    def initial(self):
        return self.rows[0]

    @property
    def final(self):
        return self.rows[-1]

    def volume_drift(self):
        """max_t |volD(t) - volD(0)| / volD(0) over the recorded rows."""
        v0 = self.rows[0].vol_d
        return max(abs(row.vol_d - v0) for row in self.rows) / v0

    def deviation_history(self):
        return [(row.t, row.deviation) for row in self.rows]

    def deviation_decay(self):
        """Ratio of the initial to the final deviation from a constant profile (inf if it vanished)."""
        first, last = self.rows[0].deviation, self.rows[-1].deviation
        if last == 0:
            return math.inf
        return first / last

    def area_increases(self, tolerance=1e-10):
        """Recorded steps where the area went up by more than tolerance."""
        return [
            (before.t, after.t, after.area - before.area)
            for before, after in zip(self.rows, self.rows[1:])
            if after.area > before.area + tolerance
        ]
