"""
Named space models.

Two kinds of presets exist:

  space-form-derived  complete models for tubes over a totally geodesic S^p in
                      S^{n+1} (compact) or H^p in H^{n+1} (noncompact). The
                      multiplicities follow from the classical tube: the fibre
                      is a round S^{n-p}, the base directions are p-dimensional.
  table-config        reflective submanifolds of rank one and rank two symmetric
                      spaces. The sign, K and k0 are fixed by the curvature
                      statements for each row; the root multiplicities are not
                      listed anywhere and must be supplied by the config
                      (model.mult_vertical / model.mult_horizontal).
"""

import enum
import re
from dataclasses import dataclass

from .errors import ModelError, PresetIncomplete
from .spaces import Curvature, SpaceModel

MAX_SPACEFORM_DIMENSION = 6


class Provenance(enum.Enum):
    SPACE_FORM = 'space-form-derived'
    TABLE = 'table-config'


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    provenance: Provenance
    epsilon: Curvature
    ratios: tuple
    k0: float
    mult_vertical: tuple = None
    mult_horizontal: tuple = None

    @property
    def is_complete(self):
        return self.mult_vertical is not None and self.mult_horizontal is not None

    def model(self, b=1.0, mult_vertical=None, mult_horizontal=None, r_cut=None, r_max=None):
        """
        Build a validated SpaceModel.

        Explicit multiplicities override the preset's own; a table stub without
        them raises PresetIncomplete.
        """
        vertical = mult_vertical if mult_vertical is not None else self.mult_vertical
        horizontal = mult_horizontal if mult_horizontal is not None else self.mult_horizontal
        if vertical is None or horizontal is None:
            raise PresetIncomplete(
                f"Preset '{self.name}' has no multiplicities; set model.mult_vertical "
                f"and model.mult_horizontal in the config"
            )
        return SpaceModel(
            epsilon=self.epsilon,
            b=b,
            ratios=self.ratios,
            mult_vertical=dict(vertical),
            mult_horizontal=dict(horizontal),
            k0=self.k0,
            r_cut=r_cut,
            r_max=r_max,
            name=self.name,
        )


def spaceform(n, p, curvature):
    """Tube over a totally geodesic p-dimensional subspace of the (n+1)-dimensional space form."""
    curvature = Curvature.parse(curvature)
    if not 1 <= p <= n - 1:
        raise ModelError(f'SpaceForm needs 1 <= p <= n-1, got n={n}, p={p}')
    ambient = 'S' if curvature is Curvature.COMPACT else 'H'
    return Preset(
        name=f'spaceform-{n}-{p}-{curvature.label}',
        description=f'Tube over totally geodesic {ambient}^{p} in {ambient}^{n + 1}',
        provenance=Provenance.SPACE_FORM,
        epsilon=curvature,
        ratios=(1.0,),
        k0=1.0,
        mult_vertical=((1, n - p),),
        mult_horizontal=((1, p),),
    )


def _stub(name, description, curvature, ratios, k0):
    return Preset(
        name=name,
        description=description,
        provenance=Provenance.TABLE,
        epsilon=curvature,
        ratios=ratios,
        k0=k0,
    )


# ─────────────────────────────────────────────
# Rank one: Helgason spheres and polars.
# R(., xi)xi is a multiple of the identity on TF, so the gradient
# lies in the k = 1 block.
# ─────────────────────────────────────────────

_RANK_ONE_COMPACT = [
    ('RP^{n+1}', 'S^1 (Helgason sphere)', 'RP^n (polar)'),
    ('CP^{n+1}', 'S^2 (Helgason sphere)', 'CP^n (polar)'),
    ('QP^{n+1}', 'S^4 (Helgason sphere)', 'QP^n (polar)'),
    ('OP^2', 'S^8 (Helgason sphere)', 'S^8 (polar)'),
    ('RP^{n+1}', 'RP^n (polar)', 'S^1 (Helgason sphere)'),
    ('CP^{n+1}', 'CP^n (polar)', 'S^2 (Helgason sphere)'),
    ('QP^{n+1}', 'QP^n (polar)', 'S^4 (Helgason sphere)'),
    ('OP^2', 'S^8 (polar)', 'S^8 (Helgason sphere)'),
]

_RANK_ONE_NONCOMPACT = [
    ('H^n', 'H^1', 'H^n'),
    ('CH^{n+1}', 'H^2', 'CH^n'),
    ('QH^{n+1}', 'H^4', 'QH^n'),
    ('OH^2', 'H^8', 'H^8'),
    ('H^n', 'H^n', 'H^1'),
    ('CH^{n+1}', 'CH^n', 'H^2'),
    ('QH^{n+1}', 'QH^n', 'H^4'),
    ('OH^2', 'H^8', 'H^8'),
]

# ─────────────────────────────────────────────
# Rank two: meridians and their noncompact duals.
# Rows (1)-(4): the distribution D = TS^1 (TH^1) sits in the 2*beta block.
# Row (5): K = {1}; one TSp(1) factor sits in p_0, the other in p_beta.
# ─────────────────────────────────────────────

_RANK_TWO_COMPACT = [
    ('SU(3)/SO(3)', 'S^1.S^2 (meridian)', 'RP^2 (polar)', 'TS^1'),
    ('SU(6)/Sp(3)', 'S^1.S^5 (meridian)', 'QP^2 (polar)', 'TS^1'),
    ('SU(3)', 'S^1.S^3 (meridian)', 'CP^2 (polar)', 'TS^1'),
    ('E6/F4', 'S^1.S^9 (meridian)', 'OP^2 (polar)', 'TS^1'),
    ('Sp(2)', 'Sp(1)xSp(1) (meridian)', 'S^4 (polar)', 'one of the TSp(1)'),
]

_RANK_TWO_NONCOMPACT = [
    ('SL(3,R)/SO(3)', 'H^1xH^2', 'H^2', 'TH^1'),
    ('SU*(6)/Sp(3)', 'H^1xH^5', 'QH^2', 'TH^1'),
    ('SL(3,R)', 'H^1xH^3', 'CH^2', 'TH^1'),
    ('E6(-26)/F4', 'H^1xH^9', 'OH^2', 'TH^1'),
    ('Sp(2,C)', 'Sp(1,C)xSp(1,C)', 'H^4', 'one of the TSp(1,C)'),
]


def _table_presets():
    presets = []
    for curvature, rows in ((Curvature.COMPACT, _RANK_ONE_COMPACT),
                            (Curvature.NONCOMPACT, _RANK_ONE_NONCOMPACT)):
        for index, (ambient, base, umbrella) in enumerate(rows, start=1):
            presets.append(_stub(
                f'rank1-{curvature.label}-{index}',
                f'{base} in {ambient}, normal umbrella {umbrella}',
                curvature, (1.0, 2.0), 1.0,
            ))
    for curvature, rows in ((Curvature.COMPACT, _RANK_TWO_COMPACT),
                            (Curvature.NONCOMPACT, _RANK_TWO_NONCOMPACT)):
        for index, (ambient, base, umbrella, distribution) in enumerate(rows, start=1):
            description = f'{base} in {ambient}, normal umbrella {umbrella}, D = {distribution}'
            if index < 5:
                presets.append(_stub(
                    f'rank2-{curvature.label}-{index}', description, curvature, (1.0, 2.0), 2.0,
                ))
            else:
                for k0 in (0.0, 1.0):
                    presets.append(_stub(
                        f'rank2-{curvature.label}-{index}-k0-{int(k0)}',
                        f'{description} (gradient block k0 = {int(k0)})',
                        curvature, (1.0,), k0,
                    ))
    return presets


def preset_catalogue():
    presets = []
    for curvature in (Curvature.COMPACT, Curvature.NONCOMPACT):
        for n in range(2, MAX_SPACEFORM_DIMENSION + 1):
            for p in range(1, n):
                presets.append(spaceform(n, p, curvature))
    presets.extend(_table_presets())
    return presets


_SPACEFORM_NAME = re.compile(r'^spaceform-(\d+)-(\d+)-(compact|noncompact)$')


def get_preset(name):
    """Look a preset up by name; space forms of any dimension are built on demand."""
    match = _SPACEFORM_NAME.match(name.strip())
    if match:
        n, p, curvature = match.groups()
        return spaceform(int(n), int(p), curvature)
    for preset in _table_presets():
        if preset.name == name.strip():
            return preset
    raise ModelError(f"Unknown preset '{name}'")
