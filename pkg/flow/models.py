import logging
import math

from django.db import models, transaction

from .state import Termination

logger = logging.getLogger(__name__)


def _finite(value):
    """Databases store NaN and inf inconsistently; archive them as NULL."""
    value = float(value)
    return value if math.isfinite(value) else None


class FlowRun(models.Model):
    label = models.CharField(max_length=250, blank=True)
    preset = models.CharField(max_length=250, db_index=True)
    scheme = models.CharField(max_length=20)
    nodes = models.PositiveIntegerField()
    t_end = models.FloatField()
    termination = models.CharField(
        max_length=30,
        choices=[(member.value, member.value) for member in Termination],
    )
    message = models.TextField(blank=True)
    steps = models.PositiveIntegerField(default=0)
    rejected_steps = models.PositiveIntegerField(default=0)

    # ── Monitors ────────────────────────────────────────────────────────
    initial_area = models.FloatField()
    final_area = models.FloatField()
    initial_volume = models.FloatField()
    final_volume = models.FloatField()
    bound = models.FloatField(null=True, blank=True)
    bound_is_ceiling = models.BooleanField(default=False)
    min_u = models.FloatField()
    max_v = models.FloatField(null=True, blank=True)
    max_phi = models.FloatField(null=True, blank=True)

    config_text = models.TextField(blank=True, help_text="The config document the run was started from")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Flow Run'
        verbose_name_plural = 'Flow Runs'
        ordering = ['-created_at']

    def __str__(self):
        return f'{self.preset} {self.scheme} ({self.termination})'

    @property
    def volume_drift(self):
        return abs(self.final_volume - self.initial_volume) / self.initial_volume


class SeriesRow(models.Model):
    run = models.ForeignKey(FlowRun, related_name='rows', on_delete=models.CASCADE)
    t = models.FloatField()
    area = models.FloatField()
    volume = models.FloatField()
    hbar = models.FloatField()
    min_u = models.FloatField()
    max_r = models.FloatField()
    bound = models.FloatField(null=True, blank=True)
    sup_rhs = models.FloatField()
    boundary_hess_residual = models.FloatField()
    max_v = models.FloatField(null=True, blank=True)
    max_phi = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['run', 't']

    def __str__(self):
        return f'{self.run_id} @ t={self.t:g}'


def archive_report(report, config_text=''):
    """
    Store a RunReport with its series.
    Errors are logged but never abort the run; returns the FlowRun or None.
    """
    config = report.config
    first, last = report.initial, report.final
    try:
        with transaction.atomic():
            run = FlowRun.objects.create(
                label=config.label,
                preset=config.model.name,
                scheme=config.scheme.value,
                nodes=config.domain.n,
                t_end=config.t_end,
                termination=report.termination.value,
                message=report.message,
                steps=report.steps,
                rejected_steps=report.rejected_steps,
                initial_area=first.area,
                final_area=last.area,
                initial_volume=first.vol_d,
                final_volume=last.vol_d,
                bound=_finite(first.bound),
                bound_is_ceiling=report.bound_is_ceiling,
                min_u=min(row.min_u for row in report.rows),
                max_v=_finite(max(row.max_v for row in report.rows)),
                max_phi=_finite(max(row.max_phi for row in report.rows)),
                config_text=config_text,
            )
            SeriesRow.objects.bulk_create([
                SeriesRow(
                    run=run, t=row.t, area=row.area, volume=row.vol_d, hbar=row.hbar, min_u=row.min_u,
                    max_r=row.max_r, bound=_finite(row.bound), sup_rhs=row.sup_rhs,
                    boundary_hess_residual=row.boundary_hess_residual, max_v=_finite(row.max_v),
                    max_phi=_finite(row.max_phi),
                )
                for row in report.rows
            ])
    except Exception as e:
        logger.error("[Archive] Saving run %s (%s) failed: %s", config.label or config.model.name, report.termination, e)
        return None
    logger.info("[Archive] Stored run pk=%s with %d rows", run.pk, len(report.rows))
    return run
