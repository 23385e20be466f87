# Generated by Django 6.0 on 2026-03-02 09:41

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='FlowRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('label', models.CharField(blank=True, max_length=250)),
                ('preset', models.CharField(db_index=True, max_length=250)),
                ('scheme', models.CharField(max_length=20)),
                ('nodes', models.PositiveIntegerField()),
                ('t_end', models.FloatField()),
                ('termination', models.CharField(choices=[('ReachedTEnd', 'ReachedTEnd'), ('SteadyState', 'SteadyState'), ('TubeLost', 'TubeLost'), ('RadiusOverflow', 'RadiusOverflow'), ('NonPositiveRadius', 'NonPositiveRadius'), ('StepSizeUnderflow', 'StepSizeUnderflow'), ('StepLimit', 'StepLimit')], max_length=30)),
                ('message', models.TextField(blank=True)),
                ('steps', models.PositiveIntegerField(default=0)),
                ('rejected_steps', models.PositiveIntegerField(default=0)),
                ('initial_area', models.FloatField()),
                ('final_area', models.FloatField()),
                ('initial_volume', models.FloatField()),
                ('final_volume', models.FloatField()),
                ('bound', models.FloatField(blank=True, null=True)),
                ('bound_is_ceiling', models.BooleanField(default=False)),
                ('min_u', models.FloatField()),
                ('config_text', models.TextField(blank=True, help_text='The config document the run was started from')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Flow Run',
                'verbose_name_plural': 'Flow Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SeriesRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('t', models.FloatField()),
                ('area', models.FloatField()),
                ('volume', models.FloatField()),
                ('hbar', models.FloatField()),
                ('min_u', models.FloatField()),
                ('max_r', models.FloatField()),
                ('bound', models.FloatField(blank=True, null=True)),
                ('sup_rhs', models.FloatField()),
                ('boundary_hess_residual', models.FloatField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='flow.flowrun')),
            ],
            options={
                'ordering': ['run', 't'],
            },
        ),
    ]
