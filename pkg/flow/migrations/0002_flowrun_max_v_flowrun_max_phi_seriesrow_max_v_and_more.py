# Generated by Django 6.0 on 2026-10-18 10:12

from django.db import migrations, models


class Migration(migrations.Migration):

    dependencies = [
        ('flow', '0001_initial'),
    ]

    operations = [
        migrations.AddField(
            model_name='flowrun',
            name='max_v',
            field=models.FloatField(blank=True, null=True),
        ),
        migrations.AddField(
            model_name='flowrun',
            name='max_phi',
            field=models.FloatField(blank=True, null=True),
        ),
        migrations.AddField(
            model_name='seriesrow',
            name='max_v',
            field=models.FloatField(blank=True, null=True),
        ),
        migrations.AddField(
            model_name='seriesrow',
            name='max_phi',
            field=models.FloatField(blank=True, null=True),
        ),
    ]
