# Generated by Django 5.1.6 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('bounds', 'Speed bounds'), ('shoot', 'Single shot'), ('speed', 'Threshold speed'), ('profile', 'Wave profile'), ('pde', 'PDE cross-check'), ('sweep', 'Parameter sweep'), ('report', 'Full report')], max_length=20)),
                ('model_hash', models.CharField(blank=True, max_length=64)),
                ('model_config', models.JSONField(blank=True, default=dict)),
                ('parameters', models.JSONField(blank=True, default=dict)),
                ('tool_version', models.CharField(max_length=20)),
                ('outputs', models.JSONField(blank=True, default=list)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('status', models.CharField(choices=[('ok', 'Completed'), ('partial', 'Partially completed'), ('failed', 'Failed')], default='ok', max_length=10)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['command', '-created_at'], name='cli_runmani_command_5b1f0e_idx'), models.Index(fields=['model_hash'], name='cli_runmani_model_h_9c2d47_idx')],
            },
        ),
    ]
