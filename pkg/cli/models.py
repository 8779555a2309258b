from django.db import models
from django.utils.translation import gettext_lazy as _


class RunManifest(models.Model):
    class Command(models.TextChoices):
        BOUNDS = "bounds", _("Speed bounds")
        SHOOT = "shoot", _("Single shot")
        SPEED = "speed", _("Threshold speed")
        PROFILE = "profile", _("Wave profile")
        PDE = "pde", _("PDE cross-check")
        SWEEP = "sweep", _("Parameter sweep")
        REPORT = "report", _("Full report")

    class Status(models.TextChoices):
        OK = "ok", _("Completed")
        PARTIAL = "partial", _("Partially completed")
        FAILED = "failed", _("Failed")

    command = models.CharField(max_length=20, choices=Command.choices)
    model_hash = models.CharField(max_length=64, blank=True)
    model_config = models.JSONField(default=dict, blank=True)
    # Tolerances, offsets and every other numerical input of the run
    parameters = models.JSONField(default=dict, blank=True)
    tool_version = models.CharField(max_length=20)
    outputs = models.JSONField(default=list, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    status = models.CharField(max_length=10, choices=Status.choices, default=Status.OK)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at"]
        indexes = [
            models.Index(fields=["command", "-created_at"], name="cli_runmani_command_5b1f0e_idx"),
            models.Index(fields=["model_hash"], name="cli_runmani_model_h_9c2d47_idx"),
        ]

    def __str__(self):
        return f"{self.command} - {self.model_hash[:12]}"

    def as_dict(self):
        return {
            "command": self.command,
            "model_hash": self.model_hash,
            "model_config": self.model_config,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "outputs": list(self.outputs),
            "status": self.status,
            "timestamp": self.created_at.isoformat() if self.created_at else None,
        }
