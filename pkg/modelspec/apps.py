from django.apps import AppConfig


class ModelspecConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "modelspec"
    verbose_name = "Problem instances"
