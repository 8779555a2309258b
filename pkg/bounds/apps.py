from django.apps import AppConfig


class BoundsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "bounds"
