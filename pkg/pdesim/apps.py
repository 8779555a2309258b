from django.apps import AppConfig


class PdesimConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "pdesim"
    verbose_name = "PDE cross-check"
