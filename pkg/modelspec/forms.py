from django import forms
from django.core.exceptions import ValidationError

from .specs import REACTION_CHOICES


class ModelConfigForm(forms.Form):
    """Validates the JSON model config once the nested reaction is flattened."""

    family = forms.ChoiceField(choices=[("power_law", "Power law")])
    alpha = forms.FloatField()
    gamma = forms.FloatField()
    reaction_kind = forms.ChoiceField(
        choices=[(kind, kind) for kind in REACTION_CHOICES], required=False
    )
    k = forms.FloatField(required=False, min_value=0.0)
    bounds_only = forms.BooleanField(required=False)

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict):
            data = {}
        reaction = data.get("reaction") or {}
        if not isinstance(reaction, dict):
            reaction = {"kind": reaction}
        flat = {
            "family": data.get("family"),
            "alpha": data.get("alpha"),
            "gamma": data.get("gamma"),
            "reaction_kind": reaction.get("kind", "product"),
            "k": reaction.get("k"),
            "bounds_only": bool(data.get("bounds_only", False)),
        }
        return cls(data={key: value for key, value in flat.items() if value is not None})

    def clean_alpha(self):
        alpha = self.cleaned_data["alpha"]
        if not alpha > 0:
            raise ValidationError("alpha must be positive")
        return alpha

    def clean_gamma(self):
        gamma = self.cleaned_data["gamma"]
        if not gamma > 0:
            raise ValidationError("gamma must be positive")
        return gamma

    def clean(self):
        cleaned_data = super().clean()
        kind = cleaned_data.get("reaction_kind") or "product"
        cleaned_data["reaction_kind"] = kind
        if kind == "product":
            cleaned_data["k"] = None
        elif cleaned_data.get("k") is None and "k" not in self.errors:
            cleaned_data["k"] = 0.0
        return cleaned_data
