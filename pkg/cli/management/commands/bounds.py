import pandas as pd

from bounds.estimates import compute_bounds

from ..base import WaveCommand


class Command(WaveCommand):
    help = "Computes the lower bound c_sharp (both branches) and the upper bound c_star"

    command_name = "bounds"

    def add_command_arguments(self, parser):
        parser.add_argument("--tol", type=float, default=None, help="Quadrature tolerance")

    def run(self, **options):
        m = self.load_model(options)
        bounds = compute_bounds(m, options["tol"])
        self.write_json("bounds.json", {"model": m.as_dict(), "bounds": bounds.as_dict()})
        self.write_csv("bounds.csv", pd.DataFrame([bounds.as_dict()]))

        self.stdout.write(f"Model: {m.family_tag}")
        self.stdout.write(
            f"c_sharp = {bounds.c_sharp:.10g} (branch 1 {bounds.c_sharp_branch1:.10g}, "
            f"branch 2 {bounds.c_sharp_branch2:.10g}, dominant {bounds.dominant_branch})"
        )
        self.stdout.write(f"c_star  = {bounds.c_star:.10g}")
        return "ok"
