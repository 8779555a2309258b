from ...services import SweepService
from ..base import WaveCommand


class Command(WaveCommand):
    help = "Tabulates the bounds (and optionally admissibility and c0) over a grid of alpha"

    command_name = "sweep"
    needs_model = False

    def add_command_arguments(self, parser):
        parser.add_argument("--alphas", type=float, nargs="*", default=[], help="alpha values")
        parser.add_argument("--gamma", type=float, default=1.0)
        parser.add_argument("--reaction", choices=["product", "monod"], default="product")
        parser.add_argument("--k", type=float, default=0.0, help="Monod constant")
        parser.add_argument("--speeds", type=float, nargs="*", default=[], help="Speeds to test")
        parser.add_argument("--threshold", action="store_true", help="Also bracket c0 per row")
        parser.add_argument("--tol", type=float, default=None, help="Quadrature tolerance")
        parser.add_argument("--jobs", type=int, default=1, help="Parallel rows (joblib)")

    def run(self, **options):
        table = SweepService.cmd_sweep(
            options["alphas"],
            gamma=options["gamma"],
            speeds=options["speeds"],
            with_threshold=options["threshold"],
            n_jobs=options["jobs"],
            reaction_kind=options["reaction"],
            k=options["k"],
            tol=options["tol"],
            tol_c=options["tol_c"],
            eps=options["eps"],
            delta=options["delta"],
        )
        self.write_csv("sweep.csv", table)
        self.write_json("sweep.json", {"rows": table.to_dict(orient="records")})

        self.stdout.write(f"{len(table)} rows")
        if (table["status"] == "failed").any():
            return "partial"
        return "ok"
