from profiles.plots import write_profile_svg
from profiles.reconstruct import resample_uniform

from ...services import ReportService
from ..base import WaveCommand


class Command(WaveCommand):
    help = "Bundles bounds, threshold speed, profiles at c0 and c0 + 0.5 and an optional PDE check"

    command_name = "report"

    def add_command_arguments(self, parser):
        parser.add_argument("--tol", type=float, default=None, help="Quadrature tolerance")
        parser.add_argument("--pde", action="store_true", help="Add the PDE cross-check")
        parser.add_argument("--svg", action="store_true", help="Write profile figures")

    def run(self, **options):
        m = self.load_model(options)
        bundle = ReportService.cmd_report(
            m,
            self.config_data,
            tol=options["tol"],
            tol_c=options["tol_c"],
            eps=options["eps"],
            delta=options["delta"],
            pde=options["pde"],
            shooter=self.shooter(options),
        )
        self.write_json("report.json", bundle.as_dict())
        for name, profile in sorted(bundle.profiles.items()):
            self.write_csv(f"profile_{name}.csv", profile.frame())
            if options["svg"]:
                self.collector.svg(f"profile_{name}.svg", write_profile_svg, resample_uniform(profile))
        if bundle.pde_run is not None:
            self.write_csv("pde_fronts.csv", bundle.pde_run.frame())

        for section, data in bundle.sections.items():
            self.stdout.write(f"{section}: {data.get('status', 'ok')}")
        return bundle.status
