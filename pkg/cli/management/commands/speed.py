import pandas as pd

from shooting.threshold import find_threshold

from ..base import WaveCommand


class Command(WaveCommand):
    help = "Brackets the threshold speed c0 by bisection between the bounds"

    command_name = "speed"

    def run(self, **options):
        m = self.load_model(options)
        report = find_threshold(
            m,
            tol_c=options["tol_c"],
            eps=options["eps"],
            delta=options["delta"],
            shoot_fn=self.shooter(options),
        )
        self.write_json("speed.json", report.as_dict())
        self.write_csv(
            "evaluations.csv",
            pd.DataFrame(sorted(report.evaluations), columns=["speed", "admissible"]),
        )

        self.stdout.write(
            f"c0 = {report.c0:.10g} in [{report.c_lo:.10g}, {report.c_hi:.10g}] "
            f"after {len(report.evaluations)} speeds"
        )
        if not report.monotone:
            self.stdout.write(self.style.WARNING("Admissibility was not monotone in c"))
        if not report.contained:
            self.stdout.write(self.style.WARNING("c0 lies outside [c_sharp, c_star]"))
        return "ok"
