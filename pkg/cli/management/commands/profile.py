from profiles.plots import write_profile_svg
from profiles.reconstruct import check_first_integral, reconstruct, resample_uniform
from shooting.shots import classify_regime
from shooting.threshold import find_threshold, refine_threshold, threshold_shot

from ..base import WaveCommand


class Command(WaveCommand):
    help = "Reconstructs the wave profile (eta, beta) at a speed, or at the threshold when none is given"

    command_name = "profile"

    def add_command_arguments(self, parser):
        parser.add_argument("--speed", type=float, default=None, help="Wave speed (default: threshold)")
        parser.add_argument("--anchor", type=float, default=0.5, help="eta at xi = 0 (default: 0.5)")
        parser.add_argument("--samples", type=int, default=1000, help="Uniform samples for the figure")
        parser.add_argument("--svg", action="store_true", help="Also write profile.svg")

    def run(self, **options):
        m = self.load_model(options)
        shooter = self.shooter(options)
        if options["speed"] is None:
            report = find_threshold(
                m, options["tol_c"], options["eps"], options["delta"], shoot_fn=shooter
            )
            refined = refine_threshold(m, report, shoot_fn=shooter)
            shot = threshold_shot(m, refined, shoot_fn=shooter)
            c0 = refined.c0
        else:
            shot = shooter(m, options["speed"], options["eps"], options["delta"], None)
            c0 = shot.speed

        profile = reconstruct(m, shot, options["anchor"])
        first_integral = check_first_integral(profile)
        regime = classify_regime(m, shot.speed, c0, shot)
        self.write_json(
            "profile.json",
            {
                "model": m.as_dict(),
                "profile": profile.as_dict(),
                "regime": str(regime),
                "tail": shot.tail.as_dict() if shot.tail else None,
                "first_integral": first_integral.as_dict(),
                "expected_edge_slope": m.edge_slope(shot.speed),
            },
        )
        self.write_csv("profile.csv", profile.frame())
        if options["svg"]:
            self.collector.svg(
                "profile.svg", write_profile_svg, resample_uniform(profile, options["samples"])
            )

        self.stdout.write(
            f"c = {profile.speed:.10g}: {regime.label} front, tau {profile.tau_status}, "
            f"first-integral residual {first_integral.residual_sup:.3e}"
        )
        if profile.partial:
            return "partial"
        return "ok" if first_integral.passed else "partial"
