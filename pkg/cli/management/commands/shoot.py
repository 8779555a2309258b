from ..base import WaveCommand


class Command(WaveCommand):
    help = "Integrates the phase-plane trajectory B_c for one speed"

    command_name = "shoot"

    def add_command_arguments(self, parser):
        parser.add_argument("--speed", type=float, required=True, help="Wave speed c")

    def run(self, **options):
        m = self.load_model(options)
        shot = self.shooter(options)(m, options["speed"], options["eps"], options["delta"], None)
        self.write_json("shot.json", {"model": m.as_dict(), "shot": shot.as_dict()})
        self.write_csv("shot.csv", shot.frame())

        self.stdout.write(
            f"c = {shot.speed:.10g}: B_end = {shot.B_end:.6e} (threshold {shot.A_thr:.6e}), "
            f"regime {shot.regime}"
        )
        if shot.admissible is None:
            return "inconclusive"
        return "ok"
