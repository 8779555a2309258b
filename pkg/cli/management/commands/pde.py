import pandas as pd

from pdesim.solver import FACE_RULES, INITIAL_KINDS, PdeConfig, run_pde

from ..base import WaveCommand


class Command(WaveCommand):
    help = "Runs the finite-volume PDE simulation and fits the front speed"

    command_name = "pde"

    def add_command_arguments(self, parser):
        parser.add_argument("--cells", type=int, default=None, help="Number of cells")
        parser.add_argument("--length", type=float, default=None, help="Domain length")
        parser.add_argument("--time", type=float, default=None, help="End time")
        parser.add_argument("--face-rule", choices=FACE_RULES, default=None)
        parser.add_argument("--initial", choices=INITIAL_KINDS, default=None)
        parser.add_argument("--no-reaction", action="store_true", help="Switch the reaction off")

    def run(self, **options):
        m = self.load_model(options)
        overrides = {
            "cells": options["cells"],
            "length": options["length"],
            "end_time": options["time"],
            "face_rule": options["face_rule"],
        }
        if options["initial"]:
            overrides["initial_kind"] = options["initial"]
        if options["no_reaction"]:
            overrides["reaction_enabled"] = False
        config = PdeConfig.from_settings(**overrides)
        run = run_pde(m, config)

        self.write_json("pde.json", {"model": m.as_dict(), "run": run.as_dict()})
        self.write_csv("fronts.csv", run.frame())
        self.write_csv("final_state.csv", pd.DataFrame({"x": run.x, "n": run.n, "b": run.b}))

        if run.speed is None:
            self.stdout.write(self.style.WARNING("No front speed could be fitted"))
            return "partial"
        self.stdout.write(f"Front speed {run.speed:.6g} +/- {run.stderr:.2g}")
        return "ok"
