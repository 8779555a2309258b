import logging

from django.core.management.base import BaseCommand, CommandError

from modelspec.specs import config_hash, model_from_config, read_config
from numerics.conf import get_setting
from numerics.exceptions import WaveError
from shooting.exceptions import Inconclusive

from ..cache import ShotCache
from ..writers import OutputCollector

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

# Options every Django command has; they never reach the manifest
DJANGO_OPTIONS = {
    "verbosity",
    "settings",
    "pythonpath",
    "traceback",
    "no_color",
    "force_color",
    "skip_checks",
    "out",
    "cache",
}


class WaveCommand(BaseCommand):
    """Shared flags, output collection and exit codes for the degenwave commands.

    Subclasses set ``command_name`` and implement ``run(**options)``, which returns
    the manifest status.
    """

    command_name = None
    needs_model = True

    def add_arguments(self, parser):
        if self.needs_model:
            parser.add_argument("--model", required=True, help="Path to the JSON model config")
        parser.add_argument("--out", default="out", help="Output directory (default: out)")
        parser.add_argument("--cache", default=None, help="Directory for memoized shots")
        parser.add_argument("--tol-c", type=float, default=None, help="Threshold bracket width")
        parser.add_argument("--eps", type=float, default=None, help="Launch offset from eta = 0")
        parser.add_argument("--delta", type=float, default=None, help="Stop offset from eta = 1")
        parser.add_argument("--json", action="store_true", help="Write JSON results")
        parser.add_argument("--csv", action="store_true", help="Write CSV tables")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        self.model = None
        self.config_data = {}
        self.shot_cache = None
        self.collector = OutputCollector(options["out"], self.command_name)
        self.want_json, self.want_csv = options["json"], options["csv"]
        if not (self.want_json or self.want_csv):
            self.want_json = self.want_csv = True

        try:
            status = self.run(**options)
        except Inconclusive as exc:
            self._finish(options, "failed")
            logger.error("%s inconclusive: %s", self.command_name, exc)
            raise CommandError(str(exc), returncode=EXIT_INCONCLUSIVE) from exc
        except (WaveError, ValueError) as exc:
            self._finish(options, "failed")
            logger.error("%s failed: %s", self.command_name, exc)
            raise CommandError(str(exc), returncode=EXIT_ERROR) from exc

        self._finish(options, status or "ok")
        if status == "inconclusive":
            raise CommandError("Result is inconclusive; shrink --delta", returncode=EXIT_INCONCLUSIVE)
        self.stdout.write(self.style.SUCCESS(f"Wrote {len(self.collector.files)} files to {options['out']}"))

    def load_model(self, options):
        self.config_data = read_config(options["model"])
        self.model = model_from_config(self.config_data)
        return self.model

    def shooter(self, options):
        """Memoizing shoot function; persistent when --cache is given."""
        if self.shot_cache is None:
            self.shot_cache = ShotCache(options.get("cache"))
        return self.shot_cache.shoot

    def resolved(self, options, name, setting):
        value = options.get(name)
        return get_setting(setting) if value is None else value

    def parameters(self, options):
        parameters = {key: value for key, value in options.items() if key not in DJANGO_OPTIONS}
        parameters["defaults"] = {
            name: get_setting(name)
            for name in ("RTOL", "ATOL", "SHOOT_METHOD", "EPS", "DELTA", "TOL_C", "QUAD_TOL", "FIT_DELTA", "SHARP_TOL")
        }
        return parameters

    def write_json(self, name, data):
        if self.want_json:
            self.collector.json(name, data)

    def write_csv(self, name, frame):
        if self.want_csv:
            self.collector.csv(name, frame)

    def _finish(self, options, status):
        if status == "inconclusive":
            status = "partial"
        if self.shot_cache is not None:
            logger.info("Shot cache: %d hits, %d misses", self.shot_cache.hits, self.shot_cache.misses)
        self.collector.finish(
            model_hash=config_hash(self.config_data) if self.config_data else "",
            model_config=self.config_data,
            parameters=self.parameters(options),
            status=status,
        )
