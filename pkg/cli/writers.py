"""
Deterministic result files and the run manifest.

JSON is written with sorted keys and Python float reprs, CSV through pandas
with a fixed float format, so identical inputs give identical bytes.
"""

import json
import logging
import math
from pathlib import Path

import numpy as np
from django.conf import settings
from django.db import DatabaseError

from .models import RunManifest

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.15g"


def to_jsonable(value):
    """Plain JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if value is None or isinstance(value, str):
        return value
    return str(value)


def dumps(data):
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, data):
    path = Path(path)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def write_csv(path, frame):
    path = Path(path)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return path


class OutputCollector:
    """Single writer for a command's files; records them for the manifest."""

    def __init__(self, out_dir, command):
        self.out_dir = Path(out_dir)
        self.command = command
        self.files = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _register(self, path):
        self.files.append(path.name)
        logger.debug("Wrote %s", path)
        return path

    def json(self, name, data):
        return self._register(write_json(self.out_dir / name, data))

    def csv(self, name, frame):
        return self._register(write_csv(self.out_dir / name, frame))

    def svg(self, name, writer, *args, **kwargs):
        return self._register(Path(writer(*args, path=self.out_dir / name, **kwargs)))

    def finish(self, model_hash="", model_config=None, parameters=None, status="ok"):
        """Write manifest.json and store a RunManifest row when a database is available."""
        manifest = {
            "command": self.command,
            "model_hash": model_hash,
            "model_config": model_config or {},
            "parameters": parameters or {},
            "tool_version": settings.DEGENWAVE_VERSION,
            "outputs": sorted(self.files),
            "status": status,
        }
        row = None
        try:
            row = RunManifest.objects.create(output_dir=str(self.out_dir), **to_jsonable(manifest))
            manifest["timestamp"] = row.created_at.isoformat()
        except DatabaseError as exc:
            logger.warning("Run manifest not stored in the database: %s", exc)
        write_json(self.out_dir / "manifest.json", manifest)
        return row
