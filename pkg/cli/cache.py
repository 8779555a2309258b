import hashlib
import json
import logging

from django.core.cache import caches
from django.core.cache.backends.filebased import FileBasedCache

from numerics.conf import get_setting
from numerics.integrate import IntegratorConfig
from shooting.shots import shoot

logger = logging.getLogger(__name__)


class ShotCache:
    """Memoizes shots by (model fingerprint, c, eps, delta, tolerances).

    With a directory the entries live in a file-based cache shared between
    runs; otherwise the in-process "shots" cache is used.
    """

    def __init__(self, directory=None):
        if directory:
            self.backend = FileBasedCache(
                str(directory), {"TIMEOUT": None, "OPTIONS": {"MAX_ENTRIES": 100_000}}
            )
        else:
            self.backend = caches["shots"]
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(m, c, eps, delta, config):
        payload = json.dumps(
            {
                "model": m.fingerprint,
                "c": repr(float(c)),
                "eps": repr(float(eps)),
                "delta": repr(float(delta)),
                "config": {name: repr(value) for name, value in config.as_dict().items()},
            },
            sort_keys=True,
        )
        return "shot:" + hashlib.sha256(payload.encode()).hexdigest()

    def shoot(self, m, c, eps=None, delta=None, config=None):
        eps = get_setting("EPS") if eps is None else eps
        delta = get_setting("DELTA") if delta is None else delta
        config = config or IntegratorConfig.from_settings(method=get_setting("SHOOT_METHOD"))
        key = self.key(m, c, eps, delta, config)
        shot = self.backend.get(key)
        if shot is not None:
            self.hits += 1
            return shot
        self.misses += 1
        shot = shoot(m, c, eps, delta, config)
        self.backend.set(key, shot, timeout=None)
        return shot

    def stats(self):
        return {"hits": self.hits, "misses": self.misses}
