import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed ids and no timestamp keep repeated runs byte-identical
SVG_RC = {"svg.hashsalt": "degenwave", "svg.fonttype": "none"}


def write_profile_svg(profile, path, title=None):
    """Two panels sharing xi: eta rising on top, beta falling below."""
    path = Path(path)
    with plt.rc_context(SVG_RC):
        fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(7, 5.5))
        top.plot(profile.xi, profile.eta, color="tab:blue", lw=1.5)
        top.set_ylabel(r"$\eta(\xi)$")
        top.set_ylim(-0.05, 1.05)
        bottom.plot(profile.xi, profile.beta, color="tab:red", lw=1.5)
        bottom.set_ylabel(r"$\beta(\xi)$")
        bottom.set_xlabel(r"$\xi$")
        bottom.set_ylim(-0.05, 1.05)
        if profile.tau_finite and math.isfinite(profile.tau):
            for axis in (top, bottom):
                axis.axvline(profile.tau, color="0.4", ls="--", lw=1.0, label=r"$\tau$")
            bottom.legend(loc="upper right")
        fig.suptitle(title or f"Wave profile at c = {profile.speed:.6g}")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.info("Wrote profile figure %s", path)
    return path
