import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence

import pandas as pd
from joblib import Parallel, delayed

from bounds.estimates import compute_bounds, compute_c_sharp
from bounds.exceptions import UnboundedRatio
from modelspec.audit import audit_assumptions
from modelspec.specs import model_from_config
from numerics.exceptions import WaveError
from pdesim.solver import run_pde
from profiles.reconstruct import (
    check_first_integral,
    gronwall_envelope,
    reconstruct,
)
from shooting.shots import classify_regime, shoot
from shooting.threshold import conjecture_gap, find_threshold, refine_threshold, threshold_shot

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "alpha",
    "gamma",
    "c_sharp_branch1",
    "c_sharp_branch2",
    "c_sharp",
    "c_star",
    "dominant_branch",
    "c0",
    "status",
    "detail",
]
# Offset above c0 for the classical profile and the stop offset it is shot with
CLASSICAL_OFFSET = 0.5
CLASSICAL_DELTA = 1e-6


def admissible_column(speed):
    return f"admissible_c={speed:g}"


def _failed(detail):
    return {"status": "failed", "detail": detail}


def _sweep_row(alpha, gamma, reaction, speeds, with_threshold, tol, tol_c, eps, delta):
    """One sweep row; failures are recorded in the row, never raised."""
    row = {column: math.nan for column in SWEEP_COLUMNS}
    row.update(alpha=float(alpha), gamma=float(gamma), dominant_branch="", status="ok", detail="")
    for speed in speeds:
        row[admissible_column(speed)] = None

    config = {"family": "power_law", "alpha": alpha, "gamma": gamma, "reaction": dict(reaction)}
    try:
        m = model_from_config(config)
        try:
            bounds = compute_bounds(m, tol)
        except UnboundedRatio as exc:
            b1, b2, c_sharp, _ = compute_c_sharp(m, tol)
            row.update(c_sharp_branch1=b1, c_sharp_branch2=b2, c_sharp=c_sharp)
            row.update(dominant_branch="1" if b1 >= b2 else "2", status="partial", detail=str(exc))
            return row
        row.update(
            c_sharp_branch1=bounds.c_sharp_branch1,
            c_sharp_branch2=bounds.c_sharp_branch2,
            c_sharp=bounds.c_sharp,
            c_star=bounds.c_star,
            dominant_branch=bounds.dominant_branch,
        )
        if not (speeds or with_threshold):
            return row
        if not m.shootable:
            row.update(status="partial", detail="bounds only: corner derivatives are not finite and positive")
            return row
        for speed in speeds:
            row[admissible_column(speed)] = shoot(m, speed, eps, delta).admissible
        if with_threshold:
            row["c0"] = find_threshold(m, tol_c, eps, delta, bounds=bounds).c0
    except WaveError as exc:
        logger.error("Sweep row alpha=%g gamma=%g failed: %s", alpha, gamma, exc)
        row.update(status="failed", detail=str(exc))
    return row


class SweepService:
    @staticmethod
    def cmd_sweep(
        alphas: Sequence[float],
        gamma: float = 1.0,
        speeds: Optional[Sequence[float]] = None,
        with_threshold: bool = False,
        n_jobs: int = 1,
        reaction_kind: str = "product",
        k: float = 0.0,
        tol: Optional[float] = None,
        tol_c: Optional[float] = None,
        eps: Optional[float] = None,
        delta: Optional[float] = None,
    ) -> pd.DataFrame:
        """Bounds (and optionally admissibility and c0) for each alpha, in input order."""
        speeds = [float(c) for c in (speeds or [])]
        columns = SWEEP_COLUMNS + [admissible_column(c) for c in speeds]
        if not alphas:
            return pd.DataFrame(columns=columns)
        reaction = {"kind": reaction_kind}
        if reaction_kind == "monod":
            reaction["k"] = k
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_sweep_row)(alpha, gamma, reaction, speeds, with_threshold, tol, tol_c, eps, delta)
            for alpha in alphas
        )
        failed = sum(row["status"] == "failed" for row in rows)
        logger.info("Sweep over %d alpha values finished, %d failed", len(rows), failed)
        return pd.DataFrame(rows, columns=columns)


@dataclass
class ReportBundle:
    sections: Dict[str, Any] = field(default_factory=dict)
    profiles: Dict[str, Any] = field(default_factory=dict, repr=False)
    pde_run: Any = field(default=None, repr=False)

    @property
    def status(self):
        def statuses(section):
            if "status" in section:
                yield section["status"]
            for value in section.values():
                if isinstance(value, dict):
                    yield from statuses(value)

        found = set(statuses(self.sections))
        return "partial" if "failed" in found else "ok"

    def as_dict(self):
        return {**self.sections, "status": self.status}


class ReportService:
    """Runs every stage on one model; a failing stage is recorded and the rest continue."""

    @staticmethod
    def _model_section(m, config_data):
        audit = audit_assumptions(m)
        return {
            "status": "ok" if audit.passed else "failed",
            "config": config_data,
            "spec": m.as_dict(),
            "audit": audit.as_dict(),
        }

    @staticmethod
    def _profile_section(m, shot, c0, check_tol=1e-6):
        profile = reconstruct(m, shot)
        first_integral = check_first_integral(profile, check_tol)
        section = {
            "status": "ok",
            "speed": shot.speed,
            "delta": shot.delta,
            "regime": str(classify_regime(m, shot.speed, c0, shot)),
            "tail": shot.tail.as_dict() if shot.tail else None,
            "profile": profile.as_dict(),
            "first_integral": first_integral.as_dict(),
            "envelope": gronwall_envelope(m, profile).as_dict(),
            "expected_edge_slope": m.edge_slope(shot.speed),
        }
        return section, profile

    @classmethod
    def cmd_report(
        cls,
        m,
        config_data=None,
        tol: Optional[float] = None,
        tol_c: Optional[float] = None,
        eps: Optional[float] = None,
        delta: Optional[float] = None,
        pde: bool = False,
        pde_config=None,
        shooter: Callable = shoot,
    ) -> ReportBundle:
        bundle = ReportBundle()
        sections = bundle.sections
        sections["model"] = cls._model_section(m, config_data or {})

        bounds = None
        try:
            bounds = compute_bounds(m, tol)
            sections["bounds"] = {"status": "ok", **bounds.as_dict()}
        except WaveError as exc:
            logger.error("Bounds failed: %s", exc)
            sections["bounds"] = _failed(str(exc))

        report = None
        if not m.shootable:
            skipped = {
                "status": "skipped",
                "detail": f"{m.family_tag} has no finite positive corner derivatives; "
                "only bounds are available",
            }
            sections["speed"] = dict(skipped)
            sections["profiles"] = dict(skipped)
        else:
            report = cls._speed(bundle, m, bounds, tol_c, eps, delta, shooter)
            cls._profiles(bundle, m, report, shooter)

        if pde:
            try:
                run = bundle.pde_run = run_pde(m, pde_config)
                section = {"status": "ok" if run.speed is not None else "failed", **run.as_dict()}
                if run.speed is not None and report is not None:
                    section["relative_gap_to_c0"] = abs(run.speed - report.c0) / report.c0
                sections["pde"] = section
            except WaveError as exc:
                logger.error("PDE cross-check failed: %s", exc)
                sections["pde"] = _failed(str(exc))

        logger.info("Report finished with status %s", bundle.status)
        return bundle

    @staticmethod
    def _speed(bundle, m, bounds, tol_c, eps, delta, shooter):
        try:
            report = find_threshold(m, tol_c, eps, delta, bounds=bounds, shoot_fn=shooter)
        except WaveError as exc:
            logger.error("Threshold search failed: %s", exc)
            bundle.sections["speed"] = _failed(str(exc))
            return None
        section = bundle.sections["speed"] = {"status": "ok", **report.as_dict(include_shots=False)}
        tag = m.family_tag
        if tag.name == "power_law" and tag.alpha == tag.gamma == 1.0 and tag.reaction_kind == "product":
            section["conjecture_gap"] = conjecture_gap(report)
        return report

    @classmethod
    def _profiles(cls, bundle, m, report, shooter):
        profiles = bundle.sections["profiles"] = {}
        if report is None:
            profiles.update(_failed("no threshold speed"))
            return
        try:
            refined = refine_threshold(m, report, shoot_fn=shooter)
            shot = threshold_shot(m, refined, shoot_fn=shooter)
            profiles["threshold"], bundle.profiles["threshold"] = cls._profile_section(m, shot, refined.c0)
            profiles["threshold"]["refined_bracket"] = [refined.c_lo, refined.c_hi]
        except WaveError as exc:
            logger.error("Threshold profile failed: %s", exc)
            profiles["threshold"] = _failed(str(exc))
        try:
            shot = shooter(m, report.c0 + CLASSICAL_OFFSET, report.eps, CLASSICAL_DELTA, None)
            profiles["classical"], bundle.profiles["classical"] = cls._profile_section(m, shot, report.c0)
        except WaveError as exc:
            logger.error("Classical profile failed: %s", exc)
            profiles["classical"] = _failed(str(exc))
