"""Study analysis: replayable, pure function of the event log.

Per role: per-arm time mean +/- SD and the Mann-Whitney p between the role's
two arms; Likert statistics and agreement ratios over drafted arms; ICC over
the shared-case Likert matrix; edit-reason splits (content vs style); and
efficiency-flag proportions (writing / interpretation / both / neither).
"""

from __future__ import annotations

import math

from ..metrics.stats import agreement_ratio, icc, mann_whitney
from .config import CONTENT_REASONS, ROLES, STYLE_REASONS

INSUFFICIENT = "insufficient data"


def _mean_sd(values):
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def _role_arms(events, role):
    arms = {}
    for e in events:
        if e.kind != "report_submitted" or e.payload.get("role") != role:
            continue
        arms.setdefault(e.payload["arm"], []).append(e)
    return arms


def analyze(events) -> dict:
    """Aggregate a study event log into the report statistics."""
    events = list(events)
    if not events:
        raise ValueError("empty event log")

    report = {"roles": {}, "n_events": len(events)}
    for role in ROLES:
        role_report = {"time": {}, "likert": {}, "edit_reasons": {}, "efficiency": {}}

        arms = _role_arms(events, role)
        for arm, rows in sorted(arms.items()):
            times = [r.payload["server_elapsed_s"] for r in rows]
            mean, sd = _mean_sd(times)
            role_report["time"][arm] = {"n": len(times), "mean_s": mean, "sd_s": sd}
        if len(arms) == 2:
            (arm_a, rows_a), (arm_b, rows_b) = sorted(arms.items())
            if len(rows_a) >= 2 and len(rows_b) >= 2:
                p = mann_whitney([r.payload["server_elapsed_s"] for r in rows_a],
                                 [r.payload["server_elapsed_s"] for r in rows_b])
                role_report["time"]["comparison"] = {"arms": [arm_a, arm_b], "p_value": p}
            else:
                role_report["time"]["comparison"] = INSUFFICIENT

        feedback = [e for e in events
                    if e.kind == "feedback_submitted" and e.payload.get("role") == role]
        drafted = [e for e in feedback if e.payload["arm"] in ("model_draft", "resident_draft")]

        by_arm = {}
        for e in drafted:
            by_arm.setdefault(e.payload["arm"], []).append(e)
        for arm, rows in sorted(by_arm.items()):
            likerts = [r.payload["likert"] for r in rows if r.payload["likert"] is not None]
            if len(likerts) < 2:
                role_report["likert"][arm] = INSUFFICIENT
                continue
            mean, sd = _mean_sd(likerts)
            role_report["likert"][arm] = {
                "n": len(likerts),
                "mean": mean,
                "sd": sd,
                "agreement_ratio": agreement_ratio(likerts),
            }
        if len(by_arm) == 2:
            (arm_a, rows_a), (arm_b, rows_b) = sorted(by_arm.items())
            la = [r.payload["likert"] for r in rows_a if r.payload["likert"] is not None]
            lb = [r.payload["likert"] for r in rows_b if r.payload["likert"] is not None]
            if len(la) >= 2 and len(lb) >= 2:
                role_report["likert"]["comparison"] = {
                    "arms": [arm_a, arm_b], "p_value": mann_whitney(la, lb),
                }
            else:
                role_report["likert"]["comparison"] = INSUFFICIENT

        role_report["likert"]["icc"] = _shared_case_icc(drafted)

        for arm, rows in sorted(by_arm.items()):
            n = len(rows)
            content = sum(1 for r in rows if any(x in CONTENT_REASONS for x in r.payload["reasons"]))
            style = sum(1 for r in rows if any(x in STYLE_REASONS for x in r.payload["reasons"]))
            role_report["edit_reasons"][arm] = {
                "n": n, "content_fraction": content / n, "style_fraction": style / n,
            }
            eff = [r.payload["efficiency"] for r in rows if r.payload["efficiency"]]
            if eff:
                both = sum(1 for e in eff if e["writing"] and e["interpretation"])
                writing_only = sum(1 for e in eff if e["writing"] and not e["interpretation"])
                interp_only = sum(1 for e in eff if e["interpretation"] and not e["writing"])
                neither = len(eff) - both - writing_only - interp_only
                role_report["efficiency"][arm] = {
                    "n": len(eff),
                    "writing_only": writing_only / len(eff),
                    "interpretation_only": interp_only / len(eff),
                    "both": both / len(eff),
                    "neither": neither / len(eff),
                    "writing_any": (writing_only + both) / len(eff),
                    "interpretation_any": (interp_only + both) / len(eff),
                }

        report["roles"][role] = role_report
    return report


def _shared_case_icc(drafted_feedback):
    """ICC(2,1) over cases rated (with a Likert value) by every rater seen."""
    by_case = {}
    raters = set()
    for e in drafted_feedback:
        if e.payload["likert"] is None:
            continue
        by_case.setdefault(e.case_id, {})[e.payload["reader_id"]] = e.payload["likert"]
        raters.add(e.payload["reader_id"])
    raters = sorted(raters)
    if len(raters) < 2:
        return INSUFFICIENT
    matrix = [[ratings[r] for r in raters]
              for _, ratings in sorted(by_case.items())
              if set(ratings) >= set(raters)]
    if len(matrix) < 2:
        return INSUFFICIENT
    try:
        return {"value": icc(matrix), "n_cases": len(matrix), "n_raters": len(raters)}
    except ValueError:
        return INSUFFICIENT
