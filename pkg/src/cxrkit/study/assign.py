"""Blinded, seeded case assignment across study arms.

Each reader draws its per-arm quota without replacement, preferring the
least-used cases so the whole pool gets covered; the reader's 30 cases are
then shuffled so arm order is unpredictable. Arm tags exist only server-side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .config import StudyConfig


@dataclass(frozen=True)
class Assignment:
    case_id: str
    arm: str


def assign_cases(cfg: StudyConfig) -> dict:
    """reader_id -> ordered list of Assignment, deterministic per cfg.seed."""
    rng = random.Random(cfg.seed)
    usage = {c.case_id: 0 for c in cfg.cases}
    with_resident = {c.case_id for c in cfg.cases if c.resident_draft}

    out = {}
    for reader in sorted(cfg.readers, key=lambda r: r.reader_id):
        plan = cfg.plans[reader.role]
        chosen = []
        taken = set()
        # fill the constrained arm first so unconstrained arms cannot starve it
        arm_order = sorted(plan, key=lambda a: (a != "resident_draft", a))
        for arm in arm_order:
            quota = plan[arm]
            eligible = [cid for cid in sorted(usage) if cid not in taken]
            if arm == "resident_draft":
                eligible = [cid for cid in eligible if cid in with_resident]
            if len(eligible) < quota:
                raise ValueError(f"plan for {reader.reader_id} exceeds eligible pool for {arm}")
            # least-used first; seeded random tiebreak
            keyed = sorted(eligible, key=lambda cid: (usage[cid], rng.random()))
            for cid in keyed[:quota]:
                chosen.append(Assignment(cid, arm))
                taken.add(cid)
                usage[cid] += 1
        rng.shuffle(chosen)
        out[reader.reader_id] = chosen
    return out
