"""Study configuration: case pool, readers, and per-role plans."""

from __future__ import annotations

from dataclasses import dataclass, field

ARMS = ("scratch", "model_draft", "resident_draft")
ROLES = ("resident", "attending")

# per-role plan: arm -> number of cases (10 from scratch / 20 model drafts for
# residents; 10 resident drafts / 20 model drafts for attendings)
DEFAULT_PLANS = {
    "resident": {"scratch": 10, "model_draft": 20},
    "attending": {"resident_draft": 10, "model_draft": 20},
}

CONTENT_REASONS = ("missing_finding", "false_prediction", "severity_misassessment", "wrong_location")
STYLE_REASONS = ("ordering", "phrasing", "verbosity", "formatting")
REASON_TAXONOMY = CONTENT_REASONS + STYLE_REASONS

LIKERT_CHOICES = {-10: "strongly disagree", -5: "disagree", 0: "neutral", 5: "agree", 10: "strongly agree"}


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    images: tuple  # paths to PNG files
    indication: str
    model_draft: str
    resident_draft: str | None = None


@dataclass(frozen=True)
class Reader:
    reader_id: str
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class StudyConfig:
    cases: tuple
    readers: tuple
    seed: int = 0
    plans: dict = field(default_factory=lambda: {r: dict(p) for r, p in DEFAULT_PLANS.items()})

    def __post_init__(self):
        if not self.cases:
            raise ValueError("no cases")
        ids = [c.case_id for c in self.cases]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate case ids")
        for role, plan in self.plans.items():
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")
            for arm in plan:
                if arm not in ARMS:
                    raise ValueError(f"unknown arm {arm!r}")
        for reader in self.readers:
            if reader.role not in self.plans:
                raise ValueError(f"no plan for role {reader.role!r}")
        n_with_resident = sum(1 for c in self.cases if c.resident_draft)
        for reader in self.readers:
            plan = self.plans[reader.role]
            if sum(plan.values()) > len(self.cases):
                raise ValueError("plan sizes exceed the case pool")
            if plan.get("resident_draft", 0) > n_with_resident:
                raise ValueError("not enough cases carry a resident draft")

    def cases_per_reader(self, role: str) -> int:
        return sum(self.plans[role].values())

    def case(self, case_id: str) -> CaseRecord:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise KeyError(case_id)


def build_study_config(cases, readers, seed: int = 0, plans=None) -> StudyConfig:
    return StudyConfig(
        cases=tuple(cases),
        readers=tuple(readers),
        seed=seed,
        plans=plans or {r: dict(p) for r, p in DEFAULT_PLANS.items()},
    )
