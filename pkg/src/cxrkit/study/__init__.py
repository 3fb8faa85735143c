"""Reader-study backend: blinded assignment, timed sessions, analysis."""

from .analyze import analyze
from .assign import Assignment, assign_cases
from .config import CaseRecord, Reader, StudyConfig, build_study_config
from .events import EventLog, StudyEvent
from .service import ProtocolError, StudyService, serve_study

__all__ = [
    "Assignment",
    "CaseRecord",
    "EventLog",
    "ProtocolError",
    "Reader",
    "StudyConfig",
    "StudyEvent",
    "StudyService",
    "analyze",
    "assign_cases",
    "build_study_config",
    "serve_study",
]
