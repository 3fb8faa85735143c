"""Eight-task evaluation benchmark over generate-capable models."""

from .build import BENCH_TASKS, build_eval_set
from .items import EvalItem, EvalResult, ItemRow
from .oracle import CorruptedOracleModel, OracleModel
from .report import report
from .run import recompute_aggregates, run_task

__all__ = [
    "BENCH_TASKS",
    "CorruptedOracleModel",
    "EvalItem",
    "EvalResult",
    "ItemRow",
    "OracleModel",
    "build_eval_set",
    "recompute_aggregates",
    "report",
    "run_task",
]
